//! Damped Gauss-Newton least squares with deterministic multi-start. The
//! systems here are tiny (<= 16 residuals, <= 10 unknowns), so the normal
//! equations with a Levenberg damping term and a numeric Jacobian are enough.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub starts: usize,
    pub seed: u64,
    /// start box for each unknown
    pub range: (f64, f64),
    pub max_iterations: usize,
    /// stop a start early below this squared-norm cost
    pub cost_target: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 1,
            range: (-3.0, 3.0),
            max_iterations: 60,
            cost_target: 1e-24,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub x: Vec<f64>,
    pub cost: f64,
    pub start_index: usize,
    pub starts_used: usize,
}

/// Minimizes `sum_i r_i(x)^2` from multiple deterministic starts; privileged
/// starts run first, then seeded uniform draws. Results merge by smallest
/// cost with the lowest start index winning ties.
pub fn multi_start_least_squares(
    residual: &dyn Fn(&[f64], &mut Vec<f64>),
    nvars: usize,
    nres: usize,
    privileged: &[Vec<f64>],
    cfg: &SolverConfig,
) -> SolveOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<SolveOutcome> = None;
    let total = privileged.len() + cfg.starts;
    let mut attempted = 0;
    for idx in 0..total {
        let x0: Vec<f64> = if idx < privileged.len() {
            let mut p = privileged[idx].clone();
            p.resize(nvars, 0.0);
            p
        } else {
            (0..nvars)
                .map(|_| rng.gen_range(cfg.range.0..cfg.range.1))
                .collect()
        };
        if x0.iter().any(|v| !v.is_finite()) {
            continue;
        }
        attempted += 1;
        let (x, cost) = levenberg(residual, &x0, nres, cfg.max_iterations);
        let better = match &best {
            None => true,
            Some(b) => cost < b.cost,
        };
        if better {
            best = Some(SolveOutcome {
                x,
                cost,
                start_index: idx,
                starts_used: idx + 1,
            });
        }
        if best
            .as_ref()
            .map(|b| b.cost < cfg.cost_target)
            .unwrap_or(false)
        {
            break;
        }
    }
    let mut out = best.expect("at least one start");
    out.starts_used = attempted;
    out
}

fn cost_of(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn levenberg(
    residual: &dyn Fn(&[f64], &mut Vec<f64>),
    x0: &[f64],
    nres: usize,
    max_iterations: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = vec![0.0; nres];
    residual(&x, &mut r);
    let mut cost = cost_of(&r);
    if !cost.is_finite() {
        return (x, f64::INFINITY);
    }
    let mut lambda = 1e-3;
    let mut jac = vec![vec![0.0; n]; nres];
    let mut rp = vec![0.0; nres];
    let mut rm = vec![0.0; nres];
    for _ in 0..max_iterations {
        // numeric Jacobian, central differences
        for j in 0..n {
            let h = 1e-7 * (1.0 + x[j].abs());
            let save = x[j];
            x[j] = save + h;
            residual(&x, &mut rp);
            x[j] = save - h;
            residual(&x, &mut rm);
            x[j] = save;
            for i in 0..nres {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        // normal equations (J^T J + lambda diag) delta = -J^T r
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for i in 0..nres {
            for a in 0..n {
                let ja = jac[i][a];
                if ja == 0.0 {
                    continue;
                }
                jtr[a] += ja * r[i];
                for b in a..n {
                    jtj[a][b] += ja * jac[i][b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                jtj[a][b] = jtj[b][a];
            }
        }
        let mut improved = false;
        for _damp in 0..8 {
            let mut m = jtj.clone();
            for (a, row) in m.iter_mut().enumerate() {
                row[a] += lambda * (1.0 + jtj[a][a]);
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let Some(delta) = solve_dense(&mut m, &rhs) else {
                lambda *= 10.0;
                continue;
            };
            let xt: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a + d).collect();
            if xt.iter().any(|v| !v.is_finite()) {
                lambda *= 10.0;
                continue;
            }
            residual(&xt, &mut rp);
            let ct = cost_of(&rp);
            if ct.is_finite() && ct < cost {
                x = xt;
                r.copy_from_slice(&rp);
                cost = ct;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved || cost < 1e-30 {
            break;
        }
    }
    (x, cost)
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve_dense(m: &mut [Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let (pivot, pval) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if pval < 1e-14 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in (r + 1)..n {
            acc -= m[r][c] * x[c];
        }
        x[r] = acc / m[r][r];
    }
    Some(x)
}
