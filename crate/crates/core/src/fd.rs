//! High-order central finite-difference residual checks for the NS equation
//! and its reduced ODEs. Stencil coefficients are solved exactly over the
//! rationals, so any (derivative order, accuracy order) combination is
//! available without hand-typed tables.

use std::collections::HashMap;

use crate::error::{LieError, Result};
use crate::fixtures::{NsSolution, OdeSolution};
use crate::linalg::RatMatrix;
use crate::ratio::{rat, rat_to_f64, Rat};

/// Central-difference coefficients for d^m/dx^m with accuracy >= `acc`,
/// returned as (offset, coefficient) with the 1/h^m factor left to the caller.
pub fn central_stencil(m: u32, acc: u32) -> Vec<(i64, f64)> {
    debug_assert!(acc % 2 == 0, "central stencils have even accuracy");
    let half = ((m + 1) / 2 + acc / 2 - 1) as i64;
    let offsets: Vec<i64> = (-half..=half).collect();
    let n = offsets.len();
    // solve sum_j c_j k_j^t = m! [t == m] for t = 0..n-1
    let mut rows = Vec::with_capacity(n);
    for t in 0..n as u32 {
        rows.push(
            offsets
                .iter()
                .map(|&k| num_traits::pow::pow(rat(k), t as usize))
                .collect::<Vec<Rat>>(),
        );
    }
    let mat = RatMatrix::from_rows(rows);
    let mut rhs = vec![Rat::zero(); n];
    let mut mfact = Rat::from_integer(1.into());
    for i in 2..=m as i64 {
        mfact *= rat(i);
    }
    rhs[m as usize] = mfact;
    let sol = mat.solve(&rhs).expect("Vandermonde system is regular");
    offsets
        .iter()
        .zip(sol.iter())
        .map(|(&k, c)| (k, rat_to_f64(c)))
        .collect()
}

use num_traits::Zero;

/// Mixed partial derivative via nested 1D central stencils.
/// `orders` lists (axis, derivative order) per axis, at most once per axis.
pub struct Differentiator {
    cache: HashMap<(u32, u32), Vec<(i64, f64)>>,
    pub acc: u32,
}

impl Differentiator {
    pub fn new(acc: u32) -> Self {
        Self {
            cache: HashMap::new(),
            acc,
        }
    }

    fn stencil(&mut self, m: u32) -> Vec<(i64, f64)> {
        let acc = self.acc;
        self.cache
            .entry((m, acc))
            .or_insert_with(|| central_stencil(m, acc))
            .clone()
    }

    /// d^{m1+m2+...} f / dx_{a1}^{m1} ... at `point` with uniform step `h`.
    pub fn partial(
        &mut self,
        f: &dyn Fn(&[f64]) -> f64,
        point: &[f64],
        orders: &[(usize, u32)],
        h: f64,
    ) -> f64 {
        self.partial_rec(f, point.to_vec(), orders, h)
    }

    fn partial_rec(
        &mut self,
        f: &dyn Fn(&[f64]) -> f64,
        point: Vec<f64>,
        orders: &[(usize, u32)],
        h: f64,
    ) -> f64 {
        let Some(&(axis, m)) = orders.first() else {
            return f(&point);
        };
        if m == 0 {
            return self.partial_rec(f, point, &orders[1..], h);
        }
        let st = self.stencil(m);
        let mut acc = 0.0;
        for (off, c) in st {
            if c == 0.0 {
                continue;
            }
            let mut p = point.clone();
            p[axis] += off as f64 * h;
            acc += c * self.partial_rec(f, p, &orders[1..], h);
        }
        acc / h.powi(m as i32)
    }
}

/// Grid/step configuration for the residual checks.
#[derive(Clone, Debug)]
pub struct GridSpec {
    /// inclusive box per axis
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// sample points per axis
    pub n: Vec<usize>,
    /// stencil step
    pub h: f64,
    /// accuracy order of the stencils (2, 4, 6, ...)
    pub acc: u32,
    /// Richardson-extrapolate the residual across steps h and h/2
    pub richardson: bool,
}

impl GridSpec {
    pub fn points(&self) -> Vec<Vec<f64>> {
        let dims = self.lo.len();
        let mut out = vec![vec![]];
        for d in 0..dims {
            let mut next = Vec::new();
            for base in &out {
                let steps = self.n[d].max(1);
                for i in 0..steps {
                    let t = if steps == 1 {
                        0.5
                    } else {
                        i as f64 / (steps - 1) as f64
                    };
                    let mut p = base.clone();
                    p.push(self.lo[d] + t * (self.hi[d] - self.lo[d]));
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }
}

/// Stream-function residual of the (2+1)-dimensional NS equation:
/// psi_xxt + psi_yyt + psi_x (psi_xxy + psi_yyy) - psi_y (psi_xxx + psi_xyy)
/// - gamma (psi_xxxx + 2 psi_xxyy + psi_yyyy).
fn ns_residual_at(
    diff: &mut Differentiator,
    psi: &dyn Fn(&[f64]) -> f64,
    gamma: f64,
    p: &[f64],
    h: f64,
) -> f64 {
    let d = |diff: &mut Differentiator, orders: &[(usize, u32)]| diff.partial(psi, p, orders, h);
    let psi_x = d(diff, &[(0, 1)]);
    let psi_y = d(diff, &[(1, 1)]);
    let psi_xxt = d(diff, &[(0, 2), (2, 1)]);
    let psi_yyt = d(diff, &[(1, 2), (2, 1)]);
    let psi_xxy = d(diff, &[(0, 2), (1, 1)]);
    let psi_yyy = d(diff, &[(1, 3)]);
    let psi_xxx = d(diff, &[(0, 3)]);
    let psi_xyy = d(diff, &[(0, 1), (1, 2)]);
    let psi_xxxx = d(diff, &[(0, 4)]);
    let psi_xxyy = d(diff, &[(0, 2), (1, 2)]);
    let psi_yyyy = d(diff, &[(1, 4)]);
    psi_xxt + psi_yyt + psi_x * (psi_xxy + psi_yyy)
        - psi_y * (psi_xxx + psi_xyy)
        - gamma * (psi_xxxx + 2.0 * psi_xxyy + psi_yyyy)
}

/// Maximum |residual| of a closed-form solution over the grid; stencil samples
/// must stay inside the solution's domain.
pub fn ns_residual(sol: &NsSolution, grid: &GridSpec) -> Result<f64> {
    let gamma = sol.gamma();
    let psi = |p: &[f64]| sol.eval(p[0], p[1], p[2]);
    let mut diff = Differentiator::new(grid.acc);
    let mut worst: f64 = 0.0;
    let reach = reach_of(grid);
    for p in grid.points() {
        for (dx, dy) in [(-reach, 0.0), (reach, 0.0), (0.0, -reach), (0.0, reach)] {
            if !sol.in_domain(p[0] + dx, p[1] + dy, p[2]) {
                return Err(LieError::SingularGridPoint(format!("{:?}", p)));
            }
        }
        let r = if grid.richardson {
            let r1 = ns_residual_at(&mut diff, &psi, gamma, &p, grid.h);
            let r2 = ns_residual_at(&mut diff, &psi, gamma, &p, grid.h / 2.0);
            let w = 2f64.powi(grid.acc as i32);
            (w * r2 - r1) / (w - 1.0)
        } else {
            ns_residual_at(&mut diff, &psi, gamma, &p, grid.h)
        };
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

fn reach_of(grid: &GridSpec) -> f64 {
    // widest per-axis excursion: the half-width of the widest stencil used
    // (4th derivative at the configured accuracy), with one step of slack
    let half = (4 + 1) / 2 + grid.acc / 2 - 1;
    (half + 1) as f64 * grid.h
}

/// The reduced ODEs of the two NS reductions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReducedOde {
    /// 8 gamma [xi^2 F'''' + 4 xi F''' + 2 F''] - sign = 0, sign = +-1
    Red1,
    /// gamma [(4c^2+1) G'' + 8 c G' + 4 G] - G^2 = 0
    Red2,
}

pub struct OdeGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub h: f64,
    pub acc: u32,
}

/// Max |residual| of a candidate along the 1-D grid.
pub fn reduced_ode_residual(
    ode: ReducedOde,
    candidate: &OdeSolution,
    gamma: f64,
    c: f64,
    grid: &OdeGrid,
) -> Result<f64> {
    let f = |p: &[f64]| candidate.eval(p[0]);
    let mut diff = Differentiator::new(grid.acc);
    let mut worst: f64 = 0.0;
    for i in 0..grid.n.max(2) {
        let xi = grid.lo + (grid.hi - grid.lo) * i as f64 / (grid.n.max(2) - 1) as f64;
        if matches!(ode, ReducedOde::Red1) && xi.abs() < 10.0 * grid.h {
            return Err(LieError::SingularGridPoint(format!("xi = {xi}")));
        }
        let p = [xi];
        let r = match ode {
            ReducedOde::Red1 => {
                let f2 = diff.partial(&f, &p, &[(0, 2)], grid.h);
                let f3 = diff.partial(&f, &p, &[(0, 3)], grid.h);
                let f4 = diff.partial(&f, &p, &[(0, 4)], grid.h);
                let sign = match candidate {
                    OdeSolution::Red1F { plus_branch, .. } => {
                        if *plus_branch {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                    _ => 1.0,
                };
                8.0 * gamma * (xi * xi * f4 + 4.0 * xi * f3 + 2.0 * f2) - sign
            }
            ReducedOde::Red2 => {
                let g = f(&p);
                let g1 = diff.partial(&f, &p, &[(0, 1)], grid.h);
                let g2 = diff.partial(&f, &p, &[(0, 2)], grid.h);
                gamma * ((4.0 * c * c + 1.0) * g2 + 8.0 * c * g1 + 4.0 * g) - g * g
            }
        };
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Convergence-order sanity: halving the step must shrink the residual by at
/// least 2^(acc-1) when truncation dominates rounding.
pub fn convergence_order_check(sol: &NsSolution, grid: &GridSpec) -> Result<(f64, f64, bool)> {
    let coarse = ns_residual(
        sol,
        &GridSpec {
            richardson: false,
            ..grid.clone()
        },
    )?;
    let fine = ns_residual(
        sol,
        &GridSpec {
            h: grid.h / 2.0,
            richardson: false,
            ..grid.clone()
        },
    )?;
    let needed = 2f64.powi(grid.acc as i32 - 1);
    Ok((coarse, fine, coarse >= needed * fine))
}
