//! Per-generator adjoint factors A_i(eps_i) and the general adjoint
//! transformation matrix A = A_1 A_2 ... A_n with exp-polynomial entries.
//!
//! Conventions: coefficients are row vectors and transform as
//! `(a_1..a_n) -> (a_1..a_n) * A`, so each factor is the transpose of
//! `exp(-eps * ad(v_i))`. The split `ad = S + N` (semisimple + nilpotent)
//! is computed exactly over the rationals from generalized eigenspace
//! kernels; the factor exists in the ring only when the spectrum is integer.

use num_traits::{One, Zero};

use crate::algebra::{AlgebraElement, LieAlgebra};
use crate::error::{LieError, Result};
use crate::exppoly::{Assignment, ExpPoly};
use crate::linalg::{format_poly, integer_roots, RatMatrix};
use crate::ratio::{rat, rat_to_f64, Rat};

/// Matrix of the adjoint action of `exp(eps_i v_i)` in the row-vector
/// convention; entries are exp-polynomials in the single variable `eps_i`
/// (variable index = generator index, 0-based).
#[derive(Clone, Debug)]
pub struct AdjointFactor {
    pub generator: usize,
    pub matrix: Vec<Vec<ExpPoly>>,
}

/// Product of all factors in a recorded order.
#[derive(Clone, Debug)]
pub struct GeneralAdjointMatrix {
    pub matrix: Vec<Vec<ExpPoly>>,
    pub order: Vec<usize>,
}

/// Builds the factor for generator `i` (0-based).
pub fn adjoint_factor(alg: &LieAlgebra, i: usize) -> Result<AdjointFactor> {
    let n = alg.dim();
    let m = alg.ad_matrix(&AlgebraElement::basis(i, n))?;

    let char_poly = m.char_poly();
    let (roots, residual) = integer_roots(&char_poly);
    if residual.len() > 1 {
        return Err(LieError::NonIntegerSpectrum {
            generator: i + 1,
            factor: format_poly(&residual),
        });
    }

    // distinct eigenvalues with generalized eigenspaces ker (M - l)^n
    let mut eigen: Vec<i64> = roots.clone();
    eigen.dedup();
    let mut columns: Vec<Vec<Rat>> = Vec::new();
    let mut col_eigs: Vec<i64> = Vec::new();
    for &l in &eigen {
        let mut shifted = m.clone();
        for d in 0..n {
            shifted[(d, d)] -= rat(l);
        }
        for v in shifted.pow(n).nullspace() {
            columns.push(v);
            col_eigs.push(l);
        }
    }
    debug_assert_eq!(
        columns.len(),
        n,
        "generalized eigenspaces must fill the space"
    );

    // T has the kernel-chain basis as columns; S = T diag T^-1
    let mut t = RatMatrix::zeros(n, n);
    for (c, col) in columns.iter().enumerate() {
        for r in 0..n {
            t[(r, c)] = col[r].clone();
        }
    }
    let t_inv = t.inverse().expect("kernel-chain basis is a basis");
    let mut diag = RatMatrix::zeros(n, n);
    for (c, &l) in col_eigs.iter().enumerate() {
        diag[(c, c)] = rat(l);
    }
    let s = t.mul(&diag).mul(&t_inv);
    let nil = m.sub(&s);
    debug_assert!(nil.pow(n).is_zero(), "N = M - S must be nilpotent");

    // exp(-eps M) = [sum_l e^{-l eps} P_l] * [sum_k (-eps)^k N^k / k!]
    let mut semi = vec![vec![ExpPoly::zero(); n]; n];
    for &l in &eigen {
        let mut sel = RatMatrix::zeros(n, n);
        for (c, &cl) in col_eigs.iter().enumerate() {
            if cl == l {
                sel[(c, c)] = Rat::one();
            }
        }
        let proj = t.mul(&sel).mul(&t_inv);
        let e = ExpPoly::exp_var(i, -l);
        for r in 0..n {
            for c in 0..n {
                if !proj[(r, c)].is_zero() {
                    semi[r][c] = semi[r][c].add(&e.scale(&proj[(r, c)]));
                }
            }
        }
    }

    let mut nilp = vec![vec![ExpPoly::zero(); n]; n];
    let mut power = RatMatrix::identity(n);
    let mut factorial = Rat::one();
    for k in 0..n as u32 {
        if k > 0 {
            power = power.mul(&nil);
            factorial *= rat(k as i64);
            if power.is_zero() {
                break;
            }
        }
        let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
        let coeff_scale = sign / &factorial;
        let eps_pow = ExpPoly::var(i).pow(k);
        for r in 0..n {
            for c in 0..n {
                if !power[(r, c)].is_zero() {
                    let term = eps_pow.scale(&(&coeff_scale * &power[(r, c)]));
                    nilp[r][c] = nilp[r][c].add(&term);
                }
            }
        }
    }

    let exp_neg = mat_mul(&semi, &nilp);
    let matrix = mat_transpose(&exp_neg);
    Ok(AdjointFactor {
        generator: i,
        matrix,
    })
}

/// Product of the factors in `order` (0-based permutation; default 0..n).
pub fn general_adjoint_matrix(
    alg: &LieAlgebra,
    order: Option<&[usize]>,
) -> Result<GeneralAdjointMatrix> {
    let n = alg.dim();
    let default: Vec<usize> = (0..n).collect();
    let order: Vec<usize> = order.map(|o| o.to_vec()).unwrap_or(default);
    {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(LieError::Invalid(format!(
                "factor order must be a permutation of 1..{n}"
            )));
        }
    }
    let mut acc = identity_ep(n);
    for &i in &order {
        let f = adjoint_factor(alg, i)?;
        acc = mat_mul(&acc, &f.matrix);
    }
    Ok(GeneralAdjointMatrix { matrix: acc, order })
}

impl GeneralAdjointMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// Numeric row-vector action `(a) * A(eps)`.
    pub fn apply(&self, coeffs: &[f64], at: &Assignment) -> Result<Vec<f64>> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (j, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, &a) in coeffs.iter().enumerate() {
                if a != 0.0 {
                    acc += a * self.matrix[i][j].eval(at)?;
                }
            }
            *slot = acc;
        }
        Ok(out)
    }

    /// Substitutes eps = 0 everywhere; identity for any order.
    pub fn at_zero(&self) -> Vec<Vec<ExpPoly>> {
        let n = self.dim();
        let mut out = self.matrix.clone();
        for row in out.iter_mut() {
            for e in row.iter_mut() {
                let mut cur = e.clone();
                for v in 0..n {
                    cur = cur.subst_zero(v);
                }
                *e = cur;
            }
        }
        out
    }
}

/// One compiled factor entry: (row, col, terms as (coeff, eps power, exp power)).
type CompiledEntry = (usize, usize, Vec<(f64, u32, i64)>);

/// Numeric evaluation of `w -> w * A(eps)` via per-factor compiled forms;
/// this is the hot path of the equivalence solver.
#[derive(Clone, Debug)]
pub struct NumericAdjoint {
    n: usize,
    /// factors in product order, keyed by generator
    factors: Vec<(usize, Vec<CompiledEntry>)>,
}

impl NumericAdjoint {
    pub fn new(alg: &LieAlgebra, order: Option<&[usize]>) -> Result<Self> {
        let n = alg.dim();
        let default: Vec<usize> = (0..n).collect();
        let order = order.map(|o| o.to_vec()).unwrap_or(default);
        let mut factors = Vec::new();
        for &i in &order {
            let f = adjoint_factor(alg, i)?;
            let mut entries = Vec::new();
            for (r, row) in f.matrix.iter().enumerate() {
                for (c, e) in row.iter().enumerate() {
                    if e.is_zero() {
                        continue;
                    }
                    let mut terms = Vec::new();
                    for (key, coeff) in e.terms() {
                        let p = key.pows.first().map(|&(_, p)| p).unwrap_or(0);
                        let q = key.exps.first().map(|&(_, q)| q).unwrap_or(0);
                        terms.push((rat_to_f64(coeff), p, q));
                    }
                    entries.push((r, c, terms));
                }
            }
            factors.push((i, entries));
        }
        Ok(Self { n, factors })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Full matrix A(eps) as nested Vecs (row-major).
    pub fn matrix_at(&self, eps: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n;
        let mut acc = vec![vec![0.0; n]; n];
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let mut fm = vec![vec![0.0; n]; n];
        let mut next = vec![vec![0.0; n]; n];
        for (gen, entries) in &self.factors {
            let x = eps[*gen];
            let ex = x.exp();
            for row in fm.iter_mut() {
                row.fill(0.0);
            }
            for (r, c, terms) in entries {
                let mut v = 0.0;
                for &(coeff, p, q) in terms {
                    v += coeff * x.powi(p as i32) * ex.powi(q as i32);
                }
                fm[*r][*c] = v;
            }
            for row in next.iter_mut() {
                row.fill(0.0);
            }
            for r in 0..n {
                for k in 0..n {
                    let a = acc[r][k];
                    if a != 0.0 {
                        for c in 0..n {
                            next[r][c] += a * fm[k][c];
                        }
                    }
                }
            }
            std::mem::swap(&mut acc, &mut next);
        }
        acc
    }

    /// Row-vector action for both pair members at once.
    pub fn transform_pair(&self, a: &[f64], b: &[f64], eps: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = self.matrix_at(eps);
        (row_mul(a, &m), row_mul(b, &m))
    }
}

pub fn row_mul(v: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut out = vec![0.0; n];
    for (i, &vi) in v.iter().enumerate() {
        if vi != 0.0 {
            for (j, slot) in out.iter_mut().enumerate() {
                *slot += vi * m[i][j];
            }
        }
    }
    out
}

/// Numeric `Ad_g(w)` with the default factor order: `(w) * A(eps)`.
pub fn apply_adjoint(alg: &LieAlgebra, w: &AlgebraElement, eps: &Assignment) -> Result<Vec<f64>> {
    let n = alg.dim();
    let num = NumericAdjoint::new(alg, None)?;
    let mut vals = vec![0.0; n];
    for v in 0..n {
        vals[v] = eps.get(v).ok_or(LieError::UnboundVariable(v + 1))?;
    }
    Ok(row_mul(&w.to_f64(), &num.matrix_at(&vals)))
}

/// The adjoint representation table: entry (i, j) is the element
/// `Ad_{exp(eps v_i)}(v_j)` with a single symbolic eps (variable index i).
pub fn adjoint_table(alg: &LieAlgebra) -> Result<Vec<Vec<Vec<ExpPoly>>>> {
    let n = alg.dim();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let f = adjoint_factor(alg, i)?;
        // row j of the factor = coordinates of Ad(v_j)
        out.push(f.matrix.clone());
    }
    Ok(out)
}

/// Text rendering of the adjoint table with `eps` as the symbol everywhere.
pub fn format_adjoint_table(alg: &LieAlgebra) -> Result<String> {
    let n = alg.dim();
    let table = adjoint_table(alg)?;
    let names = alg.basis_names();
    let mut cells: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["Ad".to_string()];
    header.extend(names.iter().cloned());
    cells.push(header);
    for (i, block) in table.iter().enumerate() {
        let mut line = vec![names[i].clone()];
        for j in 0..n {
            let coords: Vec<ExpPoly> = block[j].iter().map(|e| e.rename_var(i, 0)).collect();
            line.push(format_element_eps(&coords, names));
        }
        cells.push(line);
    }
    Ok(crate::algebra::align_grid(&cells))
}

fn format_element_eps(coords: &[ExpPoly], names: &[String]) -> String {
    let named: Vec<String> = names.to_vec();
    let rendered = crate::exppoly::format_element(coords, &named);
    // single symbolic variable: render as plain `eps`
    rendered.replace("eps1", "eps")
}

pub(crate) fn identity_ep(n: usize) -> Vec<Vec<ExpPoly>> {
    let mut m = vec![vec![ExpPoly::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ExpPoly::one();
    }
    m
}

pub(crate) fn mat_mul(a: &[Vec<ExpPoly>], b: &[Vec<ExpPoly>]) -> Vec<Vec<ExpPoly>> {
    let n = a.len();
    let mut out = vec![vec![ExpPoly::zero(); n]; n];
    for r in 0..n {
        for k in 0..n {
            if a[r][k].is_zero() {
                continue;
            }
            for c in 0..n {
                if !b[k][c].is_zero() {
                    out[r][c] = out[r][c].add(&a[r][k].mul(&b[k][c]));
                }
            }
        }
    }
    out
}

pub(crate) fn mat_transpose(a: &[Vec<ExpPoly>]) -> Vec<Vec<ExpPoly>> {
    let n = a.len();
    let mut out = vec![vec![ExpPoly::zero(); n]; n];
    for r in 0..n {
        for c in 0..n {
            out[c][r] = a[r][c].clone();
        }
    }
    out
}

/// Determinant of an exp-polynomial matrix by cofactor expansion; used only
/// for the small factor-determinant identity tests.
pub fn ep_determinant(m: &[Vec<ExpPoly>]) -> ExpPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = ExpPoly::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<ExpPoly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != c)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let cof = m[0][c].mul(&ep_determinant(&minor));
        det = if c % 2 == 0 {
            det.add(&cof)
        } else {
            det.sub(&cof)
        };
    }
    det
}
