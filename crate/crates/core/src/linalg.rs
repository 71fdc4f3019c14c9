//! Exact dense linear algebra over the rationals: Gaussian elimination,
//! nullspaces, inverses and characteristic polynomials for the small matrices
//! this crate works with (n <= 16 or so).

use num_traits::{One, Signed, Zero};

use crate::ratio::{format_rat, rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x += y;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x -= y;
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> Self {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= s;
        }
        out
    }

    pub fn trace(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn pow(&self, mut e: usize) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = {
                let piv = self[(r, c)].clone();
                Rat::one() / piv
            };
            for j in c..self.cols {
                let v = self[(r, j)].clone() * &inv;
                self[(r, j)] = v;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        let v = self[(i, j)].clone() - &f * &self[(r, j)];
                        self[(i, j)] = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Canonical nullspace basis (rows), derived from the RREF: one vector per
    /// free column, with a 1 in the free coordinate.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec = vec![Rat::zero(); self.cols];
            vec[free] = Rat::one();
            for (c, slot) in pivot_set.iter().enumerate() {
                if let Some(r) = slot {
                    vec[c] = -m[(*r, free)].clone();
                }
            }
            basis.push(vec);
        }
        basis
    }

    /// Solves `self * x = b` exactly. Returns `None` when inconsistent; free
    /// variables are set to zero.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len());
        let mut aug = RatMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the augmented column
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    /// Exact inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = RatMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().any(|&c| c >= n) {
            return None;
        }
        let mut out = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Monic characteristic polynomial by the Faddeev–LeVerrier recurrence;
    /// coefficient of x^k at index k.
    pub fn char_poly(&self) -> Vec<Rat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = Rat::one();
        let mut m = self.clone();
        for k in 1..=n {
            let c = -m.trace() / rat(k as i64);
            coeffs[n - k] = c.clone();
            if k < n {
                let mut shifted = m.clone();
                for i in 0..n {
                    shifted[(i, i)] += &c;
                }
                m = self.mul(&shifted);
            }
        }
        coeffs
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Strips every integer root (with multiplicity) off a monic polynomial with
/// rational coefficients. Returns `(roots, residual)` where the residual has
/// no integer roots; the residual is `[1]` exactly when all roots are integers.
pub fn integer_roots(poly: &[Rat]) -> (Vec<i64>, Vec<Rat>) {
    let mut p: Vec<Rat> = poly.to_vec();
    let mut roots = Vec::new();
    // trailing zero coefficients <=> roots at 0
    while p.len() > 1 && p[0].is_zero() {
        roots.push(0);
        p.remove(0);
    }
    'outer: while p.len() > 1 {
        // integer roots of a monic integer polynomial divide the constant term;
        // our coefficients are rational, so clear denominators first.
        let lcm = p.iter().fold(num_bigint::BigInt::from(1), |acc, c| {
            num_integer::lcm(acc, c.denom().clone())
        });
        let constant = (&p[0] * Rat::from_integer(lcm)).numer().clone();
        let mut candidates: Vec<i64> = Vec::new();
        let c_abs = constant.abs();
        // enumerate divisors of |constant| that fit in i64
        if let Ok(c_small) = i64::try_from(&c_abs) {
            let mut d = 1;
            while (d as i128) * (d as i128) <= c_small as i128 {
                if c_small % d == 0 {
                    for s in [d, c_small / d] {
                        candidates.push(s);
                        candidates.push(-s);
                    }
                }
                d += 1;
            }
        } else {
            // astronomically large constant term: no small integer roots to find
            break;
        }
        candidates.sort_unstable();
        candidates.dedup();
        for r in candidates {
            if eval_poly(&p, r).is_zero() {
                p = deflate(&p, r);
                roots.push(r);
                continue 'outer;
            }
        }
        break;
    }
    roots.sort_unstable();
    (roots, p)
}

fn eval_poly(p: &[Rat], x: i64) -> Rat {
    let xr = rat(x);
    let mut acc = Rat::zero();
    for c in p.iter().rev() {
        acc = acc * &xr + c;
    }
    acc
}

/// Synthetic division by (x - r); assumes r is a root.
fn deflate(p: &[Rat], r: i64) -> Vec<Rat> {
    let rr = rat(r);
    let n = p.len() - 1;
    let mut q = vec![Rat::zero(); n];
    let mut carry = p[n].clone();
    for k in (0..n).rev() {
        q[k] = carry.clone();
        carry = p[k].clone() + carry * &rr;
    }
    debug_assert!(carry.is_zero());
    q
}

/// Renders a polynomial in `x` for error messages.
pub fn format_poly(p: &[Rat]) -> String {
    let mut parts = Vec::new();
    for (k, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let coeff = format_rat(c);
        let part = match k {
            0 => coeff,
            1 if coeff == "1" => "x".into(),
            1 if coeff == "-1" => "-x".into(),
            1 => format!("{coeff}*x"),
            _ if coeff == "1" => format!("x^{k}"),
            _ if coeff == "-1" => format!("-x^{k}"),
            _ => format!("{coeff}*x^{k}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        if let Some(stripped) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(stripped);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}
