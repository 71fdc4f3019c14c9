//! Sparse multivariate polynomials with rational coefficients over an indexed
//! variable space. Used for determined equations, invariant PDE coefficients
//! and semi-invariants; variables 0..n-1 are a_1..a_n, n..2n-1 are b_1..b_n and
//! 2n (when present) is lambda.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::ratio::{format_rat, rat_to_f64, Rat};

/// Monomial: sorted (variable, exponent>0) pairs, graded-lex ordered.
#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct Mono(pub Vec<(usize, u32)>);

impl Mono {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: usize) -> Self {
        Self(vec![(v, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, p)| p).sum()
    }

    /// Total degree over a variable range.
    pub fn degree_in(&self, range: std::ops::Range<usize>) -> u32 {
        self.0
            .iter()
            .filter(|&&(v, _)| range.contains(&v))
            .map(|&(_, p)| p)
            .sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut m: BTreeMap<usize, u32> = self.0.iter().copied().collect();
        for &(v, p) in &other.0 {
            *m.entry(v).or_insert(0) += p;
        }
        Self(m.into_iter().collect())
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.degree(), &self.0).cmp(&(other.degree(), &other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        Self { terms }
    }

    pub fn var(v: usize) -> Self {
        Self {
            terms: [(Mono::var(v), Rat::one())].into(),
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Mono, Rat)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.insert(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.0.is_empty())
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Mono) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    fn insert(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Rat) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self, v: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let Some(&(_, p)) = m.0.iter().find(|&&(mv, _)| mv == v) else {
                continue;
            };
            let mut reduced: Vec<(usize, u32)> =
                m.0.iter()
                    .copied()
                    .filter_map(|(mv, mp)| {
                        if mv == v {
                            (mp > 1).then_some((mv, mp - 1))
                        } else {
                            Some((mv, mp))
                        }
                    })
                    .collect();
            reduced.sort_unstable();
            out.insert(Mono(reduced), c * Rat::from_integer(BigInt::from(p)));
        }
        out
    }

    pub fn eval_rat(&self, vals: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, p) in &m.0 {
                for _ in 0..p {
                    t *= &vals[v];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, vals: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = rat_to_f64(c);
            for &(v, p) in &m.0 {
                t *= vals[v].powi(p as i32);
            }
            acc += t;
        }
        acc
    }

    pub fn variables(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Divides by the content (gcd of numerators over lcm of denominators) and
    /// normalizes the sign of the leading (highest monomial) coefficient to be
    /// positive. Canonical representative up to rational scaling.
    pub fn primitive_normalized(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let content = Rat::new(num_gcd, den_lcm);
        let mut out = self.scale(&(Rat::one() / content));
        let lead_negative = out
            .terms
            .iter()
            .next_back()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false);
        if lead_negative {
            out = out.neg();
        }
        out
    }

    /// Proportionality test: `self = c * other` for some rational c.
    pub fn proportional_to(&self, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        self.primitive_normalized() == other.primitive_normalized()
    }

    pub fn to_string_with(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for &(v, p) in &m.0 {
                factors.push(if p == 1 {
                    name(v)
                } else {
                    format!("{}^{}", name(v), p)
                });
            }
            let abs = c.abs();
            let lit = format_rat(&abs);
            let body = if factors.is_empty() {
                lit
            } else if lit == "1" {
                factors.join("*")
            } else {
                format!("{}*{}", lit, factors.join("*"))
            };
            if idx == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

// Display cannot know the algebra dimension, so it falls back to x<i>;
// callers with a/b/lambda context use `to_string_with(ab_lambda_names(n))`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(&|v| format!("x{}", v + 1)))
    }
}

/// Namer for the (a_1..a_n, b_1..b_n, lambda) variable convention.
pub fn ab_lambda_names(n: usize) -> impl Fn(usize) -> String {
    move |v: usize| {
        if v < n {
            format!("a{}", v + 1)
        } else if v < 2 * n {
            format!("b{}", v - n + 1)
        } else {
            "lambda".to_string()
        }
    }
}

/// Enumerates monomials over `vars` with total degree exactly `d`.
pub fn monomials_of_degree(vars: &[usize], d: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut current: Vec<(usize, u32)> = Vec::new();
    fn rec(
        vars: &[usize],
        idx: usize,
        remaining: u32,
        current: &mut Vec<(usize, u32)>,
        out: &mut Vec<Mono>,
    ) {
        if idx == vars.len() {
            if remaining == 0 {
                let mut m = current.clone();
                m.sort_unstable();
                out.push(Mono(m));
            }
            return;
        }
        if idx == vars.len() - 1 {
            if remaining > 0 {
                current.push((vars[idx], remaining));
                rec(vars, idx + 1, 0, current, out);
                current.pop();
            } else {
                rec(vars, idx + 1, 0, current, out);
            }
            return;
        }
        for p in 0..=remaining {
            if p > 0 {
                current.push((vars[idx], p));
            }
            rec(vars, idx + 1, remaining - p, current, out);
            if p > 0 {
                current.pop();
            }
        }
    }
    rec(vars, 0, d, &mut current, &mut out);
    out.sort();
    out
}
