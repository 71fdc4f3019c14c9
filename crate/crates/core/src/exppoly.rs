//! Exact arithmetic in the ring of exp-polynomials: finite rational
//! combinations of monomials `eps_i^p * exp(q*eps_i)` with integer `q`.
//! This is the closure needed for entries of adjoint transformation matrices,
//! e.g. `-(eps5^2 + 2*eps6)*exp(2*eps4)`.
//!
//! Canonical form: a sorted term map keyed by (powers, exp-powers), no zero
//! coefficients. Because `{eps^p e^{q eps}}` is linearly independent over Q,
//! syntactic equality of canonical forms is semantic equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{LieError, Result};
use crate::ratio::{format_rat, rat_to_f64, Rat};

/// One monomial key: `prod eps_v^p * prod exp(q*eps_v)`.
#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct ExpKey {
    /// (variable, exponent), sorted by variable, exponents > 0
    pub pows: Vec<(usize, u32)>,
    /// (variable, q), sorted by variable, q != 0
    pub exps: Vec<(usize, i64)>,
}

impl ExpKey {
    pub fn one() -> Self {
        Self::default()
    }

    fn total_degree(&self) -> u32 {
        self.pows.iter().map(|&(_, p)| p).sum()
    }

    fn total_exp(&self) -> i64 {
        self.exps.iter().map(|&(_, q)| q.abs()).sum()
    }

    fn mul(&self, other: &Self) -> Self {
        let mut pows: BTreeMap<usize, u32> = self.pows.iter().copied().collect();
        for &(v, p) in &other.pows {
            *pows.entry(v).or_insert(0) += p;
        }
        let mut exps: BTreeMap<usize, i64> = self.exps.iter().copied().collect();
        for &(v, q) in &other.exps {
            *exps.entry(v).or_insert(0) += q;
        }
        Self {
            pows: pows.into_iter().filter(|&(_, p)| p != 0).collect(),
            exps: exps.into_iter().filter(|&(_, q)| q != 0).collect(),
        }
    }
}

// Graded lexicographic: total eps-degree, then total |exp-power|, then the
// variable lists themselves. Deterministic printing depends on this order.
impl Ord for ExpKey {
    fn cmp(&self, other: &Self) -> Ordering {
        (
            self.total_degree(),
            self.total_exp(),
            &self.pows,
            &self.exps,
        )
            .cmp(&(
                other.total_degree(),
                other.total_exp(),
                &other.pows,
                &other.exps,
            ))
    }
}

impl PartialOrd for ExpKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Variable assignment for numeric evaluation.
#[derive(Clone, Debug, Default)]
pub struct Assignment {
    values: BTreeMap<usize, f64>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_slice(vals: &[f64]) -> Self {
        Self {
            values: vals.iter().copied().enumerate().collect(),
        }
    }

    pub fn set(&mut self, var: usize, value: f64) -> &mut Self {
        self.values.insert(var, value);
        self
    }

    pub fn get(&self, var: usize) -> Option<f64> {
        self.values.get(&var).copied()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ExpPoly {
    terms: BTreeMap<ExpKey, Rat>,
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(ExpKey::one(), c);
        }
        Self { terms }
    }

    /// The variable `eps_v`.
    pub fn var(v: usize) -> Self {
        let key = ExpKey {
            pows: vec![(v, 1)],
            exps: vec![],
        };
        Self {
            terms: [(key, Rat::one())].into(),
        }
    }

    /// The exponential `exp(q * eps_v)`.
    pub fn exp_var(v: usize, q: i64) -> Self {
        if q == 0 {
            return Self::one();
        }
        let key = ExpKey {
            pows: vec![],
            exps: vec![(v, q)],
        };
        Self {
            terms: [(key, Rat::one())].into(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&ExpKey::one())
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExpKey, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert(&mut self, key: ExpKey, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
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
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                out.insert(k1.mul(k2), c1 * c2);
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

    /// Multiplicative inverse, defined only for a single term with no
    /// polynomial part (a rational multiple of a pure exponential).
    pub fn inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (k, c) = self.terms.iter().next().unwrap();
        if !k.pows.is_empty() || c.is_zero() {
            return None;
        }
        let key = ExpKey {
            pows: vec![],
            exps: k.exps.iter().map(|&(v, q)| (v, -q)).collect(),
        };
        Some(Self {
            terms: [(key, Rat::one() / c)].into(),
        })
    }

    /// Substitutes `eps_v = 0`.
    pub fn subst_zero(&self, v: usize) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            if k.pows.iter().any(|&(pv, _)| pv == v) {
                continue; // eps_v^p -> 0
            }
            let key = ExpKey {
                pows: k.pows.clone(),
                exps: k.exps.iter().copied().filter(|&(ev, _)| ev != v).collect(),
            };
            out.insert(key, c.clone());
        }
        out
    }

    /// Substitutes `eps_v = eps_a + eps_b` (binomially for powers, as a product
    /// of exponentials for exp-powers). Used by the one-parameter group law.
    pub fn subst_sum(&self, v: usize, a: usize, b: usize) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            let mut term = Self::constant(c.clone());
            for &(pv, p) in &k.pows {
                if pv == v {
                    let sum = Self::var(a).add(&Self::var(b));
                    term = term.mul(&sum.pow(p));
                } else {
                    term = term.mul(&Self::var(pv).pow(p));
                }
            }
            for &(ev, q) in &k.exps {
                if ev == v {
                    term = term.mul(&Self::exp_var(a, q)).mul(&Self::exp_var(b, q));
                } else {
                    term = term.mul(&Self::exp_var(ev, q));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Renames variable `from` to `to`.
    pub fn rename_var(&self, from: usize, to: usize) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            let mut pows: BTreeMap<usize, u32> = BTreeMap::new();
            for &(v, p) in &k.pows {
                *pows.entry(if v == from { to } else { v }).or_insert(0) += p;
            }
            let mut exps: BTreeMap<usize, i64> = BTreeMap::new();
            for &(v, q) in &k.exps {
                *exps.entry(if v == from { to } else { v }).or_insert(0) += q;
            }
            out.insert(
                ExpKey {
                    pows: pows.into_iter().filter(|&(_, p)| p != 0).collect(),
                    exps: exps.into_iter().filter(|&(_, q)| q != 0).collect(),
                },
                c.clone(),
            );
        }
        out
    }

    pub fn variables(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .terms
            .keys()
            .flat_map(|k| {
                k.pows
                    .iter()
                    .map(|&(v, _)| v)
                    .chain(k.exps.iter().map(|&(v, _)| v))
            })
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// IEEE-double evaluation; the exact-rational constant term is added last
    /// to limit rounding. Errors on unbound variables.
    pub fn eval(&self, at: &Assignment) -> Result<f64> {
        let mut acc = 0.0;
        let mut constant = 0.0;
        for (k, c) in &self.terms {
            if k.pows.is_empty() && k.exps.is_empty() {
                constant = rat_to_f64(c);
                continue;
            }
            let mut t = rat_to_f64(c);
            for &(v, p) in &k.pows {
                let x = at.get(v).ok_or(LieError::UnboundVariable(v + 1))?;
                t *= x.powi(p as i32);
            }
            for &(v, q) in &k.exps {
                let x = at.get(v).ok_or(LieError::UnboundVariable(v + 1))?;
                t *= (q as f64 * x).exp();
            }
            acc += t;
        }
        Ok(acc + constant)
    }

    /// Renders with a custom variable namer.
    pub fn to_string_with(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        // descending canonical order: highest grading first, as in the paper
        for (idx, (k, c)) in self.terms.iter().rev().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for &(v, p) in &k.pows {
                factors.push(if p == 1 {
                    name(v)
                } else {
                    format!("{}^{}", name(v), p)
                });
            }
            for &(v, q) in &k.exps {
                factors.push(match q {
                    1 => format!("exp({})", name(v)),
                    -1 => format!("exp(-{})", name(v)),
                    _ => format!("exp({}*{})", q, name(v)),
                });
            }
            let abs_c = c.abs();
            let coeff = format_rat(&abs_c);
            let body = if factors.is_empty() {
                coeff
            } else if coeff == "1" {
                factors.join("*")
            } else {
                format!("{}*{}", coeff, factors.join("*"))
            };
            if idx == 0 {
                if c.is_negative() {
                    out.push('-');
                }
                out.push_str(&body);
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
                out.push_str(&body);
            }
        }
        out
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(&|v| format!("eps{}", v + 1)))
    }
}

/// Semantic equality of canonical forms.
pub fn ep_equal(p: &ExpPoly, q: &ExpPoly) -> bool {
    p == q
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn next_tok(&mut self) -> Result<Tok> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(Tok::End);
        }
        let c = self.src[self.pos];
        self.pos += 1;
        Ok(match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let start = self.pos - 1;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Tok::Num(crate::ratio::parse_rat(text)?)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos - 1;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(
                    std::str::from_utf8(&self.src[start..self.pos])
                        .unwrap()
                        .into(),
                )
            }
            other => {
                return Err(LieError::Parse(format!(
                    "unexpected character '{}'",
                    other as char
                )))
            }
        })
    }
}

/// Resolves identifier names to exp-poly variable indices.
pub type VarResolver<'r> = &'r dyn Fn(&str) -> Option<usize>;

/// Default resolver: `eps1`..`epsN` map to 0..N-1 and a bare `eps` maps to 0.
pub fn default_resolver(name: &str) -> Option<usize> {
    if name == "eps" {
        return Some(0);
    }
    name.strip_prefix("eps")
        .and_then(|d| d.parse::<usize>().ok())
        .and_then(|i| i.checked_sub(1))
}

struct Parser<'a, 'r> {
    lexer: Lexer<'a>,
    lookahead: Tok,
    resolve: VarResolver<'r>,
}

impl<'a, 'r> Parser<'a, 'r> {
    fn new(src: &'a str, resolve: VarResolver<'r>) -> Result<Self> {
        let mut lexer = Lexer::new(src);
        let lookahead = lexer.next_tok()?;
        Ok(Self {
            lexer,
            lookahead,
            resolve,
        })
    }

    fn bump(&mut self) -> Result<Tok> {
        let t = std::mem::replace(&mut self.lookahead, self.lexer.next_tok()?);
        Ok(t)
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.lookahead == t {
            self.bump()?;
            Ok(())
        } else {
            Err(LieError::Parse(format!(
                "expected {:?}, found {:?}",
                t, self.lookahead
            )))
        }
    }

    fn expr(&mut self) -> Result<ExpPoly> {
        let mut negate = false;
        while matches!(self.lookahead, Tok::Plus | Tok::Minus) {
            if matches!(self.bump()?, Tok::Minus) {
                negate = !negate;
            }
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.lookahead {
                Tok::Plus => {
                    self.bump()?;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Tok::Minus => {
                    self.bump()?;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ExpPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.lookahead {
                Tok::Star => {
                    self.bump()?;
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                Tok::Slash => {
                    self.bump()?;
                    let f = self.factor()?;
                    let inv = f.inverse().ok_or_else(|| {
                        LieError::Parse("division only by constants or pure exponentials".into())
                    })?;
                    acc = acc.mul(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ExpPoly> {
        let base = self.atom()?;
        if self.lookahead == Tok::Caret {
            self.bump()?;
            let mut neg = false;
            if self.lookahead == Tok::Minus {
                self.bump()?;
                neg = true;
            }
            let e = match self.bump()? {
                Tok::Num(r) if r.is_integer() && !r.is_negative() => i64::try_from(r.numer())
                    .map_err(|_| LieError::Parse("exponent too large".into()))?,
                t => return Err(LieError::Parse(format!("expected exponent, found {t:?}"))),
            };
            if neg {
                let inv = base.inverse().ok_or_else(|| {
                    LieError::Parse("negative power only of pure exponentials".into())
                })?;
                return Ok(inv.pow(e as u32));
            }
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExpPoly> {
        match self.bump()? {
            Tok::Num(r) => Ok(ExpPoly::constant(r)),
            Tok::Minus => {
                let a = self.atom()?;
                Ok(a.neg())
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) if name == "exp" => {
                self.expect(Tok::LParen)?;
                let arg = self.expr()?;
                self.expect(Tok::RParen)?;
                exp_of_linear(&arg)
            }
            Tok::Ident(name) => match (self.resolve)(&name) {
                Some(v) => Ok(ExpPoly::var(v)),
                None => Err(LieError::UnknownSymbol(name)),
            },
            t => Err(LieError::Parse(format!("unexpected token {t:?}"))),
        }
    }
}

/// `exp` of a linear integer combination of variables becomes a product of
/// per-variable exponential monomials.
fn exp_of_linear(arg: &ExpPoly) -> Result<ExpPoly> {
    let mut acc = ExpPoly::one();
    for (k, c) in arg.terms() {
        if !k.exps.is_empty() || k.pows.len() != 1 || k.pows[0].1 != 1 {
            return Err(LieError::Parse(
                "exp() argument must be a linear integer combination of variables".into(),
            ));
        }
        if !c.is_integer() {
            return Err(LieError::Parse(
                "exp() coefficients must be integers".into(),
            ));
        }
        let q = i64::try_from(c.numer())
            .map_err(|_| LieError::Parse("exp() coefficient too large".into()))?;
        acc = acc.mul(&ExpPoly::exp_var(k.pows[0].0, q));
    }
    Ok(acc)
}

/// Parses the canonical text grammar into an exp-polynomial.
pub fn parse(src: &str) -> Result<ExpPoly> {
    parse_with(src, &default_resolver)
}

pub fn parse_with(src: &str, resolve: VarResolver) -> Result<ExpPoly> {
    let mut p = Parser::new(src, resolve)?;
    let e = p.expr()?;
    if p.lookahead != Tok::End {
        return Err(LieError::Parse(format!(
            "trailing input at {:?}",
            p.lookahead
        )));
    }
    Ok(e)
}

/// Parses a linear combination of basis symbols `v1..vdim` with exp-polynomial
/// coefficients, e.g. `"v6 - 2*eps*v5 - eps^2*v3"`. Returns the coordinate
/// vector. Used for golden-table comparisons and CLI I/O.
pub fn parse_element(src: &str, dim: usize) -> Result<Vec<ExpPoly>> {
    parse_element_with(src, dim, &default_resolver)
}

pub fn parse_element_with(src: &str, dim: usize, resolve: VarResolver) -> Result<Vec<ExpPoly>> {
    // Treat v1..vdim as extra variables beyond any eps index, parse, then
    // split: each term must be linear in exactly one v_k (or constant -> error
    // unless zero).
    let base = 1_000_000; // v_k mapped to base + k - 1
    let wrapped = |name: &str| -> Option<usize> {
        if let Some(d) = name.strip_prefix('v') {
            if let Ok(k) = d.parse::<usize>() {
                if 1 <= k && k <= dim {
                    return Some(base + k - 1);
                }
            }
        }
        resolve(name)
    };
    let poly = parse_with(src, &wrapped)?;
    let mut coords = vec![ExpPoly::zero(); dim];
    if poly.is_zero() {
        return Ok(coords);
    }
    for (k, c) in poly.terms() {
        let vs: Vec<(usize, u32)> = k.pows.iter().copied().filter(|&(v, _)| v >= base).collect();
        if vs.len() != 1 || vs[0].1 != 1 || k.exps.iter().any(|&(v, _)| v >= base) {
            return Err(LieError::Parse(format!(
                "element expression is not linear in v1..v{dim}"
            )));
        }
        let coord = vs[0].0 - base;
        let key = ExpKey {
            pows: k.pows.iter().copied().filter(|&(v, _)| v < base).collect(),
            exps: k.exps.clone(),
        };
        let mono = ExpPoly {
            terms: [(key, c.clone())].into(),
        };
        coords[coord] = coords[coord].add(&mono);
    }
    Ok(coords)
}

/// Canonical rendering of an element with exp-polynomial coordinates.
pub fn format_element(coords: &[ExpPoly], basis_names: &[String]) -> String {
    let mut parts: Vec<(bool, String)> = Vec::new(); // (negative, body)
    for (i, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let name = &basis_names[i];
        // pull a purely negative coefficient out front
        let (neg, cc) = if c.terms.iter().all(|(_, r)| r.is_negative()) {
            (true, c.neg())
        } else {
            (false, c.clone())
        };
        let body = if cc.is_one() {
            name.clone()
        } else if cc.num_terms() == 1 {
            format!("{}*{}", cc, name)
        } else {
            format!("({})*{}", cc, name)
        };
        parts.push((neg, body));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (neg, body)) in parts.iter().enumerate() {
        if i == 0 {
            if *neg {
                out.push('-');
            }
        } else {
            out.push_str(if *neg { " - " } else { " + " });
        }
        out.push_str(body);
    }
    out
}
