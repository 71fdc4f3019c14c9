//! A small expression language over named symbols: rational functions plus the
//! handful of functions (sqrt, ln, abs, cbrt, exp) appearing in closed-form
//! equivalence witnesses. Case constraints evaluate exactly over the
//! rationals; witnesses evaluate in f64.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{LieError, Result};
use crate::poly::Poly;
use crate::ratio::{format_rat, parse_rat, rat_to_f64, Rat};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rat),
    Sym(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Ln,
    Abs,
    Cbrt,
    Exp,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Ln => "ln",
            Func::Abs => "abs",
            Func::Cbrt => "cbrt",
            Func::Exp => "exp",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sqrt" => Func::Sqrt,
            "ln" => Func::Ln,
            "abs" => Func::Abs,
            "cbrt" => Func::Cbrt,
            "exp" => Func::Exp,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sqrt => x.sqrt(),
            Func::Ln => x.ln(),
            Func::Abs => x.abs(),
            Func::Cbrt => x.cbrt(),
            Func::Exp => x.exp(),
        }
    }
}

impl Expr {
    pub fn eval_f64(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<f64> {
        Ok(match self {
            Expr::Num(r) => rat_to_f64(r),
            Expr::Sym(s) => lookup(s).ok_or_else(|| LieError::UnknownSymbol(s.clone()))?,
            Expr::Add(a, b) => a.eval_f64(lookup)? + b.eval_f64(lookup)?,
            Expr::Sub(a, b) => a.eval_f64(lookup)? - b.eval_f64(lookup)?,
            Expr::Mul(a, b) => a.eval_f64(lookup)? * b.eval_f64(lookup)?,
            Expr::Div(a, b) => {
                let d = b.eval_f64(lookup)?;
                if d == 0.0 {
                    return Err(LieError::Eval("division by zero".into()));
                }
                a.eval_f64(lookup)? / d
            }
            Expr::Neg(a) => -a.eval_f64(lookup)?,
            Expr::Pow(a, e) => a.eval_f64(lookup)?.powi(*e),
            Expr::Call(f, a) => {
                let x = a.eval_f64(lookup)?;
                let y = f.apply(x);
                if !y.is_finite() {
                    return Err(LieError::Eval(format!("{}({x}) is not finite", f.name())));
                }
                y
            }
        })
    }

    /// Exact evaluation; errors on the transcendental functions and division
    /// by zero. `abs` is exact and allowed.
    pub fn eval_rat(&self, lookup: &dyn Fn(&str) -> Option<Rat>) -> Result<Rat> {
        Ok(match self {
            Expr::Num(r) => r.clone(),
            Expr::Sym(s) => lookup(s).ok_or_else(|| LieError::UnknownSymbol(s.clone()))?,
            Expr::Add(a, b) => a.eval_rat(lookup)? + b.eval_rat(lookup)?,
            Expr::Sub(a, b) => a.eval_rat(lookup)? - b.eval_rat(lookup)?,
            Expr::Mul(a, b) => a.eval_rat(lookup)? * b.eval_rat(lookup)?,
            Expr::Div(a, b) => {
                let d = b.eval_rat(lookup)?;
                if d.is_zero() {
                    return Err(LieError::Eval("division by zero".into()));
                }
                a.eval_rat(lookup)? / d
            }
            Expr::Neg(a) => -a.eval_rat(lookup)?,
            Expr::Pow(a, e) => {
                let base = a.eval_rat(lookup)?;
                if *e >= 0 {
                    num_traits::pow::pow(base, *e as usize)
                } else {
                    if base.is_zero() {
                        return Err(LieError::Eval("zero to a negative power".into()));
                    }
                    num_traits::pow::pow(base.recip(), (-e) as usize)
                }
            }
            Expr::Call(Func::Abs, a) => a.eval_rat(lookup)?.abs(),
            Expr::Call(f, _) => {
                return Err(LieError::Eval(format!(
                    "{}() has no exact rational value",
                    f.name()
                )))
            }
        })
    }

    /// Conversion to a polynomial when the expression is polynomial over the
    /// resolved variables (no division by non-constants, no functions).
    pub fn to_poly(&self, resolve: &dyn Fn(&str) -> Option<usize>) -> Result<Poly> {
        Ok(match self {
            Expr::Num(r) => Poly::constant(r.clone()),
            Expr::Sym(s) => {
                let v = resolve(s).ok_or_else(|| LieError::UnknownSymbol(s.clone()))?;
                Poly::var(v)
            }
            Expr::Add(a, b) => a.to_poly(resolve)?.add(&b.to_poly(resolve)?),
            Expr::Sub(a, b) => a.to_poly(resolve)?.sub(&b.to_poly(resolve)?),
            Expr::Mul(a, b) => a.to_poly(resolve)?.mul(&b.to_poly(resolve)?),
            Expr::Div(a, b) => {
                let den = b.to_poly(resolve)?;
                if !den.is_constant() || den.is_zero() {
                    return Err(LieError::Parse(
                        "division by a non-constant is not polynomial".into(),
                    ));
                }
                let c = den.coeff(&crate::poly::Mono::one());
                a.to_poly(resolve)?
                    .scale(&(Rat::from_integer(1.into()) / c))
            }
            Expr::Neg(a) => a.to_poly(resolve)?.neg(),
            Expr::Pow(a, e) => {
                if *e < 0 {
                    return Err(LieError::Parse("negative power is not polynomial".into()));
                }
                a.to_poly(resolve)?.pow(*e as u32)
            }
            Expr::Call(f, _) => {
                return Err(LieError::Parse(format!("{}() is not polynomial", f.name())))
            }
        })
    }

    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_symbols(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => out.push(s.clone()),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.collect_symbols(out),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) => write!(f, "{}", format_rat(r)),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/{b}"),
            Expr::Neg(a) => write!(f, "-{a}"),
            Expr::Pow(a, e) => write!(f, "{a}^{e}"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

// --- parser ----------------------------------------------------------------

struct P<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> P<'a> {
    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = if self.eat(b'-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat(b'-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.factor()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(LieError::Parse("expected integer exponent".into()));
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let e: i32 = digits
                .parse()
                .map_err(|_| LieError::Parse("exponent overflow".into()))?;
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(LieError::Parse("expected ')'".into()));
                }
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.atom()?)))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let lit = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Ok(Expr::Num(parse_rat(lit)?))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .to_string();
                if let Some(func) = Func::from_name(&name) {
                    if self.eat(b'(') {
                        let arg = self.expr()?;
                        if !self.eat(b')') {
                            return Err(LieError::Parse("expected ')'".into()));
                        }
                        return Ok(Expr::Call(func, Box::new(arg)));
                    }
                }
                Ok(Expr::Sym(name))
            }
            other => Err(LieError::Parse(format!("unexpected input {other:?}"))),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = P {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.ws();
    if p.pos != p.src.len() {
        return Err(LieError::Parse(format!(
            "trailing input at byte {} of '{src}'",
            p.pos
        )));
    }
    Ok(e)
}

/// Symbol table convenience for (a_1..a_n, b_1..b_n) coordinate lookups.
pub fn ab_symbol_index(name: &str, n: usize) -> Option<usize> {
    let (prefix, offset) = if let Some(rest) = name.strip_prefix('a') {
        (rest, 0)
    } else if let Some(rest) = name.strip_prefix('b') {
        (rest, n)
    } else if name == "lambda" {
        return Some(2 * n);
    } else {
        return None;
    };
    let i: usize = prefix.parse().ok()?;
    (1 <= i && i <= n).then(|| offset + i - 1)
}

/// f64 lookup over concatenated (a, b) coordinates.
pub fn ab_lookup_f64<'v>(vals: &'v [f64], n: usize) -> impl Fn(&str) -> Option<f64> + 'v {
    move |name: &str| ab_symbol_index(name, n).and_then(|i| vals.get(i).copied())
}

/// Exact lookup over concatenated (a, b) coordinates.
pub fn ab_lookup_rat<'v>(vals: &'v BTreeMap<String, Rat>) -> impl Fn(&str) -> Option<Rat> + 'v {
    move |name: &str| vals.get(name).cloned()
}
