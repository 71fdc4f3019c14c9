//! Exact rational scalars: thin helpers over `num_rational::BigRational`.
//!
//! `BigRational` already maintains the invariants we need (always reduced,
//! denominator positive), so the crate uses it directly under the alias `Rat`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{LieError, Result};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat2(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back to separate conversion when the ratio overflows
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parses a rational literal `"p"` or `"p/q"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| LieError::Parse(format!("bad rational numerator '{s}'")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| LieError::Parse(format!("bad rational denominator '{s}'")))?;
    if d.is_zero() {
        return Err(LieError::Parse(format!("zero denominator in '{s}'")));
    }
    Ok(Rat::new(n, d))
}

/// Renders a rational as `p` or `p/q`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sign in {-1, 0, 1}.
pub fn rat_sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}
