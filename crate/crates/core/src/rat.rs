//! Small helpers around `BigRational`: construction, `p/q` text form, floats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_bigint(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// `p/q`, or `p` when the denominator is one.
pub fn fmt_rational(q: &Rational) -> String {
    q.to_string()
}

/// Parses `p/q` or `p` (optional sign on `p`). `offset` is the position of `s`
/// inside the caller's input and is only used for error reporting.
pub fn parse_rational(s: &str, offset: usize) -> Result<Rational> {
    let trimmed = s.trim();
    let lead = s.len() - s.trim_start().len();
    let err = |pos: usize, msg: &str| Error::Parse {
        pos: offset + lead + pos,
        msg: msg.to_string(),
    };
    if trimmed.is_empty() {
        return Err(err(0, "expected a rational number"));
    }
    let (num, den, den_pos) = match trimmed.split_once('/') {
        Some((n, d)) => (n, d, n.len() + 1),
        None => (trimmed, "1", 0),
    };
    let p: BigInt = num
        .trim()
        .parse()
        .map_err(|_| err(0, &format!("invalid integer `{}`", num.trim())))?;
    let q: BigInt = den
        .trim()
        .parse()
        .map_err(|_| err(den_pos, &format!("invalid integer `{}`", den.trim())))?;
    if q.is_zero() {
        return Err(err(den_pos, "zero denominator"));
    }
    Ok(Rational::new(p, q))
}

pub fn floor_int(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

/// `q mod m` in `[0, m)` for `m > 0`.
pub fn rem_euclid(q: &Rational, m: &Rational) -> Rational {
    let k = (q / m).floor();
    q - k * m
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Out of the f64 range; the sign and magnitude still matter to callers.
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Natural log of a positive big integer, accurate to a few ulp.
pub fn ln_bigint(n: &BigInt) -> f64 {
    assert!(n.is_positive(), "ln of non-positive integer");
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().expect("64-bit value").ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_rational(q: &Rational) -> f64 {
    ln_bigint(q.numer()) - ln_bigint(q.denom())
}

pub fn lcm_denominators<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}
