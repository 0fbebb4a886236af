//! Dedekind sums, the Rademacher symbol `Psi` on `SL2(Z)`, and axes of
//! hyperbolic elements.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rat::{self, fmt_rational, int, Rational};

/// An integer 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl IntMatrix2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        IntMatrix2 { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMatrix2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        IntMatrix2::from_i64(1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn neg(&self) -> Self {
        IntMatrix2::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }

    /// Adjugate; the inverse when `det = 1`.
    pub fn adjugate(&self) -> Self {
        IntMatrix2::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn mul(&self, o: &IntMatrix2) -> Self {
        IntMatrix2::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }

    /// `self^m` by repeated squaring.
    pub fn pow(&self, mut m: u64) -> Self {
        let mut base = self.clone();
        let mut acc = IntMatrix2::identity();
        while m > 0 {
            if m & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            m >>= 1;
        }
        acc
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().is_one()
    }

    /// Entries as f64, or `None` if any entry overflows.
    pub fn to_f64(&self) -> Option<[f64; 4]> {
        Some([
            self.a.to_f64()?,
            self.b.to_f64()?,
            self.c.to_f64()?,
            self.d.to_f64()?,
        ])
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{};{},{}", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for IntMatrix2 {
    type Err = Error;

    /// Parses `a,b;c,d`.
    fn from_str(s: &str) -> Result<Self> {
        let mut entries = Vec::with_capacity(4);
        let mut pos = 0;
        let rows: Vec<&str> = s.split(';').collect();
        if rows.len() != 2 {
            return Err(Error::Parse {
                pos: 0,
                msg: "expected two rows separated by `;`".into(),
            });
        }
        for row in rows {
            let cols: Vec<&str> = row.split(',').collect();
            if cols.len() != 2 {
                return Err(Error::Parse {
                    pos,
                    msg: "expected two entries separated by `,`".into(),
                });
            }
            for col in cols {
                let v: BigInt = col.trim().parse().map_err(|_| Error::Parse {
                    pos,
                    msg: format!("invalid integer `{}`", col.trim()),
                })?;
                entries.push(v);
                pos += col.len() + 1;
            }
        }
        let mut it = entries.into_iter();
        let mut next = || it.next().expect("four entries");
        Ok(IntMatrix2::new(next(), next(), next(), next()))
    }
}

/// `((x)) = x - floor(x) - 1/2` off the integers, zero on them.
pub fn sawtooth(x: &Rational) -> Rational {
    if rat::is_integer(x) {
        return Rational::zero();
    }
    x - x.floor() - Rational::new(BigInt::one(), BigInt::from(2))
}

/// `s(h, k) = sum_{mu mod k} ((mu/k)) ((mu*h/k))` by direct summation.
///
/// Each term is `(2mu - k)(2r - k) / (4k^2)` with `r = mu*h mod k` (zero when
/// `r = 0`), accumulated over the common denominator. Panics if `k = 0`.
pub fn dedekind_sum(h: i64, k: u64) -> Rational {
    assert!(k >= 1, "Dedekind sum needs k >= 1");
    let k = k as i128;
    let h = (h as i128).rem_euclid(k);
    let mut acc: i128 = 0;
    for mu in 1..k {
        let r = (mu * h) % k;
        if r != 0 {
            acc += (2 * mu - k) * (2 * r - k);
        }
    }
    Rational::new(BigInt::from(acc), BigInt::from(4 * k * k))
}

/// `s(h, k)` through the reciprocity law
/// `s(h,k) + s(k,h) = -1/4 + (h/k + k/h + 1/(hk))/12`, `O(log k)` steps.
pub fn dedekind_sum_fast(h: &BigInt, k: &BigInt) -> Rational {
    assert!(k.is_positive(), "Dedekind sum needs k >= 1");
    let g = h.gcd(k);
    let (mut h, mut k) = if g.is_zero() {
        (h.clone(), k.clone())
    } else {
        (h / &g, k / &g)
    };
    let mut sum = Rational::zero();
    let mut negate = false;
    let quarter = Rational::new(BigInt::from(-1), BigInt::from(4));
    loop {
        h = h.mod_floor(&k);
        if h.is_zero() {
            break;
        }
        let term = &quarter
            + Rational::new(
                &h * &h + &k * &k + BigInt::one(),
                BigInt::from(12) * &h * &k,
            );
        if negate {
            sum -= term;
        } else {
            sum += term;
        }
        negate = !negate;
        std::mem::swap(&mut h, &mut k);
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DedekindMethod {
    /// Literal summation; limited to `|c| < 2^40`.
    Direct,
    Reciprocity,
}

/// The individual terms of `Psi(gamma)` for `c != 0`, or the `b/d` value for `c = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiBreakdown {
    /// `(a + d)/c`, or `b/d` when `c = 0`.
    pub trace_term: Rational,
    /// `s(a, |c|)`.
    pub dedekind_sum: Rational,
    /// `-12 sgn(c) s(a, |c|)`.
    pub dedekind_term: Rational,
    /// `-3 sgn(c (a + d))`.
    pub sign_term: Rational,
    pub value: Rational,
}

fn sign(n: &BigInt) -> i64 {
    if n.is_positive() {
        1
    } else if n.is_negative() {
        -1
    } else {
        0
    }
}

pub fn psi_breakdown(gamma: &IntMatrix2, method: DedekindMethod) -> Result<PsiBreakdown> {
    if !gamma.is_unimodular() {
        return Err(Error::NotUnimodular(gamma.to_string()));
    }
    let IntMatrix2 { a, b, c, d } = gamma;
    if c.is_zero() {
        let v = Rational::new(b.clone(), d.clone());
        return Ok(PsiBreakdown {
            trace_term: v.clone(),
            dedekind_sum: Rational::zero(),
            dedekind_term: Rational::zero(),
            sign_term: Rational::zero(),
            value: v,
        });
    }
    let abs_c = c.abs();
    let s = match method {
        DedekindMethod::Reciprocity => dedekind_sum_fast(a, &abs_c),
        DedekindMethod::Direct => {
            let k = abs_c
                .to_u64()
                .filter(|&k| k < (1 << 40))
                .ok_or_else(|| Error::TooLargeForDirect(abs_c.to_string()))?;
            let h = a.mod_floor(&abs_c).to_i64().expect("reduced below k");
            dedekind_sum(h, k)
        }
    };
    let trace = a + d;
    let trace_term = Rational::new(trace.clone(), c.clone());
    let dedekind_term = int(-12 * sign(c)) * &s;
    let sign_term = int(-3 * sign(&(c * &trace)));
    let value = &trace_term + &dedekind_term + &sign_term;
    Ok(PsiBreakdown {
        trace_term,
        dedekind_sum: s,
        dedekind_term,
        sign_term,
        value,
    })
}

/// The Rademacher symbol, using the reciprocity Dedekind sum.
pub fn psi(gamma: &IntMatrix2) -> Result<BigInt> {
    psi_with(gamma, DedekindMethod::Reciprocity)
}

pub fn psi_with(gamma: &IntMatrix2, method: DedekindMethod) -> Result<BigInt> {
    let br = psi_breakdown(gamma, method)?;
    if !rat::is_integer(&br.value) {
        return Err(Error::Internal(format!(
            "Psi({gamma}) = {} is not an integer",
            fmt_rational(&br.value)
        )));
    }
    Ok(br.value.to_integer())
}

pub fn is_hyperbolic(gamma: &IntMatrix2) -> bool {
    gamma.trace().abs() > BigInt::from(2)
}

/// The semicircle `|2cz - (a - d)|^2 = (a + d)^2 - 4` fixed by a hyperbolic matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicCircle {
    pub center: Rational,
    pub radius_sq: Rational,
}

impl GeodesicCircle {
    pub fn radius_approx(&self) -> f64 {
        rat::to_f64(&self.radius_sq).sqrt()
    }

    /// The two real endpoints, smaller first.
    pub fn endpoints_approx(&self) -> (f64, f64) {
        let c = rat::to_f64(&self.center);
        let r = self.radius_approx();
        (c - r, c + r)
    }
}

pub fn geodesic(gamma: &IntMatrix2) -> Result<GeodesicCircle> {
    if !gamma.is_unimodular() {
        return Err(Error::NotUnimodular(gamma.to_string()));
    }
    if !is_hyperbolic(gamma) {
        return Err(Error::NotHyperbolic(gamma.to_string()));
    }
    if gamma.c.is_zero() {
        return Err(Error::ParabolicAxis(gamma.to_string()));
    }
    let two_c = BigInt::from(2) * &gamma.c;
    let trace = gamma.trace();
    Ok(GeodesicCircle {
        center: Rational::new(&gamma.a - &gamma.d, two_c.clone()),
        radius_sq: Rational::new(&trace * &trace - BigInt::from(4), &two_c * &two_c),
    })
}
