//! Exact arithmetic in a real quadratic field `Q(sqrt D)`.
//!
//! Elements are stored as `x + y*sqrt(D)` with rational coordinates. Lattices
//! (in particular fractional ideals) are kept in the canonical form
//! `Z(a*sqrt(D) + b) + Z*d` with `a, d > 0` and `0 <= b < d`; every full-rank
//! lattice in the field has exactly one such triple.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{self, fmt_rational, int, parse_rational, rat, Rational};

/// Default cap on the exponent scanned by [`epsilon_kappa`].
pub const DEFAULT_UNIT_SEARCH_CAP: u64 = 1_000_000;

fn is_squarefree(n: i64) -> bool {
    if n <= 0 {
        return false;
    }
    let mut p = 2i64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// True for discriminants of real quadratic fields.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d <= 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

/// Fundamental discriminants in `2..=max`, ascending.
pub fn fundamental_discriminants(max: i64) -> Vec<i64> {
    (2..=max)
        .filter(|&d| is_fundamental_discriminant(d))
        .collect()
}

/// An element `x + y*sqrt(D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadNum {
    pub x: Rational,
    pub y: Rational,
}

impl QuadNum {
    pub fn new(x: Rational, y: Rational) -> Self {
        QuadNum { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        QuadNum::new(int(x), int(y))
    }

    pub fn rational(x: Rational) -> Self {
        QuadNum::new(x, Rational::zero())
    }

    pub fn zero() -> Self {
        QuadNum::rational(Rational::zero())
    }

    pub fn one() -> Self {
        QuadNum::rational(Rational::one())
    }

    /// `sqrt(D)` itself.
    pub fn sqrt_d() -> Self {
        QuadNum::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadNum::new(self.x.clone(), -&self.y)
    }

    pub fn trace(&self) -> Rational {
        &self.x + &self.x
    }

    pub fn scale(&self, q: &Rational) -> Self {
        QuadNum::new(&self.x * q, &self.y * q)
    }
}

impl Add for &QuadNum {
    type Output = QuadNum;
    fn add(self, rhs: &QuadNum) -> QuadNum {
        QuadNum::new(&self.x + &rhs.x, &self.y + &rhs.y)
    }
}

impl Sub for &QuadNum {
    type Output = QuadNum;
    fn sub(self, rhs: &QuadNum) -> QuadNum {
        QuadNum::new(&self.x - &rhs.x, &self.y - &rhs.y)
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum::new(-&self.x, -&self.y)
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        -&self
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_negative() {
            write!(
                f,
                "{}-{}*sqrtD",
                fmt_rational(&self.x),
                fmt_rational(&-&self.y)
            )
        } else {
            write!(
                f,
                "{}+{}*sqrtD",
                fmt_rational(&self.x),
                fmt_rational(&self.y)
            )
        }
    }
}

impl FromStr for QuadNum {
    type Err = Error;

    /// Accepts `x+y*sqrtD`, `x-y*sqrtD`, `y*sqrtD` or a plain rational `x`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let Some(body) = t.strip_suffix("*sqrtD") else {
            return Ok(QuadNum::rational(parse_rational(t, 0)?));
        };
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| matches!(bytes[i], b'+' | b'-') && bytes[i - 1].is_ascii_digit());
        match split {
            None => Ok(QuadNum::new(Rational::zero(), parse_rational(body, 0)?)),
            Some(i) => {
                let x = parse_rational(&body[..i], 0)?;
                let y_text = body[i..].strip_prefix('+').unwrap_or(&body[i..]);
                let y_off = if body.as_bytes()[i] == b'+' { i + 1 } else { i };
                let y = parse_rational(y_text, y_off)?;
                Ok(QuadNum::new(x, y))
            }
        }
    }
}

/// The canonical lattice `Z(a*sqrt(D) + b) + Z*d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadLattice {
    a: Rational,
    b: Rational,
    d: Rational,
}

impl QuadLattice {
    /// Builds the triple, reducing `b` modulo `d`.
    pub fn new(a: Rational, b: Rational, d: Rational) -> Result<Self> {
        if !a.is_positive() || !d.is_positive() {
            return Err(Error::NotALattice(format!(
                "({}, {}, {})",
                fmt_rational(&a),
                fmt_rational(&b),
                fmt_rational(&d)
            )));
        }
        let b = rat::rem_euclid(&b, &d);
        Ok(QuadLattice { a, b, d })
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn d(&self) -> &Rational {
        &self.d
    }

    /// `[a*sqrt(D) + b, d]`.
    pub fn basis(&self) -> [QuadNum; 2] {
        [
            QuadNum::new(self.b.clone(), self.a.clone()),
            QuadNum::rational(self.d.clone()),
        ]
    }

    /// Hermite reduction of the Z-module spanned by `gens`.
    pub fn from_generators(gens: &[QuadNum]) -> Result<Self> {
        let den = rat::lcm_denominators(gens.iter().flat_map(|g| [&g.x, &g.y]));
        let den_q = rat::from_bigint(den.clone());
        let rows = gens.iter().map(|g| {
            let y = (&g.y * &den_q).to_integer();
            let x = (&g.x * &den_q).to_integer();
            (y, x)
        });

        let mut pivot: Option<(BigInt, BigInt)> = None;
        let mut rational_gcd = BigInt::zero();
        for (y, x) in rows {
            if y.is_zero() {
                rational_gcd = rational_gcd.gcd(&x);
                continue;
            }
            pivot = Some(match pivot.take() {
                None => (y, x),
                Some((py, px)) => {
                    let e = py.extended_gcd(&y);
                    let g = e.gcd;
                    // (y/g)*pivot - (py/g)*row has a zero sqrt(D)-coordinate.
                    let leftover = (&y / &g) * &px - (&py / &g) * &x;
                    rational_gcd = rational_gcd.gcd(&leftover);
                    let nx = &e.x * &px + &e.y * &x;
                    (g, nx)
                }
            });
        }
        let (mut py, mut px) = pivot.ok_or(Error::RankDeficient)?;
        if rational_gcd.is_zero() {
            return Err(Error::RankDeficient);
        }
        if py.is_negative() {
            py = -py;
            px = -px;
        }
        QuadLattice::new(
            Rational::new(py, den.clone()),
            Rational::new(px, den.clone()),
            Rational::new(rational_gcd.abs(), den),
        )
    }

    pub fn contains(&self, v: &QuadNum) -> bool {
        let m = &v.y / &self.a;
        if !rat::is_integer(&m) {
            return false;
        }
        let n = (&v.x - &m * &self.b) / &self.d;
        rat::is_integer(&n)
    }

    pub fn contains_lattice(&self, other: &QuadLattice) -> bool {
        other.basis().iter().all(|v| self.contains(v))
    }

    /// Integer coordinates `(m, n)` of `v = m*(a*sqrt(D) + b) + n*d`, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &QuadNum) -> Option<(BigInt, BigInt)> {
        let m = &v.y / &self.a;
        if !rat::is_integer(&m) {
            return None;
        }
        let n = (&v.x - &m * &self.b) / &self.d;
        if !rat::is_integer(&n) {
            return None;
        }
        Some((m.to_integer(), n.to_integer()))
    }

    /// Basis of the dual lattice for the coordinate dot product `x1*x2 + y1*y2`.
    fn euclidean_dual(&self) -> [QuadNum; 2] {
        let [v1, v2] = self.basis();
        let det = &v1.x * &v2.y - &v1.y * &v2.x;
        [
            QuadNum::new(&v2.y / &det, -&v2.x / &det),
            QuadNum::new(-&v1.y / &det, &v1.x / &det),
        ]
    }

    fn from_dual_generators(gens: &[QuadNum]) -> Result<Self> {
        let sum = QuadLattice::from_generators(gens)?;
        QuadLattice::from_generators(&sum.euclidean_dual())
    }

    /// `self ∩ other`, computed as the dual of the sum of the duals.
    pub fn intersect(&self, other: &QuadLattice) -> QuadLattice {
        let mut gens = self.euclidean_dual().to_vec();
        gens.extend(other.euclidean_dual());
        QuadLattice::from_dual_generators(&gens)
            .expect("intersection of full-rank lattices is full rank")
    }

    /// `self + other`.
    pub fn sum(&self, other: &QuadLattice) -> QuadLattice {
        let mut gens = self.basis().to_vec();
        gens.extend(other.basis());
        QuadLattice::from_generators(&gens).expect("sum of full-rank lattices is full rank")
    }

    /// `mu * self`.
    pub fn scale(&self, ctx: &FieldContext, mu: &QuadNum) -> Result<QuadLattice> {
        if mu.is_zero() {
            return Err(Error::ZeroScalar);
        }
        let gens: Vec<QuadNum> = self.basis().iter().map(|v| ctx.mul(v, mu)).collect();
        QuadLattice::from_generators(&gens)
    }

    pub fn scale_rational(&self, q: &Rational) -> Result<QuadLattice> {
        if q.is_zero() {
            return Err(Error::ZeroScalar);
        }
        let gens: Vec<QuadNum> = self.basis().iter().map(|v| v.scale(q)).collect();
        QuadLattice::from_generators(&gens)
    }

    /// The Z-module generated by all pairwise products.
    pub fn mul(&self, ctx: &FieldContext, other: &QuadLattice) -> QuadLattice {
        let mut gens = Vec::with_capacity(4);
        for u in self.basis().iter() {
            for v in other.basis().iter() {
                gens.push(ctx.mul(u, v));
            }
        }
        QuadLattice::from_generators(&gens).expect("product of full-rank lattices is full rank")
    }

    /// Image under Galois conjugation.
    pub fn conj(&self) -> QuadLattice {
        let gens: Vec<QuadNum> = self.basis().iter().map(QuadNum::conj).collect();
        QuadLattice::from_generators(&gens).expect("conjugate lattice is full rank")
    }

    /// Covolume relative to the ring of integers (whose triple has `a*d = 1/2`).
    pub fn ideal_norm(&self) -> Rational {
        int(2) * &self.a * &self.d
    }

    pub fn is_integral(&self, ctx: &FieldContext) -> bool {
        ctx.ring().contains_lattice(self)
    }

    /// Stable under multiplication by the ring of integers.
    pub fn is_ideal(&self, ctx: &FieldContext) -> bool {
        let omega = ctx.omega();
        self.basis()
            .iter()
            .all(|v| self.contains(&ctx.mul(v, &omega)))
    }

    /// Inverse fractional ideal, `conj(I) / Nm(I)`.
    pub fn inverse_ideal(&self, ctx: &FieldContext) -> Result<QuadLattice> {
        if !self.is_ideal(ctx) {
            return Err(Error::NotAnIdeal(self.to_string()));
        }
        self.conj()
            .scale_rational(&(Rational::one() / self.ideal_norm()))
    }

    /// Norm read off from `I * conj(I) = Nm(I) * O_F`; independent of [`Self::ideal_norm`].
    pub fn ideal_norm_via_conjugate(&self, ctx: &FieldContext) -> Result<Rational> {
        if !self.is_ideal(ctx) {
            return Err(Error::NotAnIdeal(self.to_string()));
        }
        let prod = self.mul(ctx, &self.conj());
        // The rational part of n*O_F is n*Z.
        let n = prod.d.clone();
        let expect = ctx.ring().scale_rational(&n)?;
        if prod != expect {
            return Err(Error::Internal(format!(
                "I*conj(I) = {prod} is not principal rational"
            )));
        }
        Ok(n)
    }
}

impl fmt::Display for QuadLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{}",
            fmt_rational(&self.a),
            fmt_rational(&self.b),
            fmt_rational(&self.d)
        )
    }
}

/// A fixed real quadratic field.
#[derive(Clone, Debug)]
pub struct FieldContext {
    disc: i64,
    disc_q: Rational,
    sqrt_approx: f64,
    ring: QuadLattice,
}

impl FieldContext {
    pub fn new(disc: i64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return Err(Error::NotFundamental(disc));
        }
        let b = if disc % 2 == 0 { rat(0, 1) } else { rat(1, 2) };
        let ring = QuadLattice::new(rat(1, 2), b, int(1))?;
        Ok(FieldContext {
            disc,
            disc_q: int(disc),
            sqrt_approx: (disc as f64).sqrt(),
            ring,
        })
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn sqrt_approx(&self) -> f64 {
        self.sqrt_approx
    }

    pub fn ring(&self) -> &QuadLattice {
        &self.ring
    }

    /// `sqrt(D)/2 + b`, the first basis vector of the ring.
    pub fn omega(&self) -> QuadNum {
        self.ring.basis()[0].clone()
    }

    /// The different `sqrt(D) * O_F`.
    pub fn different(&self) -> QuadLattice {
        self.ring
            .scale(self, &QuadNum::sqrt_d())
            .expect("sqrt(D) is nonzero")
    }

    pub fn mul(&self, u: &QuadNum, v: &QuadNum) -> QuadNum {
        QuadNum::new(
            &u.x * &v.x + &self.disc_q * &u.y * &v.y,
            &u.x * &v.y + &u.y * &v.x,
        )
    }

    pub fn norm(&self, u: &QuadNum) -> Rational {
        &u.x * &u.x - &self.disc_q * &u.y * &u.y
    }

    pub fn is_totally_positive(&self, u: &QuadNum) -> bool {
        u.x.is_positive() && self.norm(u).is_positive()
    }

    pub fn inverse(&self, u: &QuadNum) -> Result<QuadNum> {
        if u.is_zero() {
            return Err(Error::ZeroScalar);
        }
        let n = self.norm(u);
        Ok(QuadNum::new(&u.x / &n, -&u.y / &n))
    }

    pub fn pow(&self, u: &QuadNum, mut k: u64) -> QuadNum {
        let mut base = u.clone();
        let mut acc = QuadNum::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Both real embeddings, `sqrt(D)` taken positive. For logging and float bounds only.
    pub fn embed(&self, u: &QuadNum) -> (f64, f64) {
        let x = rat::to_f64(&u.x);
        let y = rat::to_f64(&u.y) * self.sqrt_approx;
        (x + y, x - y)
    }

    pub fn is_integral(&self, u: &QuadNum) -> bool {
        self.ring.contains(u)
    }
}

/// A unit of the ring of integers together with its bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitRecord {
    pub value: QuadNum,
    pub norm_sign: i8,
    pub totally_positive: bool,
    /// Exponent with respect to the fundamental unit.
    pub power_index: u64,
}

impl UnitRecord {
    fn from_value(ctx: &FieldContext, value: QuadNum, power_index: u64) -> Result<Self> {
        let n = ctx.norm(&value);
        let norm_sign = if n == int(1) {
            1
        } else if n == int(-1) {
            -1
        } else {
            return Err(Error::Internal(format!("{value} has norm {n}, not a unit")));
        };
        Ok(UnitRecord {
            totally_positive: ctx.is_totally_positive(&value),
            value,
            norm_sign,
            power_index,
        })
    }

    /// `ln(value)` for a unit `> 1`, with an absolute error bound.
    ///
    /// Uses `x = cosh(ln u)` (norm +1) or `x = sinh(ln u)` (norm -1), so only
    /// the rational coordinate `x` enters the float computation.
    pub fn ln(&self) -> (f64, f64) {
        let x = &self.value.x;
        let xf = rat::to_f64(x);
        if xf.is_finite() && xf < 1e8 {
            let v = if self.norm_sign > 0 {
                xf.acosh()
            } else {
                xf.asinh()
            };
            return (v, 8.0 * f64::EPSILON * v.max(1.0));
        }
        // acosh(x), asinh(x) = ln(2x) + O(1/x^2)
        let v = rat::ln_rational(&(x * int(2)));
        (v, 8.0 * f64::EPSILON * v + 1.0 / (xf * xf).min(f64::MAX))
    }
}

/// Smallest unit `> 1` of the ring of integers.
///
/// Runs the continued fraction of `omega` with the integer recurrence
/// `P' = aQ - P`, `Q' = (D - P'^2)/Q` until a complete quotient repeats; the
/// product of the complete quotients over one period is the fundamental unit.
pub fn fundamental_unit(ctx: &FieldContext) -> UnitRecord {
    let disc = ctx.disc() as i128;
    let root = disc.sqrt();
    let mut p: i128 = disc.rem_euclid(2);
    let mut q: i128 = 2;
    let mut seen: HashMap<(i128, i128), usize> = HashMap::new();
    let mut quotients: Vec<QuadNum> = Vec::new();
    loop {
        if let Some(&start) = seen.get(&(p, q)) {
            // quotients[start] equals the current complete quotient, so one
            // full period is quotients[start..].
            let unit = quotients[start..]
                .iter()
                .fold(QuadNum::one(), |acc, t| ctx.mul(&acc, t));
            let rec = UnitRecord::from_value(ctx, unit, 1).expect("period product is a unit");
            debug_assert!(ctx.is_integral(&rec.value));
            return rec;
        }
        seen.insert((p, q), quotients.len());
        quotients.push(QuadNum::new(
            Rational::new(BigInt::from(p), BigInt::from(q)),
            Rational::new(BigInt::one(), BigInt::from(q)),
        ));
        let a = (p + root).div_euclid(q);
        let np = a * q - p;
        let nq = (disc - np * np) / q;
        p = np;
        q = nq;
    }
}

/// The totally positive generator: the fundamental unit if it has norm +1, else its square.
pub fn totally_positive_fundamental_unit(ctx: &FieldContext) -> UnitRecord {
    let u = fundamental_unit(ctx);
    if u.norm_sign > 0 {
        u
    } else {
        UnitRecord::from_value(ctx, ctx.mul(&u.value, &u.value), 2).expect("square of a unit")
    }
}

/// Smallest totally positive unit `eps > 1` with `eps - 1 ∈ kappa * different`.
pub fn epsilon_kappa(
    ctx: &FieldContext,
    ideal: &QuadLattice,
    kappa: u64,
    cap: u64,
) -> Result<UnitRecord> {
    if !ideal.is_integral(ctx) {
        return Err(Error::NotIntegralIdeal(ideal.to_string()));
    }
    let target = ctx
        .different()
        .scale_rational(&rat::from_bigint(BigInt::from(kappa)))?;
    let base = totally_positive_fundamental_unit(ctx);
    let mut eps = base.value.clone();
    for k in 1..=cap {
        if target.contains(&(&eps - &QuadNum::one())) {
            return UnitRecord::from_value(ctx, eps, k * base.power_index);
        }
        eps = ctx.mul(&eps, &base.value);
    }
    Err(Error::SearchCap { cap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(a: Rational, b: Rational, d: Rational) -> QuadLattice {
        QuadLattice::new(a, b, d).unwrap()
    }

    fn q(s: &str) -> QuadNum {
        s.parse().unwrap()
    }

    #[test]
    fn context_rings() {
        let c12 = FieldContext::new(12).unwrap();
        assert_eq!(c12.ring(), &lat(rat(1, 2), int(0), int(1)));
        let c5 = FieldContext::new(5).unwrap();
        assert_eq!(c5.ring(), &lat(rat(1, 2), rat(1, 2), int(1)));
        assert_eq!(FieldContext::new(9).unwrap_err(), Error::NotFundamental(9));
        for bad in [1, 0, -3, 3, 18, 16, 20] {
            assert!(FieldContext::new(bad).is_err(), "{bad}");
        }
        assert_eq!(
            fundamental_discriminants(30),
            vec![5, 8, 12, 13, 17, 21, 24, 28, 29]
        );
    }

    #[test]
    fn element_ops() {
        let c12 = FieldContext::new(12).unwrap();
        assert_eq!(c12.norm(&QuadNum::from_ints(7, 2)), int(1));
        assert_eq!(QuadNum::from_ints(5, 0).conj(), QuadNum::from_ints(5, 0));
        let c8 = FieldContext::new(8).unwrap();
        assert!(!c8.is_totally_positive(&QuadNum::from_ints(1, 1)));
        assert!(c8.is_totally_positive(&QuadNum::from_ints(3, 1)));
        let u = q("7/2+3/2*sqrtD");
        let c5 = FieldContext::new(5).unwrap();
        assert_eq!(c5.mul(&u, &c5.inverse(&u).unwrap()), QuadNum::one());
    }

    #[test]
    fn quadnum_text() {
        for s in [
            "7+2*sqrtD",
            "7/2+3/2*sqrtD",
            "1/2-1/2*sqrtD",
            "-3-2*sqrtD",
            "0+0*sqrtD",
        ] {
            assert_eq!(q(s).to_string(), s);
        }
        assert_eq!(q("5"), QuadNum::from_ints(5, 0));
        assert_eq!(q("-2*sqrtD"), QuadNum::from_ints(0, -2));
        assert_eq!(q("3+-2*sqrtD"), QuadNum::from_ints(3, -2));
        assert!("1/0+2*sqrtD".parse::<QuadNum>().is_err());
    }

    #[test]
    fn generators() {
        let c12 = FieldContext::new(12).unwrap();
        let _ = c12;
        let l =
            QuadLattice::from_generators(&[QuadNum::sqrt_d(), QuadNum::from_ints(6, 0)]).unwrap();
        assert_eq!(l, lat(int(1), int(0), int(6)));
        let l = QuadLattice::from_generators(&[QuadNum::one(), q("1/2+1/2*sqrtD")]).unwrap();
        assert_eq!(l, lat(rat(1, 2), rat(1, 2), int(1)));
        // 2, 2*sqrt(3) = sqrt(12), 6
        let l = QuadLattice::from_generators(&[
            QuadNum::from_ints(2, 0),
            QuadNum::from_ints(0, 1),
            QuadNum::from_ints(6, 0),
        ])
        .unwrap();
        assert_eq!(l, lat(int(1), int(0), int(2)));
        assert_eq!(
            QuadLattice::from_generators(&[QuadNum::from_ints(2, 0), QuadNum::from_ints(4, 0)]),
            Err(Error::RankDeficient)
        );
        assert_eq!(
            QuadLattice::from_generators(&[QuadNum::from_ints(2, 1), QuadNum::from_ints(4, 2)]),
            Err(Error::RankDeficient)
        );
    }

    #[test]
    fn intersections() {
        let c12 = FieldContext::new(12).unwrap();
        let diff = c12.different();
        assert_eq!(diff, lat(int(1), int(0), int(6)));
        let two_ring = c12.ring().scale_rational(&int(2)).unwrap();
        assert_eq!(diff.intersect(&two_ring), diff);
        assert_eq!(diff.intersect(&diff), diff);

        let c5 = FieldContext::new(5).unwrap();
        let two_inv_diff = c5
            .different()
            .inverse_ideal(&c5)
            .unwrap()
            .scale_rational(&int(2))
            .unwrap();
        assert_eq!(
            c5.ring().intersect(&two_inv_diff),
            lat(int(1), int(1), int(2))
        );
    }

    #[test]
    fn scaling_and_inverse() {
        let c12 = FieldContext::new(12).unwrap();
        let diff = c12.different();
        assert_eq!(c12.ring().scale(&c12, &QuadNum::sqrt_d()).unwrap(), diff);
        assert_eq!(diff.scale(&c12, &QuadNum::one()).unwrap(), diff);
        let inv = diff.inverse_ideal(&c12).unwrap();
        assert_eq!(inv.mul(&c12, &diff), *c12.ring());
        assert_eq!(
            diff.scale(&c12, &QuadNum::zero()).unwrap_err(),
            Error::ZeroScalar
        );
        assert_eq!(diff.ideal_norm(), int(12));
        assert_eq!(diff.ideal_norm_via_conjugate(&c12).unwrap(), int(12));
    }

    #[test]
    fn membership() {
        let c12 = FieldContext::new(12).unwrap();
        assert!(c12.different().contains(&QuadNum::from_ints(6, 2)));
        assert!(c12.different().contains(&QuadNum::zero()));
        let c5 = FieldContext::new(5).unwrap();
        assert!(!c5.different().contains(&q("1/2+1/2*sqrtD")));
        assert!(c5.different().contains(&q("5/2+1/2*sqrtD")));
    }

    #[test]
    fn fundamental_units() {
        let c12 = FieldContext::new(12).unwrap();
        let u = fundamental_unit(&c12);
        assert_eq!(u.value, q("2+1/2*sqrtD"));
        assert_eq!(u.norm_sign, 1);
        let c5 = FieldContext::new(5).unwrap();
        let u = fundamental_unit(&c5);
        assert_eq!(u.value, q("1/2+1/2*sqrtD"));
        assert_eq!(u.norm_sign, -1);
        let c8 = FieldContext::new(8).unwrap();
        let u = fundamental_unit(&c8);
        assert_eq!(u.value, q("1+1/2*sqrtD"));
        assert_eq!(u.norm_sign, -1);
    }

    #[test]
    fn epsilon_kappa_examples() {
        let c12 = FieldContext::new(12).unwrap();
        let e = epsilon_kappa(&c12, &c12.different(), 1, DEFAULT_UNIT_SEARCH_CAP).unwrap();
        assert_eq!(e.value, QuadNum::from_ints(7, 2));
        assert_eq!(e.power_index, 2);
        let c5 = FieldContext::new(5).unwrap();
        let e = epsilon_kappa(&c5, c5.ring(), 1, DEFAULT_UNIT_SEARCH_CAP).unwrap();
        assert_eq!(e.value, q("7/2+3/2*sqrtD"));
        assert_eq!(e.power_index, 4);
        let c8 = FieldContext::new(8).unwrap();
        let e = epsilon_kappa(&c8, c8.ring(), 1, DEFAULT_UNIT_SEARCH_CAP).unwrap();
        assert_eq!(e.value, QuadNum::from_ints(17, 6));
        assert!(matches!(
            epsilon_kappa(&c12, c12.ring(), 2, 1),
            Err(Error::SearchCap { cap: 1 })
        ));
        let half = c12.ring().scale_rational(&rat(1, 2)).unwrap();
        assert!(matches!(
            epsilon_kappa(&c12, &half, 1, 10),
            Err(Error::NotIntegralIdeal(_))
        ));
    }

    #[test]
    fn unit_log() {
        let c12 = FieldContext::new(12).unwrap();
        let e = epsilon_kappa(&c12, c12.ring(), 1, 100).unwrap();
        let (v, err) = e.ln();
        assert!((v - (7.0 + 48f64.sqrt()).ln()).abs() < 1e-14);
        assert!(err < 1e-13);
    }
}
