//! Brute-force reference computations shared by the integration tests.
//! None of these call into the library's algorithms.

#![allow(dead_code)]

use hecke_norm::quadfield::{fundamental_discriminants, FieldContext, QuadLattice, QuadNum};
use hecke_norm::rademacher::IntMatrix2;
use hecke_norm::theta::HeckeLattice;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use std::collections::BTreeMap;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn m(a: i64, b: i64, c: i64, d: i64) -> IntMatrix2 {
    IntMatrix2::from_i64(a, b, c, d)
}

fn isqrt(n: u128) -> Option<u128> {
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Smallest unit `(t + u sqrt D)/2 > 1` found by scanning `u`, as coordinates
/// `(t/2, u/2)` and the norm sign.
pub fn pell_unit(d: i64, max_u: u128) -> Option<(BigRational, BigRational, i8)> {
    let d = d as u128;
    for u in 1..=max_u {
        let du2 = d * u * u;
        if let Some(t) = isqrt(du2 - 4) {
            return Some((q(t as i64, 2), q(u as i64, 2), -1));
        }
        if let Some(t) = isqrt(du2 + 4) {
            return Some((q(t as i64, 2), q(u as i64, 2), 1));
        }
    }
    None
}

/// `s(h, k)` straight from the definition with rational sawtooth values.
pub fn dedekind_literal(h: i64, k: i64) -> BigRational {
    let saw = |x: BigRational| {
        if x.is_integer() {
            BigRational::zero()
        } else {
            &x - x.floor() - q(1, 2)
        }
    };
    (0..k)
        .map(|mu| saw(q(mu, k)) * saw(q(mu * h, k)))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// Coefficients of `prod (1 - q^n)^2` up to `q^top`, by squaring the
/// pentagonal-number expansion of `prod (1 - q^n)`.
pub fn euler_squared(top: usize) -> Vec<i64> {
    let mut e = vec![0i64; top + 1];
    for k in -(top as i64)..=(top as i64) {
        let p = k * (3 * k - 1) / 2;
        if (0..=top as i64).contains(&p) {
            e[p as usize] += if k % 2 == 0 { 1 } else { -1 };
        }
    }
    let mut out = vec![0i64; top + 1];
    for i in 0..=top {
        for j in 0..=top - i {
            out[i + j] += e[i] * e[j];
        }
    }
    out
}

/// Word in `S = [[0,-1],[1,0]]` and powers of `T` from a list of exponents.
pub fn sl2_word(exps: &[i64]) -> IntMatrix2 {
    let s = m(0, -1, 1, 0);
    exps.iter().fold(IntMatrix2::identity(), |acc, &e| {
        acc.mul(&m(1, e, 0, 1)).mul(&s)
    })
}

fn mul(ctx: &FieldContext, a: &QuadNum, b: &QuadNum) -> QuadNum {
    let d = BigRational::from_integer(BigInt::from(ctx.disc()));
    QuadNum::new(&a.x * &b.x + &d * &a.y * &b.y, &a.x * &b.y + &a.y * &b.x)
}

/// Theta coefficients by scanning a box of the dual lattice: for every
/// totally positive `lambda` in the window `1 <= lambda/lambda' < eps^2` with
/// `Nm(lambda)/N <= x`, add `+1` at the coset of `lambda` and `-1` at the coset
/// of `-lambda`. Cosets are matched to `reps` by membership of differences in
/// `ideal`. Returns per-rep maps from exponent to nonzero coefficient, and the
/// number of window points.
pub fn box_theta(
    ctx: &FieldContext,
    ideal: &QuadLattice,
    dual: &QuadLattice,
    n: &BigRational,
    eps: &QuadNum,
    reps: &[QuadNum],
    x: &BigRational,
) -> (Vec<BTreeMap<BigRational, i64>>, usize) {
    let d = BigRational::from_integer(BigInt::from(ctx.disc()));
    let eps_conj = eps.conj();
    let eps_f =
        hecke_norm::rat::to_f64(&eps.x) + hecke_norm::rat::to_f64(&eps.y) * ctx.sqrt_approx();
    let xn = hecke_norm::rat::to_f64(&(x * n));
    let bound = eps_f * xn.sqrt() * 1.01 + 1.0;
    let (a, b, dd) = (dual.a().clone(), dual.b().clone(), dual.d().clone());
    let af = hecke_norm::rat::to_f64(&a);
    let df = hecke_norm::rat::to_f64(&dd);
    let bf = hecke_norm::rat::to_f64(&b);
    // lambda = m (a sqrt(D) + b) + k d with 0 <= y sqrt(D) < bound/2
    let m_max = (bound / (2.0 * af * ctx.sqrt_approx())).ceil() as i64 + 1;
    let coset_of = |v: &QuadNum| {
        reps.iter()
            .position(|r| ideal.contains(&QuadNum::new(&v.x - &r.x, &v.y - &r.y)))
            .expect("every element of the dual lies in some coset")
    };
    let mut out = vec![BTreeMap::new(); reps.len()];
    let mut count = 0usize;
    for mm in 0..=m_max {
        // totally positive with norm <= x N: y sqrt(D) < x_coord <= sqrt(x N + D y^2)
        let y = mm as f64 * af;
        let x_lo = y * ctx.sqrt_approx();
        let x_hi = (xn + x_lo * x_lo).sqrt();
        let lo = ((x_lo - mm as f64 * bf) / df).floor() as i64 - 1;
        let hi = ((x_hi - mm as f64 * bf) / df).ceil() as i64 + 1;
        for k in lo..=hi {
            let lam = QuadNum::new(
                BigRational::from_integer(BigInt::from(mm)) * &b
                    + BigRational::from_integer(BigInt::from(k)) * &dd,
                BigRational::from_integer(BigInt::from(mm)) * &a,
            );
            let nm = &lam.x * &lam.x - &d * &lam.y * &lam.y;
            if !lam.x.is_positive() || !nm.is_positive() || lam.y.is_negative() {
                continue;
            }
            let e = &nm / n;
            if e > *x {
                continue;
            }
            // lambda/lambda' < eps^2  <=>  lambda eps' has negative sqrt(D) part
            if !mul(ctx, &lam, &eps_conj).y.is_negative() {
                continue;
            }
            count += 1;
            let neg = QuadNum::new(-&lam.x, -&lam.y);
            *out[coset_of(&lam)].entry(e.clone()).or_insert(0) += 1;
            *out[coset_of(&neg)].entry(e).or_insert(0) -= 1;
        }
    }
    for map in &mut out {
        map.retain(|_, c| *c != 0);
    }
    (out, count)
}

/// Integral ideals generated by `p` and `omega + t` for small primes `p`.
pub fn small_prime_ideals(ctx: &FieldContext, primes: &[i64]) -> Vec<QuadLattice> {
    let omega = ctx.omega();
    let mut out = Vec::new();
    for &p in primes {
        for t in 0..p {
            let gens = [
                QuadNum::from_ints(p, 0),
                QuadNum::new(
                    &omega.x + BigRational::from_integer(BigInt::from(t)),
                    omega.y.clone(),
                ),
            ];
            if let Ok(l) = QuadLattice::from_generators(&gens) {
                if l.is_ideal(ctx) && l.is_integral(ctx) && l.ideal_norm() != BigRational::one() {
                    out.push(l);
                }
            }
        }
    }
    out
}

/// Random instance: discriminant, ideal, kappa and a totally positive multiplier.
pub fn instance() -> impl Strategy<Value = (FieldContext, QuadLattice, u64, QuadNum)> {
    (
        prop::sample::select(fundamental_discriminants(60)),
        0usize..8,
        1u64..=3,
        1i64..6,
        -3i64..4,
    )
        .prop_filter_map(
            "multiplier must be totally positive",
            |(d, which, kappa, x, y)| {
                let ctx = FieldContext::new(d).unwrap();
                let mut ideals = vec![ctx.ring().clone(), ctx.different()];
                ideals.extend(small_prime_ideals(&ctx, &[2, 3, 5]));
                let ideal = ideals[which % ideals.len()].clone();
                let omega = ctx.omega();
                let mu = QuadNum::new(q(x, 1) + &omega.x * q(y, 1), &omega.y * q(y, 1));
                ctx.is_totally_positive(&mu)
                    .then_some((ctx, ideal, kappa, mu))
            },
        )
}

/// Checks antisymmetry of the theta series of `(ideal, kappa)` and that the
/// series for `mu * ideal` is the same after relabeling cosets by `mu`.
pub fn check_theta_symmetries(
    ctx: &FieldContext,
    ideal: &QuadLattice,
    kappa: u64,
    mu: &QuadNum,
    x: &BigRational,
) -> Result<(), String> {
    let hl = HeckeLattice::new(ctx, ideal, kappa).map_err(|e| e.to_string())?;
    let series = hl.theta_expansion(x).map_err(|e| e.to_string())?;
    let group = hl.discriminant_group();
    for (i, c) in series.cosets.iter().enumerate() {
        let neg: Vec<_> = series.cosets[group.neg[i]]
            .terms
            .iter()
            .map(|(e, k)| (e.clone(), -k))
            .collect();
        if c.terms != neg || (group.neg[i] == i && !c.terms.is_empty()) {
            return Err(format!(
                "antisymmetry fails at coset {} of {ideal}, kappa {kappa}",
                c.rep
            ));
        }
    }
    let moved = ideal.scale(ctx, mu).map_err(|e| e.to_string())?;
    let hl2 = HeckeLattice::new(ctx, &moved, kappa).map_err(|e| e.to_string())?;
    let series2 = hl2.theta_expansion(x).map_err(|e| e.to_string())?;
    if series.cosets.len() != series2.cosets.len() {
        return Err("coset counts differ".into());
    }
    let mut hit = vec![false; series2.cosets.len()];
    for c in &series.cosets {
        let j = hl2
            .coset_index(&ctx.mul(mu, &c.rep))
            .ok_or("multiplier leaves the dual")?;
        if hit[j] || c.terms != series2.cosets[j].terms {
            return Err(format!("{ideal} and {moved} disagree at coset {}", c.rep));
        }
        hit[j] = true;
    }
    Ok(())
}
