//! The lattice `L = (a, Nm/N)`, its discriminant group, and the exact
//! q-expansion of the vector-valued theta series.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadfield::{
    epsilon_kappa, totally_positive_fundamental_unit, FieldContext, QuadLattice, QuadNum,
    UnitRecord, DEFAULT_UNIT_SEARCH_CAP,
};
use crate::rat::{self, fmt_rational, int, parse_rational, Rational};

/// Largest number of `sqrt(D)`-coordinate rows scanned by [`HeckeLattice::orbit_representatives`].
pub const MAX_SCAN_ROWS: u64 = 20_000_000;

/// Whether `v = x + y sqrt(D) < 0` under the positive embedding, decided exactly.
fn is_negative_real(ctx: &FieldContext, v: &QuadNum) -> bool {
    let (x, y) = (&v.x, &v.y);
    match (x.is_negative(), y.is_negative()) {
        (true, true) => true,
        (false, false) => false,
        // opposite signs: compare x^2 with D y^2
        (x_neg, _) => {
            let xx = x * x;
            let dyy = int(ctx.disc()) * y * y;
            if x_neg {
                xx > dyy
            } else {
                dyy > xx
            }
        }
    }
}

/// `L = (ideal, Nm/N)` with `N = Nm(ideal)/kappa`.
#[derive(Clone, Debug)]
pub struct HeckeLattice {
    pub ctx: FieldContext,
    pub ideal: QuadLattice,
    pub kappa: u64,
    pub n: Rational,
    pub dual: QuadLattice,
    pub epsilon: UnitRecord,
    /// Totally positive fundamental unit; `epsilon` is a power of it.
    pub unit_plus: UnitRecord,
    // Ideal basis in dual coordinates: (p, s) and (0, r).
    p: BigInt,
    s: BigInt,
    r: BigInt,
}

impl HeckeLattice {
    pub fn new(ctx: &FieldContext, ideal: &QuadLattice, kappa: u64) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::Internal("kappa must be positive".into()));
        }
        if !ideal.is_ideal(ctx) {
            return Err(Error::NotAnIdeal(ideal.to_string()));
        }
        if !ideal.is_integral(ctx) {
            return Err(Error::NotIntegralIdeal(ideal.to_string()));
        }
        let kq = rat::from_bigint(BigInt::from(kappa));
        let n = ideal.ideal_norm() / &kq;
        // (kappa * sqrt(D))^-1 = sqrt(D) / (kappa * D)
        let inv = QuadNum::new(Rational::zero(), Rational::one() / (&kq * int(ctx.disc())));
        let dual = ideal.scale(ctx, &inv)?;
        let [w1, w2] = ideal.basis();
        let (p, s) = dual
            .coordinates(&w1)
            .ok_or_else(|| Error::Internal("ideal not contained in its dual".into()))?;
        let (zero, r) = dual
            .coordinates(&w2)
            .ok_or_else(|| Error::Internal("ideal not contained in its dual".into()))?;
        debug_assert!(zero.is_zero());
        let epsilon = epsilon_kappa(ctx, ideal, kappa, DEFAULT_UNIT_SEARCH_CAP)?;
        let unit_plus = totally_positive_fundamental_unit(ctx);
        Ok(HeckeLattice {
            ctx: ctx.clone(),
            ideal: ideal.clone(),
            kappa,
            n,
            dual,
            epsilon,
            unit_plus,
            p,
            s,
            r,
        })
    }

    /// `Q(lambda) = Nm(lambda)/N`.
    pub fn q(&self, lambda: &QuadNum) -> Rational {
        self.ctx.norm(lambda) / &self.n
    }

    /// `(lambda, mu) = tr(lambda * conj(mu))/N`.
    pub fn pairing(&self, lambda: &QuadNum, mu: &QuadNum) -> Rational {
        self.ctx.mul(lambda, &mu.conj()).trace() / &self.n
    }

    /// `|L^dual / L|`, which equals `kappa^2 * D`.
    pub fn discriminant_order(&self) -> usize {
        (&self.p * &self.r)
            .to_usize()
            .expect("discriminant group fits in memory")
    }

    fn reduced_coordinates(&self, lambda: &QuadNum) -> Option<(BigInt, BigInt)> {
        let (m, n) = self.dual.coordinates(lambda)?;
        let k = m.div_floor(&self.p);
        let m = m - &k * &self.p;
        let n = (n - &k * &self.s).mod_floor(&self.r);
        Some((m, n))
    }

    /// Position of `lambda + L` in the canonical coset order, or `None` if `lambda` is not in the dual.
    pub fn coset_index(&self, lambda: &QuadNum) -> Option<usize> {
        let (m, n) = self.reduced_coordinates(lambda)?;
        (m * &self.r + n).to_usize()
    }

    fn coset_rep(&self, index: usize) -> QuadNum {
        let (m, n) = BigInt::from(index).div_rem(&self.r);
        let [v1, v2] = self.dual.basis();
        &v1.scale(&rat::from_bigint(m)) + &v2.scale(&rat::from_bigint(n))
    }

    pub fn discriminant_group(&self) -> DiscriminantGroup {
        let order = self.discriminant_order();
        let reps: Vec<QuadNum> = (0..order).map(|i| self.coset_rep(i)).collect();
        let neg = reps
            .iter()
            .map(|v| self.coset_index(&-v).expect("negation preserves the dual"))
            .collect();
        DiscriminantGroup { reps, neg }
    }

    /// One representative per `epsilon`-orbit of totally positive `lambda` in
    /// the dual with `Q(lambda) <= x`, normalized to `1 <= lambda/lambda' < epsilon^2`.
    ///
    /// With `u` the totally positive fundamental unit, every `u`-orbit meets
    /// the window `1/u <= lambda/lambda' < u` once; it spans about `sqrt(u)`
    /// rows. Points with `lambda < lambda'` are moved into `[u, u^2)` by `u`,
    /// and since `epsilon = u^k` the `epsilon`-orbits are the `u^j` multiples,
    /// `0 <= j < k`, of the results.
    pub fn orbit_representatives(&self, x: &Rational) -> Result<Vec<QuadNum>> {
        if !x.is_positive() {
            return Ok(Vec::new());
        }
        let ctx = &self.ctx;
        let u = &self.unit_plus.value;
        let bound = x * &self.n;
        let disc = int(ctx.disc());
        let sqrt_d = ctx.sqrt_approx();
        let uf = rat::to_f64(&u.x) + rat::to_f64(&u.y) * sqrt_d;
        let big_r = rat::to_f64(&bound).sqrt();
        let (a, b, d) = (self.dual.a(), self.dual.b(), self.dual.d());
        let (af, bf, df) = (rat::to_f64(a), rat::to_f64(b), rat::to_f64(d));

        // lambda, lambda' <= sqrt(bound * u), so |y| sqrt(D) <= sqrt(bound * u)/2
        let y_max = (uf.sqrt() * big_r / (2.0 * sqrt_d)) * (1.0 + 1e-9);
        let rows = (y_max / af).floor() + 1.0;
        if !rows.is_finite() || 2.0 * rows + 1.0 > MAX_SCAN_ROWS as f64 {
            return Err(Error::EnumerationTooLarge(
                (2.0 * rows + 1.0).min(u64::MAX as f64) as u64,
            ));
        }
        let rows = rows as i64;
        let slack = 1e-9 * (1.0 + big_r * uf.sqrt());

        let mut base = Vec::new();
        for m in -rows..=rows {
            let mq = int(m);
            let y = &mq * a;
            let yf = m as f64 * af;
            // totally positive with norm <= bound: |y| sqrt(D) < x <= sqrt(bound + D y^2)
            let lo = yf.abs() * sqrt_d;
            let hi = (big_r * big_r + lo * lo).sqrt();
            let off = m as f64 * bf;
            let n_lo = ((lo - off) / df).floor() as i64 - 1;
            let n_hi = ((hi - off) / df).ceil() as i64 + 1;
            for n in n_lo..=n_hi {
                let xf = off + n as f64 * df;
                if xf < lo - slack || xf > hi + slack {
                    continue;
                }
                let lambda = QuadNum::new(&mq * b + int(n) * d, y.clone());
                let nm = &lambda.x * &lambda.x - &disc * &lambda.y * &lambda.y;
                if !lambda.x.is_positive() || !nm.is_positive() || nm > bound {
                    continue;
                }
                // 1/u <= lambda/lambda' < u, i.e. lambda' <= u lambda and lambda < u lambda'
                let lc = lambda.conj();
                if is_negative_real(ctx, &(&ctx.mul(u, &lambda) - &lc))
                    || !is_negative_real(ctx, &(&lambda - &ctx.mul(u, &lc)))
                {
                    continue;
                }
                if lambda.y.is_negative() {
                    base.push(ctx.mul(&lambda, u));
                } else {
                    base.push(lambda);
                }
            }
        }

        let k = self.epsilon.power_index / self.unit_plus.power_index;
        let mut reps = Vec::with_capacity(base.len() * k as usize);
        for lambda in base {
            let mut cur = lambda;
            for _ in 0..k {
                let next = ctx.mul(&cur, u);
                reps.push(cur);
                cur = next;
            }
        }
        reps.sort();
        Ok(reps)
    }

    /// All coefficients with exponent `<= x`.
    pub fn theta_expansion(&self, x: &Rational) -> Result<ThetaSeries> {
        let group = self.discriminant_group();
        let mut acc: Vec<BTreeMap<Rational, i64>> = vec![BTreeMap::new(); group.reps.len()];
        for lambda in self.orbit_representatives(x)? {
            let q = self.q(&lambda);
            let i = self
                .coset_index(&lambda)
                .expect("representative lies in the dual");
            *acc[i].entry(q.clone()).or_insert(0) += 1;
            *acc[group.neg[i]].entry(q).or_insert(0) -= 1;
        }
        let cosets = group
            .reps
            .into_iter()
            .zip(acc)
            .map(|(rep, terms)| ThetaComponent {
                rep,
                terms: terms.into_iter().filter(|(_, c)| *c != 0).collect(),
            })
            .collect();
        Ok(ThetaSeries {
            cosets,
            precision: x.clone(),
        })
    }
}

/// Coset representatives of `L^dual / L` in canonical order, with the negation pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantGroup {
    pub reps: Vec<QuadNum>,
    /// `neg[i]` is the index of `-reps[i]`.
    pub neg: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaComponent {
    pub rep: QuadNum,
    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub terms: Vec<(Rational, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaSeries {
    pub cosets: Vec<ThetaComponent>,
    pub precision: Rational,
}

#[derive(Serialize, Deserialize)]
struct ComponentWire {
    rep: String,
    terms: Vec<(String, i64)>,
}

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    cosets: Vec<ComponentWire>,
    precision: String,
}

impl ThetaSeries {
    pub fn is_zero(&self) -> bool {
        self.cosets.iter().all(|c| c.terms.is_empty())
    }

    pub fn nonzero_components(&self) -> impl Iterator<Item = &ThetaComponent> {
        self.cosets.iter().filter(|c| !c.terms.is_empty())
    }

    pub fn to_json(&self) -> String {
        let wire = SeriesWire {
            cosets: self
                .cosets
                .iter()
                .map(|c| ComponentWire {
                    rep: c.rep.to_string(),
                    terms: c.terms.iter().map(|(e, k)| (fmt_rational(e), *k)).collect(),
                })
                .collect(),
            precision: fmt_rational(&self.precision),
        };
        serde_json::to_string(&wire).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: SeriesWire = serde_json::from_str(s).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: e.to_string(),
        })?;
        let cosets = wire
            .cosets
            .into_iter()
            .map(|c| {
                let rep = c.rep.parse()?;
                let terms = c
                    .terms
                    .into_iter()
                    .map(|(e, k)| Ok((parse_rational(&e, 0)?, k)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ThetaComponent { rep, terms })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ThetaSeries {
            cosets,
            precision: parse_rational(&wire.precision, 0)?,
        })
    }
}

/// Nonzero coefficients of `eta^2 = q^(1/12) prod (1 - q^n)^2` with exponent `<= x`.
pub fn eta_squared_coeffs(x: &Rational) -> Vec<(Rational, i64)> {
    let shift = Rational::new(BigInt::one(), BigInt::from(12));
    if *x < shift {
        return Vec::new();
    }
    let top = rat::floor_int(&(x - &shift))
        .to_usize()
        .expect("precision fits in memory");
    let mut poly = vec![0i64; top + 1];
    poly[0] = 1;
    for n in 1..=top {
        for _ in 0..2 {
            for i in (n..=top).rev() {
                poly[i] -= poly[i - n];
            }
        }
    }
    poly.into_iter()
        .enumerate()
        .filter(|(_, c)| *c != 0)
        .map(|(i, c)| (&shift + int(i as i64), c))
        .collect()
}
