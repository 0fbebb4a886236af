//! The closed-form Petersson norm: `g_L`, `g_kappa`, `gamma_{D,kappa}` and
//! the two conjugates whose Rademacher symbols give the coefficient.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadfield::{
    totally_positive_fundamental_unit, FieldContext, QuadLattice, QuadNum, UnitRecord,
};
use crate::rademacher::{psi, IntMatrix2};
use crate::rat::{self, fmt_rational, int, parse_rational, Rational};
use crate::theta::HeckeLattice;

/// A rational 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix2 {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl RatMatrix2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        RatMatrix2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        RatMatrix2::new(int(1), int(0), int(0), int(1))
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &RatMatrix2) -> RatMatrix2 {
        RatMatrix2::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }

    pub fn inverse(&self) -> Result<RatMatrix2> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::Singular);
        }
        Ok(RatMatrix2::new(
            &self.d / &det,
            -&self.b / &det,
            -&self.c / &det,
            &self.a / &det,
        ))
    }

    pub fn entries(&self) -> [&Rational; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_integral(&self) -> bool {
        self.entries().iter().all(|q| rat::is_integer(q))
    }

    pub fn to_int(&self) -> Result<IntMatrix2> {
        if !self.is_integral() {
            return Err(Error::NotIntegralMatrix(self.to_string()));
        }
        Ok(IntMatrix2::new(
            self.a.to_integer(),
            self.b.to_integer(),
            self.c.to_integer(),
            self.d.to_integer(),
        ))
    }

    fn rows(&self) -> [[String; 2]; 2] {
        [
            [fmt_rational(&self.a), fmt_rational(&self.b)],
            [fmt_rational(&self.c), fmt_rational(&self.d)],
        ]
    }

    fn from_rows(rows: &[[String; 2]; 2]) -> Result<Self> {
        Ok(RatMatrix2::new(
            parse_rational(&rows[0][0], 0)?,
            parse_rational(&rows[0][1], 0)?,
            parse_rational(&rows[1][0], 0)?,
            parse_rational(&rows[1][1], 0)?,
        ))
    }
}

impl From<&IntMatrix2> for RatMatrix2 {
    fn from(m: &IntMatrix2) -> Self {
        let f = |x: &BigInt| rat::from_bigint(x.clone());
        RatMatrix2::new(f(&m.a), f(&m.b), f(&m.c), f(&m.d))
    }
}

impl fmt::Display for RatMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries().map(fmt_rational);
        write!(f, "{a},{b};{c},{d}")
    }
}

/// `[[alpha, D*beta], [beta, alpha]]` for `eps = alpha + beta*sqrt(D)`.
pub fn gamma_dkappa(ctx: &FieldContext, eps: &UnitRecord) -> RatMatrix2 {
    let QuadNum { x: alpha, y: beta } = &eps.value;
    RatMatrix2::new(
        alpha.clone(),
        int(ctx.disc()) * beta,
        beta.clone(),
        alpha.clone(),
    )
}

/// `[[2/(D kappa), 0], [0, 1]]` when `D kappa` is even, else `[[1/(D kappa), 1], [0, 2]]`.
pub fn g_kappa(ctx: &FieldContext, kappa: u64) -> RatMatrix2 {
    let dk = BigInt::from(ctx.disc()) * BigInt::from(kappa);
    if (&dk % 2u32).is_zero() {
        RatMatrix2::new(Rational::new(BigInt::from(2), dk), int(0), int(0), int(1))
    } else {
        RatMatrix2::new(Rational::new(BigInt::one(), dk), int(1), int(0), int(2))
    }
}

/// `[[a, b], [0, d]]` from the triple of `ideal ∩ 2 L^dual`.
///
/// Checks `2 det = Nm(ideal ∩ 2 L^dual)` with the norm computed from
/// `I * conj(I)` rather than from the triple.
pub fn g_l(hl: &HeckeLattice) -> Result<RatMatrix2> {
    let two_dual = hl.dual.scale_rational(&int(2))?;
    let inter: QuadLattice = hl.ideal.intersect(&two_dual);
    let g = RatMatrix2::new(
        inter.a().clone(),
        inter.b().clone(),
        int(0),
        inter.d().clone(),
    );
    let nm = inter.ideal_norm_via_conjugate(&hl.ctx)?;
    if int(2) * g.det() != nm {
        return Err(Error::Internal(format!(
            "2 det(g_L) = {} but Nm = {}",
            fmt_rational(&(int(2) * g.det())),
            fmt_rational(&nm)
        )));
    }
    Ok(g)
}

/// `g * gamma * g^-1`.
pub fn conjugate(g: &RatMatrix2, gamma: &RatMatrix2) -> Result<RatMatrix2> {
    Ok(g.mul(gamma).mul(&g.inverse()?))
}

/// `g * gamma * g^-1` for upper-triangular `g = [[a, b], [0, d]]` and
/// `gamma = [[alpha, D beta], [beta, alpha]]`:
/// `(1/a) [[a alpha + b beta, ((a^2 D - b^2)/d) beta], [d beta, a alpha - b beta]]`.
pub fn conjugate_upper_triangular(
    disc: i64,
    g: &RatMatrix2,
    alpha: &Rational,
    beta: &Rational,
) -> Result<RatMatrix2> {
    if !g.c.is_zero() {
        return Err(Error::Internal(format!("{g} is not upper triangular")));
    }
    if g.det().is_zero() {
        return Err(Error::Singular);
    }
    let (a, b, d) = (&g.a, &g.b, &g.d);
    let s = a.recip();
    Ok(RatMatrix2::new(
        &s * (a * alpha + b * beta),
        &s * ((a * a * int(disc) - b * b) / d) * beta,
        &s * d * beta,
        &s * (a * alpha - b * beta),
    ))
}

/// Writes `g gamma_{D,kappa} g^-1 = delta^m` with `delta` integral and `m` maximal.
///
/// The centralizer of the conjugate is generated by the conjugates of powers
/// of the totally positive fundamental unit `u`, so `delta` comes from the
/// smallest `u^j` (with `j` dividing the exponent of `eps`) whose conjugate is
/// integral.
pub fn conjugate_root(
    ctx: &FieldContext,
    g: &RatMatrix2,
    eps: &UnitRecord,
) -> Result<(IntMatrix2, u64)> {
    let unit = totally_positive_fundamental_unit(ctx);
    let k = eps.power_index / unit.power_index;
    let target = conjugate(g, &gamma_dkappa(ctx, eps))?.to_int()?;
    for j in (1..=k).filter(|j| k.is_multiple_of(*j)) {
        let eta = UnitRecord {
            value: ctx.pow(&unit.value, j),
            norm_sign: 1,
            totally_positive: true,
            power_index: j * unit.power_index,
        };
        let delta = conjugate(g, &gamma_dkappa(ctx, &eta))?;
        if let Ok(delta) = delta.to_int() {
            let m = k / j;
            if delta.pow(m) != target {
                return Err(Error::Internal(format!(
                    "{delta}^{m} differs from {target}"
                )));
            }
            return Ok((delta, m));
        }
    }
    Err(Error::Internal(format!("no integral root of {target}")))
}

/// Every ingredient of the closed form together with the result.
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub disc: i64,
    pub ideal: QuadLattice,
    pub kappa: u64,
    pub epsilon: UnitRecord,
    pub g_l: RatMatrix2,
    pub g_kappa: RatMatrix2,
    pub gamma_dk: RatMatrix2,
    /// Whether `gamma_{D,kappa}` itself has integer entries (it need not for odd `D`).
    pub gamma_dk_integral: bool,
    pub gamma0: IntMatrix2,
    pub gamma1: IntMatrix2,
    pub psi0: BigInt,
    pub psi1: BigInt,
    /// `-(psi0 + psi1)/12`.
    pub coefficient: Rational,
    pub log_epsilon: f64,
    pub norm_value: f64,
    /// Absolute error bound on `norm_value`.
    pub norm_error: f64,
    pub vanishes: bool,
}

fn integral_conjugate(
    which: &str,
    g: &RatMatrix2,
    gamma: &RatMatrix2,
    disc: i64,
) -> Result<IntMatrix2> {
    let generic = conjugate(g, gamma)?;
    let closed = conjugate_upper_triangular(disc, g, &gamma.a, &gamma.c)?;
    if generic != closed {
        return Err(Error::Internal(format!(
            "{which}: matrix product {generic} disagrees with the closed formula {closed}"
        )));
    }
    let m = generic.to_int().map_err(|_| Error::IntegralityViolation {
        which: which.to_string(),
        matrix: generic.to_string(),
    })?;
    if !m.is_unimodular() {
        return Err(Error::IntegralityViolation {
            which: which.to_string(),
            matrix: generic.to_string(),
        });
    }
    Ok(m)
}

pub fn closed_form_norm(ctx: &FieldContext, ideal: &QuadLattice, kappa: u64) -> Result<NormReport> {
    let hl = HeckeLattice::new(ctx, ideal, kappa)?;
    closed_form_norm_for(&hl)
}

pub fn closed_form_norm_for(hl: &HeckeLattice) -> Result<NormReport> {
    let ctx = &hl.ctx;
    let eps = hl.epsilon.clone();
    let gamma = gamma_dkappa(ctx, &eps);
    let gk = g_kappa(ctx, hl.kappa);
    let gl = g_l(hl)?;
    let gamma0 = integral_conjugate("gamma0", &gk, &gamma, ctx.disc())?;
    let gamma1 = integral_conjugate("gamma1", &gl, &gamma, ctx.disc())?;
    let psi0 = psi(&gamma0)?;
    let psi1 = psi(&gamma1)?;
    let coefficient = -rat::from_bigint(&psi0 + &psi1) / int(12);
    let (log_eps, log_err) = eps.ln();
    let cf = rat::to_f64(&coefficient);
    let norm_value = cf * log_eps;
    let norm_error = cf.abs() * log_err + 2.0 * f64::EPSILON * norm_value.abs();
    Ok(NormReport {
        disc: ctx.disc(),
        ideal: hl.ideal.clone(),
        kappa: hl.kappa,
        gamma_dk_integral: gamma.is_integral(),
        epsilon: eps,
        g_l: gl,
        g_kappa: gk,
        gamma_dk: gamma,
        gamma0,
        gamma1,
        psi0,
        psi1,
        vanishes: coefficient.is_zero(),
        coefficient,
        log_epsilon: log_eps,
        norm_value,
        norm_error,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct UnitWire {
    value: String,
    norm_sign: i8,
    totally_positive: bool,
    power_index: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ReportWire {
    disc: i64,
    ideal: [String; 3],
    kappa: u64,
    epsilon: UnitWire,
    g_l: [[String; 2]; 2],
    g_kappa: [[String; 2]; 2],
    gamma_dk: [[String; 2]; 2],
    gamma_dk_integral: bool,
    gamma0: [[String; 2]; 2],
    gamma1: [[String; 2]; 2],
    psi0: serde_json::Value,
    psi1: serde_json::Value,
    coefficient: String,
    log_epsilon: f64,
    norm_value: f64,
    norm_error: f64,
    vanishes: bool,
}

/// Small integers as JSON numbers, anything larger as a decimal string.
fn int_to_json(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(n.to_string()),
    }
}

fn int_from_json(v: &serde_json::Value) -> Result<BigInt> {
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("expected an integer, got {v}"),
    };
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(bad),
        serde_json::Value::String(s) => s.parse().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse {
        pos: e.column(),
        msg: e.to_string(),
    }
}

impl NormReport {
    pub fn to_json(&self) -> String {
        let int_rows = |m: &IntMatrix2| RatMatrix2::from(m).rows();
        let wire = ReportWire {
            disc: self.disc,
            ideal: [
                fmt_rational(self.ideal.a()),
                fmt_rational(self.ideal.b()),
                fmt_rational(self.ideal.d()),
            ],
            kappa: self.kappa,
            epsilon: UnitWire {
                value: self.epsilon.value.to_string(),
                norm_sign: self.epsilon.norm_sign,
                totally_positive: self.epsilon.totally_positive,
                power_index: self.epsilon.power_index,
            },
            g_l: self.g_l.rows(),
            g_kappa: self.g_kappa.rows(),
            gamma_dk: self.gamma_dk.rows(),
            gamma_dk_integral: self.gamma_dk_integral,
            gamma0: int_rows(&self.gamma0),
            gamma1: int_rows(&self.gamma1),
            psi0: int_to_json(&self.psi0),
            psi1: int_to_json(&self.psi1),
            coefficient: fmt_rational(&self.coefficient),
            log_epsilon: self.log_epsilon,
            norm_value: self.norm_value,
            norm_error: self.norm_error,
            vanishes: self.vanishes,
        };
        serde_json::to_string(&wire).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let w: ReportWire = serde_json::from_str(s).map_err(json_err)?;
        let ideal = QuadLattice::new(
            parse_rational(&w.ideal[0], 0)?,
            parse_rational(&w.ideal[1], 0)?,
            parse_rational(&w.ideal[2], 0)?,
        )?;
        Ok(NormReport {
            disc: w.disc,
            ideal,
            kappa: w.kappa,
            epsilon: UnitRecord {
                value: w.epsilon.value.parse()?,
                norm_sign: w.epsilon.norm_sign,
                totally_positive: w.epsilon.totally_positive,
                power_index: w.epsilon.power_index,
            },
            g_l: RatMatrix2::from_rows(&w.g_l)?,
            g_kappa: RatMatrix2::from_rows(&w.g_kappa)?,
            gamma_dk: RatMatrix2::from_rows(&w.gamma_dk)?,
            gamma_dk_integral: w.gamma_dk_integral,
            gamma0: RatMatrix2::from_rows(&w.gamma0)?.to_int()?,
            gamma1: RatMatrix2::from_rows(&w.gamma1)?.to_int()?,
            psi0: int_from_json(&w.psi0)?,
            psi1: int_from_json(&w.psi1)?,
            coefficient: parse_rational(&w.coefficient, 0)?,
            log_epsilon: w.log_epsilon,
            norm_value: w.norm_value,
            norm_error: w.norm_error,
            vanishes: w.vanishes,
        })
    }
}
