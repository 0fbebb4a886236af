//! Floating-point cross-checks: cycle integrals of `E2*` along closed
//! geodesics, and direct quadrature of the Petersson norm.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{conjugate_root, NormReport};
use crate::quadfield::FieldContext;
use crate::rademacher::{is_hyperbolic, psi, IntMatrix2};
use crate::rat;
use crate::theta::ThetaSeries;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QuadratureConfig {
    /// Gauss-Legendre nodes per panel of the cycle integral.
    pub gauss_nodes: usize,
    /// Terms of the `q`-series of `E2*`.
    pub series_terms: usize,
    /// Upper cutoff of the fundamental domain.
    pub v_max: f64,
    pub u_nodes: usize,
    /// Nodes per unit-length panel in `v`.
    pub v_nodes: usize,
    /// Allowed distance between a cycle integral and `Psi`.
    pub tolerance: f64,
    /// Allowed distance between the numeric and closed-form norms.
    pub petersson_tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            gauss_nodes: 64,
            series_terms: 64,
            v_max: 40.0,
            u_nodes: 48,
            v_nodes: 24,
            tolerance: 1e-4,
            petersson_tolerance: 5e-3,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            self.gauss_nodes,
            self.series_terms,
            self.u_nodes,
            self.v_nodes,
        ];
        let ok = counts.iter().all(|&n| n > 0)
            && self.v_max >= 1.0
            && self.tolerance > 0.0
            && self.tolerance < 1.0
            && self.petersson_tolerance > 0.0
            && self.petersson_tolerance < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Internal(format!(
                "invalid quadrature settings {self:?}"
            )))
        }
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Moves `z` into the standard fundamental domain; returns the image and
/// the matrix `[a, b, c, d]` used, so that `E(z) = E(image) / (c z + d)^2`.
fn reduce(z: Complex64) -> Result<(Complex64, [f64; 4])> {
    let (mut a, mut b, mut c, mut d) = (1.0, 0.0, 0.0, 1.0);
    let mut w = z;
    for _ in 0..10_000 {
        let n = (w.re + 0.5).floor();
        w.re -= n;
        a -= n * c;
        b -= n * d;
        if w.norm_sqr() < 1.0 - 1e-15 {
            w = -w.inv();
            (a, b, c, d) = (-c, -d, a, b);
        } else {
            return Ok((w, [a, b, c, d]));
        }
    }
    Err(Error::Internal(format!(
        "reduction of {z} did not terminate"
    )))
}

fn e2_star_reduced(w: Complex64, terms: usize) -> Complex64 {
    let q = (Complex64::i() * 2.0 * PI * w).exp();
    let mut qn = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=terms {
        qn *= q;
        sum += n as f64 * qn / (1.0 - qn);
    }
    Complex64::new(1.0 - 3.0 / (PI * w.im), 0.0) - 24.0 * sum
}

/// The weight-2 non-holomorphic Eisenstein series
/// `E2*(z) = -3/(pi y) + 1 - 24 sum n q^n/(1 - q^n)`.
pub fn e2_star(z: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if z.im.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
        || !z.re.is_finite()
        || !z.im.is_finite()
    {
        return Err(Error::NotUpperHalfPlane(z.to_string()));
    }
    let (w, [_, _, c, d]) = reduce(z)?;
    let j = c * z + d;
    Ok(e2_star_reduced(w, cfg.series_terms) / (j * j))
}

/// Points below this height are moved back into the fundamental domain
/// before integrating further.
const MIN_HEIGHT: f64 = 0.5;

fn mobius(m: [f64; 4], z: Complex64) -> Complex64 {
    (m[0] * z + m[1]) / (m[2] * z + m[3])
}

fn hyperbolic_entries(gamma: &IntMatrix2) -> Result<[f64; 4]> {
    if !gamma.is_unimodular() {
        return Err(Error::NotUnimodular(gamma.to_string()));
    }
    if !is_hyperbolic(gamma) {
        return Err(Error::NotHyperbolic(gamma.to_string()));
    }
    gamma
        .to_f64()
        .filter(|e| e.iter().all(|x| x.is_finite()))
        .ok_or_else(|| Error::Internal(format!("entries of {gamma} overflow f64")))
}

/// The axis of a hyperbolic matrix, `z(t) = center + r(-tanh t + i sech t)`
/// with `t` the hyperbolic arc length from the top.
struct Axis {
    matrix: IntMatrix2,
    center: f64,
    radius: f64,
}

impl Axis {
    fn new(matrix: IntMatrix2) -> Result<Axis> {
        hyperbolic_entries(&matrix)?;
        // c != 0 for hyperbolic elements of SL2(Z)
        let f = |n: BigInt| n.to_f64().unwrap_or(f64::INFINITY);
        let two_c = f(BigInt::from(2) * &matrix.c);
        let tr = matrix.trace();
        let center = f(&matrix.a - &matrix.d) / two_c;
        let radius = f(&tr * &tr - BigInt::from(4)).sqrt() / two_c.abs();
        Ok(Axis {
            matrix,
            center,
            radius,
        })
    }

    fn point(&self, t: f64) -> Complex64 {
        let sech = 1.0 / t.cosh();
        Complex64::new(self.center - self.radius * t.tanh(), self.radius * sech)
    }

    fn velocity(&self, t: f64) -> Complex64 {
        let sech = 1.0 / t.cosh();
        Complex64::new(-self.radius * sech * sech, -self.radius * t.tanh() * sech)
    }

    /// Parameter of a point on the axis: `sinh t = (center - x)/y`.
    fn param(&self, z: Complex64) -> f64 {
        ((self.center - z.re) / z.im).asinh()
    }
}

/// Translation length `l` of `gamma` and the sign `s` with `gamma z(t) = z(t + s l)`.
fn translation(gamma: &IntMatrix2, axis: &Axis) -> Result<(f64, f64)> {
    let m = hyperbolic_entries(gamma)?;
    let tr = (m[0] + m[3]).abs();
    let ell = 2.0 * (tr / 2.0).acosh();
    let image = mobius(m, axis.point(0.0));
    let sign = if (image - axis.point(-ell)).norm() < (image - axis.point(ell)).norm() {
        -1.0
    } else {
        1.0
    };
    Ok((ell, sign))
}

/// `int E2*(z) dz` from `z(s0)` to `gamma z(s0)` along the axis of `gamma`,
/// where `z(0)` is the top of the semicircle.
///
/// `E2*(z) dz` is invariant under `SL2(Z)`, so whenever the path drops below
/// [`MIN_HEIGHT`] the current point is moved into the fundamental domain by
/// some `h` and integration continues on the axis of `h g h^-1`. Long
/// geodesics therefore never come close to the real axis.
pub fn cycle_integral_from(
    gamma: &IntMatrix2,
    s0: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let mut axis = Axis::new(gamma.clone())?;
    let (ell, mut dir) = translation(gamma, &axis)?;
    let (x, w) = gauss_legendre(cfg.gauss_nodes);
    let mut t = s0;
    let mut remaining = ell;
    let mut total = Complex64::new(0.0, 0.0);
    let mut steps = 0usize;
    while remaining > 0.0 {
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::Internal(format!(
                "cycle integral of {gamma} did not finish"
            )));
        }
        // farthest parameter reachable in direction `dir` above MIN_HEIGHT
        let stop = dir * (axis.radius / MIN_HEIGHT).max(1.0).acosh();
        let room = dir * (stop - t);
        if room <= 1e-9 {
            let z = axis.point(t);
            let behind = axis.point(t - dir * 1e-3);
            let (_, h) = reduce(z)?;
            let hi = h.map(|v| BigInt::from(v.round() as i64));
            let h_int = IntMatrix2::new(hi[0].clone(), hi[1].clone(), hi[2].clone(), hi[3].clone());
            let moved = Axis::new(h_int.mul(&axis.matrix).mul(&h_int.adjugate()))?;
            let t_new = moved.param(mobius(h, z));
            let t_behind = moved.param(mobius(h, behind));
            dir = if t_new > t_behind { 1.0 } else { -1.0 };
            t = t_new;
            axis = moved;
            continue;
        }
        let seg = room.min(remaining);
        let panels = (seg / 0.5).ceil().max(1.0) as usize;
        let hstep = dir * seg / panels as f64;
        for p in 0..panels {
            let mid = t + hstep * (p as f64 + 0.5);
            for (xi, wi) in x.iter().zip(&w) {
                let s = mid + hstep / 2.0 * xi;
                total += wi * hstep / 2.0 * e2_star(axis.point(s), cfg)? * axis.velocity(s);
            }
        }
        t += dir * seg;
        remaining -= seg;
    }
    Ok(total)
}

/// Meyer's cycle integral, which equals `Psi(gamma)`. The path starts at the
/// top of the semicircle, where the point is known most accurately.
pub fn cycle_integral(gamma: &IntMatrix2, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(cycle_integral_from(gamma, 0.0, cfg)?.re)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PeterssonEstimate {
    pub value: f64,
    /// Quadrature difference to a half-resolution grid plus both tail bounds.
    pub error_bar: f64,
    /// Bound on the contribution of the omitted `q`-exponents above the precision.
    pub truncation_bound: f64,
    /// Exact contribution of the region `v > v_max`, already included in `value`.
    pub tail: f64,
}

/// `E1(x) = int_x^inf e^-t / t dt` for `x > 0`: power series below 1,
/// continued fraction (modified Lentz) above.
pub fn exp_integral_e1(x: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            sum += term / k as f64;
        }
        return -EULER_GAMMA - x.ln() - sum;
    }
    let tiny = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..200 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}

struct Component {
    terms: Vec<(f64, f64)>,
    min_exp: f64,
    /// First exponent beyond the precision in this component's class mod 1.
    next_exp: f64,
}

/// Coefficients of a holomorphic weight-one form grow slowly; this assumes
/// `|c_n| <= B (n + 1)` with `B` the largest observed coefficient.
fn truncation_series(comp: &Component, bound: f64, v: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..200 {
        let e = comp.next_exp + k as f64;
        let t = bound * (e + 1.0) * (-2.0 * PI * e * v).exp();
        s += t;
        if t < 1e-300 {
            break;
        }
    }
    s
}

fn abs_series(comp: &Component, v: f64) -> f64 {
    comp.terms
        .iter()
        .map(|(e, c)| c.abs() * (-2.0 * PI * e * v).exp())
        .sum()
}

fn components(series: &ThetaSeries) -> Vec<Component> {
    let x = rat::to_f64(&series.precision);
    series
        .nonzero_components()
        .map(|c| {
            let terms: Vec<(f64, f64)> = c
                .terms
                .iter()
                .map(|(e, k)| (rat::to_f64(e), *k as f64))
                .collect();
            let min_exp = terms.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
            let frac = min_exp - min_exp.floor();
            let mut next_exp = x.floor() + frac;
            while next_exp <= x {
                next_exp += 1.0;
            }
            Component {
                terms,
                min_exp,
                next_exp,
            }
        })
        .collect()
}

fn integrate(comps: &[Component], cfg: &QuadratureConfig, u_nodes: usize, v_nodes: usize) -> f64 {
    let (ux, uw) = gauss_legendre(u_nodes);
    let (vx, vw) = gauss_legendre(v_nodes);
    let rows: Vec<f64> = ux
        .par_iter()
        .zip(uw.par_iter())
        .map(|(&xi, &wi)| {
            let u = 0.5 * xi;
            let v0 = (1.0 - u * u).sqrt();
            let mut edges = vec![v0];
            let mut e = v0.floor() + 1.0;
            while e < cfg.v_max {
                edges.push(e);
                e += 1.0;
            }
            edges.push(cfg.v_max);
            let mut row = 0.0;
            for pair in edges.windows(2) {
                let (lo, hi) = (pair[0], pair[1]);
                let half = (hi - lo) / 2.0;
                for (yj, wj) in vx.iter().zip(&vw) {
                    let v = lo + half * (yj + 1.0);
                    let tau = Complex64::new(u, v);
                    let mut dens = 0.0;
                    for comp in comps {
                        let f: Complex64 = comp
                            .terms
                            .iter()
                            .map(|(ex, c)| c * (Complex64::i() * 2.0 * PI * ex * tau).exp())
                            .sum();
                        dens += f.norm_sqr();
                    }
                    row += wj * half * dens / v;
                }
            }
            0.5 * wi * row
        })
        .collect();
    rows.iter().sum()
}

/// `int_F v |theta(tau)|^2 dmu` by tensor Gauss-Legendre quadrature on the
/// truncated fundamental domain.
pub fn petersson_numeric(
    series: &ThetaSeries,
    cfg: &QuadratureConfig,
) -> Result<PeterssonEstimate> {
    cfg.validate()?;
    let comps = components(series);
    if comps.is_empty() {
        return Ok(PeterssonEstimate {
            value: 0.0,
            error_bar: 0.0,
            truncation_bound: 0.0,
            tail: 0.0,
        });
    }
    let coeff_bound = comps
        .iter()
        .flat_map(|c| c.terms.iter().map(|t| t.1.abs()))
        .fold(1.0, f64::max);
    let v_low = 3f64.sqrt() / 2.0;

    // Each factor decays at least like its smallest exponent, so
    // int_{v_low}^inf (2 S T + T^2)/v dv <= (2 S T/(2 pi (e_S + e_T)) + T^2/(4 pi e_T)) / v_low.
    // Above height 1 the strip is a full period in u, so distinct exponents in
    // one component are orthogonal and the region v > v_max contributes
    // sum c^2 E1(4 pi q v_max) exactly.
    let mut truncation = 0.0;
    let mut tail = 0.0;
    for comp in &comps {
        let s = abs_series(comp, v_low);
        let t = truncation_series(comp, coeff_bound, v_low);
        truncation += (2.0 * s * t / (2.0 * PI * (comp.min_exp + comp.next_exp))
            + t * t / (4.0 * PI * comp.next_exp))
            / v_low;
        for (e, c) in &comp.terms {
            tail += c * c * exp_integral_e1(4.0 * PI * e * cfg.v_max);
        }
    }
    if truncation > cfg.petersson_tolerance {
        return Err(Error::PrecisionTooLow {
            bound: truncation,
            tolerance: cfg.petersson_tolerance,
        });
    }

    let fine = integrate(&comps, cfg, cfg.u_nodes, cfg.v_nodes);
    let coarse = integrate(
        &comps,
        cfg,
        cfg.u_nodes.div_ceil(2),
        cfg.v_nodes.div_ceil(2),
    );
    Ok(PeterssonEstimate {
        value: fine + tail,
        error_bar: (fine - coarse).abs() + truncation,
        truncation_bound: truncation,
        tail,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Cycle,
    Numeric,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CycleCheck {
    pub which: String,
    pub matrix: String,
    pub psi: i64,
    /// Integral primitive element with `matrix = root^power`.
    pub root: String,
    pub power: u64,
    pub root_psi: i64,
    /// `power` times the cycle integral of `root`.
    pub integral: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NumericCheck {
    pub closed_form: f64,
    pub closed_form_error: f64,
    pub numeric: PeterssonEstimate,
    pub difference: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub disc: i64,
    pub ideal: String,
    pub kappa: u64,
    pub coefficient: String,
    pub tolerance: f64,
    pub petersson_tolerance: f64,
    pub cycles: Vec<CycleCheck>,
    pub numeric: Option<NumericCheck>,
    pub pass: bool,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

fn psi_i64(p: &BigInt) -> Result<i64> {
    p.to_i64()
        .ok_or_else(|| Error::Internal(format!("Psi = {p} does not fit in i64")))
}

/// Checks `psi0`, `psi1` against cycle integrals and the closed-form norm
/// against quadrature of `series`, according to `mode`.
pub fn verify(
    report: &NormReport,
    series: Option<&ThetaSeries>,
    cfg: &QuadratureConfig,
    mode: VerifyMode,
) -> Result<Verdict> {
    cfg.validate()?;
    let mut cycles = Vec::new();
    if matches!(mode, VerifyMode::Cycle | VerifyMode::Both) {
        let ctx = FieldContext::new(report.disc)?;
        for (which, g, conj, p) in [
            ("gamma0", &report.gamma0, &report.g_kappa, &report.psi0),
            ("gamma1", &report.gamma1, &report.g_l, &report.psi1),
        ] {
            // Long geodesics come too close to the real axis for f64, so the
            // integral runs over the primitive root and Psi(root^m) = m Psi(root)
            // is checked exactly.
            let (root, power) = conjugate_root(&ctx, conj, &report.epsilon)?;
            let root_psi = psi(&root)?;
            if &root_psi * BigInt::from(power) != *p {
                return Err(Error::Internal(format!(
                    "Psi({g}) = {p} but Psi({root}) = {root_psi} with power {power}"
                )));
            }
            let root_integral = cycle_integral(&root, cfg)?;
            let root_psi = psi_i64(&root_psi)?;
            cycles.push(CycleCheck {
                which: which.to_string(),
                matrix: g.to_string(),
                psi: psi_i64(p)?,
                root: root.to_string(),
                power,
                root_psi,
                integral: power as f64 * root_integral,
                pass: (root_integral - root_psi as f64).abs() < cfg.tolerance,
            });
        }
    }
    let numeric = if matches!(mode, VerifyMode::Numeric | VerifyMode::Both) {
        let series = series
            .ok_or_else(|| Error::Internal("numeric verification needs a theta series".into()))?;
        let est = petersson_numeric(series, cfg)?;
        let difference = (est.value - report.norm_value).abs();
        Some(NumericCheck {
            closed_form: report.norm_value,
            closed_form_error: report.norm_error,
            pass: difference < cfg.petersson_tolerance,
            numeric: est,
            difference,
        })
    } else {
        None
    };
    let pass = cycles.iter().all(|c| c.pass) && numeric.as_ref().is_none_or(|n| n.pass);
    Ok(Verdict {
        disc: report.disc,
        ideal: report.ideal.to_string(),
        kappa: report.kappa,
        coefficient: rat::fmt_rational(&report.coefficient),
        tolerance: cfg.tolerance,
        petersson_tolerance: cfg.petersson_tolerance,
        cycles,
        numeric,
        pass,
    })
}
