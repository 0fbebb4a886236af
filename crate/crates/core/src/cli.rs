//! Command-line front end.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::norm::{closed_form_norm_for, NormReport};
use crate::oracles::{verify, QuadratureConfig, Verdict, VerifyMode};
use crate::quadfield::{
    fundamental_discriminants, fundamental_unit, totally_positive_fundamental_unit, FieldContext,
    QuadLattice,
};
use crate::rademacher::{psi_breakdown, DedekindMethod, IntMatrix2};
use crate::rat::{fmt_rational, parse_rational, Rational};
use crate::theta::HeckeLattice;

/// Environment variable holding the default theta precision.
pub const PREC_ENV: &str = "HECKE_NORM_PREC";

#[derive(Parser, Debug)]
#[command(
    name = "hecke-norm",
    version,
    about = "Petersson norms of Hecke theta series for real quadratic fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rademacher symbol of an SL2(Z) matrix.
    Psi {
        /// Matrix as "a,b;c,d".
        #[arg(short, long, allow_hyphen_values = true)]
        matrix: String,
        /// Also print the Dedekind sum and each term.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Fundamental unit, totally positive unit and eps_kappa.
    Unit {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long)]
        json: bool,
    },
    /// q-expansion of the vector-valued theta series.
    Theta {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        prec: PrecArg,
        #[arg(long)]
        json: bool,
    },
    /// Closed-form Petersson norm.
    Norm {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Also run the numerical oracles.
        #[arg(long, value_enum)]
        verify: Option<ModeArg>,
        #[command(flatten)]
        prec: PrecArg,
        #[arg(long)]
        json: bool,
    },
    /// Compare the closed form with both numerical oracles.
    Verify {
        #[command(flatten)]
        lattice: LatticeArgs,
        /// Gauss-Legendre nodes per panel for cycle integrals.
        #[arg(long)]
        nodes: Option<usize>,
        #[command(flatten)]
        prec: PrecArg,
        /// Tolerance for the Petersson comparison.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// CSV table over all fundamental discriminants up to a bound.
    Batch {
        #[arg(long)]
        dmax: i64,
        /// Run the cycle-integral check on every row.
        #[arg(long)]
        verify: bool,
        /// Write the table here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct LatticeArgs {
    /// Fundamental discriminant.
    #[arg(long)]
    pub disc: i64,
    /// "ring", "different", or a triple "a,b,d".
    #[arg(long, default_value = "ring", allow_hyphen_values = true)]
    pub ideal: String,
    #[arg(long, default_value_t = 1)]
    pub kappa: u64,
}

#[derive(Args, Debug, Clone)]
pub struct PrecArg {
    /// Largest q-exponent kept, as a rational.
    #[arg(long, env = PREC_ENV, default_value = "6")]
    pub prec: String,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    Cycle,
    Numeric,
    Both,
}

impl From<ModeArg> for VerifyMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Cycle => VerifyMode::Cycle,
            ModeArg::Numeric => VerifyMode::Numeric,
            ModeArg::Both => VerifyMode::Both,
        }
    }
}

/// `"ring"`, `"different"`, or the canonical triple `"a,b,d"` with rational entries.
pub fn parse_ideal(s: &str, ctx: &FieldContext) -> Result<QuadLattice> {
    match s.trim() {
        "ring" => return Ok(ctx.ring().clone()),
        "different" => return Ok(ctx.different()),
        _ => {}
    }
    let mut parts = Vec::with_capacity(3);
    let mut pos = 0;
    for piece in s.split(',') {
        parts.push(parse_rational(piece, pos)?);
        pos += piece.len() + 1;
    }
    if parts.len() != 3 {
        return Err(Error::Parse {
            pos: 0,
            msg: format!(
                "expected `ring`, `different` or `a,b,d`, got {} entries",
                parts.len()
            ),
        });
    }
    let d = parts.pop().expect("three entries");
    let b = parts.pop().expect("three entries");
    let a = parts.pop().expect("three entries");
    QuadLattice::new(a, b, d)
}

fn parse_prec(p: &PrecArg) -> Result<Rational> {
    parse_rational(&p.prec, 0)
}

fn build(args: &LatticeArgs) -> Result<HeckeLattice> {
    let ctx = FieldContext::new(args.disc)?;
    let ideal = parse_ideal(&args.ideal, &ctx)?;
    HeckeLattice::new(&ctx, &ideal, args.kappa)
}

/// Exit code for an error: 2 when a mathematical check failed, 1 for bad input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::IntegralityViolation { .. } | Error::Internal(_) => 2,
        _ => 1,
    }
}

/// Parses the process arguments and runs.
pub fn main_entry() -> i32 {
    // clap exits with 2 on usage errors; 2 is reserved for failed verification
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(&cli, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs one command; returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io_err(e: io::Error) -> Error {
    Error::Internal(format!("output failed: {e}"))
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Psi { matrix, verbose } => {
            let m: IntMatrix2 = matrix.parse()?;
            let br = psi_breakdown(&m, DedekindMethod::Reciprocity)?;
            if !crate::rat::is_integer(&br.value) {
                return Err(Error::Internal(format!(
                    "Psi({m}) = {} is not an integer",
                    fmt_rational(&br.value)
                )));
            }
            if *verbose {
                if m.c.is_zero() {
                    writeln!(out, "c = 0: Psi = b/d = {}", fmt_rational(&br.value))
                        .map_err(io_err)?;
                } else {
                    writeln!(
                        out,
                        "s(a, |c|)          = {}",
                        fmt_rational(&br.dedekind_sum)
                    )
                    .map_err(io_err)?;
                    writeln!(out, "(a + d)/c          = {}", fmt_rational(&br.trace_term))
                        .map_err(io_err)?;
                    writeln!(
                        out,
                        "-12 sgn(c) s(a,|c|) = {}",
                        fmt_rational(&br.dedekind_term)
                    )
                    .map_err(io_err)?;
                    writeln!(out, "-3 sgn(c(a + d))   = {}", fmt_rational(&br.sign_term))
                        .map_err(io_err)?;
                }
            }
            writeln!(out, "{}", fmt_rational(&br.value)).map_err(io_err)?;
            Ok(0)
        }
        Command::Unit { lattice, json } => {
            let hl = build(lattice)?;
            let fu = fundamental_unit(&hl.ctx);
            let tp = totally_positive_fundamental_unit(&hl.ctx);
            let (ln, ln_err) = hl.epsilon.ln();
            if *json {
                let v = json!({
                    "disc": hl.ctx.disc(),
                    "fundamentalUnit": fu.value.to_string(),
                    "fundamentalNormSign": fu.norm_sign,
                    "totallyPositiveUnit": tp.value.to_string(),
                    "epsilonKappa": hl.epsilon.value.to_string(),
                    "powerIndex": hl.epsilon.power_index,
                    "logEpsilon": ln,
                    "logError": ln_err,
                });
                writeln!(out, "{v}").map_err(io_err)?;
            } else {
                writeln!(
                    out,
                    "fundamental unit    = {} (norm {})",
                    fu.value, fu.norm_sign
                )
                .map_err(io_err)?;
                writeln!(out, "totally positive    = {}", tp.value).map_err(io_err)?;
                writeln!(
                    out,
                    "eps_kappa           = {} (power {} of the fundamental unit)",
                    hl.epsilon.value, hl.epsilon.power_index
                )
                .map_err(io_err)?;
                writeln!(out, "log eps_kappa       = {ln:.15} (+/- {ln_err:.1e})")
                    .map_err(io_err)?;
            }
            Ok(0)
        }
        Command::Theta {
            lattice,
            prec,
            json,
        } => {
            let hl = build(lattice)?;
            let series = hl.theta_expansion(&parse_prec(prec)?)?;
            if *json {
                writeln!(out, "{}", series.to_json()).map_err(io_err)?;
            } else {
                writeln!(
                    out,
                    "{} cosets, precision {}",
                    series.cosets.len(),
                    fmt_rational(&series.precision)
                )
                .map_err(io_err)?;
                for (i, c) in series.cosets.iter().enumerate() {
                    if c.terms.is_empty() {
                        continue;
                    }
                    let terms: Vec<String> = c
                        .terms
                        .iter()
                        .map(|(e, k)| format!("{k:+} q^{}", fmt_rational(e)))
                        .collect();
                    writeln!(out, "[{i}] {}: {}", c.rep, terms.join(" ")).map_err(io_err)?;
                }
                if series.is_zero() {
                    writeln!(out, "all components vanish").map_err(io_err)?;
                }
            }
            Ok(0)
        }
        Command::Norm {
            lattice,
            verify: mode,
            prec,
            json,
        } => {
            let hl = build(lattice)?;
            let report = closed_form_norm_for(&hl)?;
            let verdict = match mode {
                None => None,
                Some(m) => Some(run_verify(
                    &hl,
                    &report,
                    (*m).into(),
                    &parse_prec(prec)?,
                    &QuadratureConfig::default(),
                )?),
            };
            if *json {
                match &verdict {
                    None => writeln!(out, "{}", report.to_json()).map_err(io_err)?,
                    Some(v) => {
                        let report_value: serde_json::Value =
                            serde_json::from_str(&report.to_json()).expect("own output parses");
                        let both = json!({ "report": report_value, "verdict": v });
                        writeln!(out, "{both}").map_err(io_err)?;
                    }
                }
            } else {
                print_report(out, &report)?;
                if let Some(v) = &verdict {
                    print_verdict(out, v)?;
                }
            }
            Ok(if verdict.is_some_and(|v| !v.pass) {
                2
            } else {
                0
            })
        }
        Command::Verify {
            lattice,
            nodes,
            prec,
            tol,
            json,
        } => {
            let hl = build(lattice)?;
            let report = closed_form_norm_for(&hl)?;
            let mut cfg = QuadratureConfig::default();
            if let Some(n) = nodes {
                cfg.gauss_nodes = *n;
            }
            if let Some(t) = tol {
                cfg.petersson_tolerance = *t;
            }
            let v = run_verify(&hl, &report, VerifyMode::Both, &parse_prec(prec)?, &cfg)?;
            if *json {
                writeln!(out, "{}", serde_json::to_string(&v).expect("plain data"))
                    .map_err(io_err)?;
            } else {
                print_verdict(out, &v)?;
            }
            Ok(if v.pass { 0 } else { 2 })
        }
        Command::Batch {
            dmax,
            verify,
            out: path,
        } => {
            let table = batch_csv(*dmax, *verify)?;
            match path {
                Some(p) => {
                    let mut f = File::create(p).map_err(io_err)?;
                    f.write_all(table.text.as_bytes()).map_err(io_err)?;
                }
                None => out.write_all(table.text.as_bytes()).map_err(io_err)?,
            }
            Ok(if table.all_verified { 0 } else { 2 })
        }
    }
}

fn run_verify(
    hl: &HeckeLattice,
    report: &NormReport,
    mode: VerifyMode,
    prec: &Rational,
    cfg: &QuadratureConfig,
) -> Result<Verdict> {
    let series = match mode {
        VerifyMode::Cycle => None,
        _ => Some(hl.theta_expansion(prec)?),
    };
    verify(report, series.as_ref(), cfg, mode)
}

fn print_report(out: &mut dyn Write, r: &NormReport) -> Result<()> {
    let mut lines = vec![
        format!("D = {}, ideal = {}, kappa = {}", r.disc, r.ideal, r.kappa),
        format!(
            "eps_kappa = {} (power {} of the fundamental unit)",
            r.epsilon.value, r.epsilon.power_index
        ),
        format!("g_kappa = {}", r.g_kappa),
        format!("g_L = {}", r.g_l),
        format!(
            "gamma_Dk = {}{}",
            r.gamma_dk,
            if r.gamma_dk_integral {
                ""
            } else {
                " (half-integral)"
            }
        ),
        format!("gamma0 = {}, Psi = {}", r.gamma0, r.psi0),
        format!("gamma1 = {}, Psi = {}", r.gamma1, r.psi1),
        format!("coefficient = {}", fmt_rational(&r.coefficient)),
        format!("norm = {:.12} (+/- {:.1e})", r.norm_value, r.norm_error),
    ];
    if r.vanishes {
        lines.push("theta vanishes".into());
    }
    for l in lines {
        writeln!(out, "{l}").map_err(io_err)?;
    }
    Ok(())
}

fn print_verdict(out: &mut dyn Write, v: &Verdict) -> Result<()> {
    for c in &v.cycles {
        writeln!(
            out,
            "cycle {}: {} = ({})^{} Psi = {} integral = {:.10} {}",
            c.which,
            c.matrix,
            c.root,
            c.power,
            c.psi,
            c.integral,
            if c.pass { "ok" } else { "MISMATCH" }
        )
        .map_err(io_err)?;
    }
    if let Some(n) = &v.numeric {
        writeln!(
            out,
            "petersson: closed form {:.10}, numeric {:.10} +/- {:.1e}, difference {:.1e} {}",
            n.closed_form,
            n.numeric.value,
            n.numeric.error_bar,
            n.difference,
            if n.pass { "ok" } else { "MISMATCH" }
        )
        .map_err(io_err)?;
    }
    writeln!(out, "{}", v.label()).map_err(io_err)?;
    Ok(())
}

pub struct BatchTable {
    pub text: String,
    pub all_verified: bool,
}

pub const BATCH_HEADER: &str = "D,ideal,kappa,epsilon,psi0,psi1,coefficient,normValue,verified";

/// Closed form for every fundamental `D <= dmax`, ideal in {ring, different}, `kappa <= 3`.
/// Rows are computed in parallel and emitted in input order.
pub fn batch_csv(dmax: i64, check_cycles: bool) -> Result<BatchTable> {
    let mut jobs = Vec::new();
    for d in fundamental_discriminants(dmax) {
        for name in ["ring", "different"] {
            for kappa in 1..=3u64 {
                jobs.push((d, name, kappa));
            }
        }
    }
    let cfg = QuadratureConfig::default();
    let rows: Vec<Result<(String, bool)>> = jobs
        .par_iter()
        .map(|&(d, name, kappa)| {
            let ctx = FieldContext::new(d)?;
            let ideal = parse_ideal(name, &ctx)?;
            let hl = HeckeLattice::new(&ctx, &ideal, kappa)?;
            let r = closed_form_norm_for(&hl)?;
            let (verified, ok) = if check_cycles {
                let v = verify(&r, None, &cfg, VerifyMode::Cycle)?;
                (if v.pass { "yes" } else { "no" }, v.pass)
            } else {
                ("skipped", true)
            };
            let ok = ok && !r.coefficient.is_negative();
            Ok((
                format!(
                    "{},{},{},{},{},{},{},{:.12},{}",
                    d,
                    name,
                    kappa,
                    r.epsilon.value,
                    r.psi0,
                    r.psi1,
                    fmt_rational(&r.coefficient),
                    r.norm_value,
                    verified
                ),
                ok,
            ))
        })
        .collect();
    let mut text = String::from(BATCH_HEADER);
    text.push('\n');
    let mut all_verified = true;
    for row in rows {
        let (line, ok) = row?;
        all_verified &= ok;
        text.push_str(&line);
        text.push('\n');
    }
    Ok(BatchTable { text, all_verified })
}
