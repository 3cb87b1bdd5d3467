//! `lie3` command line. JSON on stdout, diagnostics on stderr.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use lie3_core::canonical::{build_canonical, param_names, CanonicalParams};
use lie3_core::classify::{classify_by_matrix, fit_canonical, residual_max_abs, snap};
use lie3_core::equivalence::{pushforward, transform_system};
use lie3_core::families::{xi_nonzero_family, xi_zero_family, JordanParams, Subcase, XiZeroData};
use lie3_core::jordan::{jordanize, JordanKind};
use lie3_core::symmetry::check_admitted;
use lie3_core::Expr;
use serde_json::{json, Value};

use crate::json::{self, FormatError};
use crate::theorem_suite_parallel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "lie3", version, about = "Point symmetries of linear systems of three second-order ODEs")]
struct Cli {
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BranchArg {
    XiNonzero,
    XiZero,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Real Jordan form of a 3x3 matrix.
    Jordan {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Canonical system of a case and its generator. Missing parameters stay symbolic.
    Canonical {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        case: u8,
        #[arg(long, default_value = "{}")]
        params: String,
    },
    /// Check that a generator is admitted by a system.
    Verify {
        #[arg(long)]
        system: String,
        #[arg(long)]
        generator: String,
        #[arg(long, env = "LIE3_SEED", default_value_t = 42)]
        seed: u64,
    },
    /// Fit a linear system to the canonical forms, or classify a constant matrix.
    Classify {
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        system: Option<String>,
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Solution family of the determining equations.
    Family {
        #[arg(long, value_enum)]
        branch: BranchArg,
        /// `{"kind":"J1","a":..}` or a 3x3 matrix.
        #[arg(long)]
        jordan: String,
        #[arg(long)]
        subcase: Option<String>,
        #[arg(long)]
        shifts: Option<String>,
    },
    /// Apply an equivalence transformation to a system, and optionally a generator.
    Transform {
        #[arg(long)]
        system: String,
        #[arg(long)]
        transform: String,
        #[arg(long)]
        generator: Option<String>,
    },
    /// Admission checks of the canonical generators on random systems.
    Theorem {
        #[arg(long, env = "LIE3_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        draws: u64,
    },
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn compute<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Compute(e.to_string())
}

/// Inline JSON, or the path of a file holding it.
fn load(arg: &str) -> Result<Value, Failure> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{arg}: {e}")))
}

pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli.cmd) {
        Ok((doc, code)) => {
            let text = if cli.pretty { serde_json::to_string_pretty(&doc) } else { serde_json::to_string(&doc) };
            let _ = writeln!(out, "{}", text.expect("serializable"));
            code
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Compute(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_COMPUTE
        }
    }
}

fn execute(cmd: Command) -> Result<(Value, i32), Failure> {
    match cmd {
        Command::Jordan { matrix, tol } => {
            let m = json::float_matrix(&load(&matrix)?)?;
            let j = jordanize(&m, tol).map_err(compute)?;
            Ok((json::jordan_json(&j), EXIT_OK))
        }
        Command::Canonical { case, params } => {
            let p = canonical(case, &load(&params)?)?;
            let (l, g) = build_canonical(&p).map_err(compute)?;
            let doc = json!({
                "case": case,
                "params": json::params_json(&p),
                "system": json::linear_json(&l),
                "generator": json::generator_json(&g),
            });
            Ok((doc, EXIT_OK))
        }
        Command::Verify { system, generator, seed } => {
            let sys = json::system(&load(&system)?)?;
            let g = json::generator(&load(&generator)?)?;
            let adm = check_admitted(&g, &sys.system(), seed).map_err(compute)?;
            let norm = if adm.symbolic() { 0.0 } else { residual_max_abs(&adm.residuals) };
            let code = if adm.admitted { EXIT_OK } else { EXIT_FAIL };
            Ok((json::admission_json(&adm, &g, norm), code))
        }
        Command::Classify { system: Some(system), .. } => {
            let sys = json::system(&load(&system)?)?;
            let l = sys.linear().ok_or_else(|| Failure::Compute("system is not linear in y, z, u".into()))?;
            let rep = fit_canonical(&l).map_err(compute)?;
            Ok((json::classification_json(&rep), EXIT_OK))
        }
        Command::Classify { matrix, .. } => {
            let m = json::float_matrix(&load(matrix.as_deref().unwrap_or_default())?)?;
            let tc = classify_by_matrix(&m).map_err(compute)?;
            let doc = json!({
                "case": tc.case,
                "jordan": json::jordan_json(&tc.jordan),
                "params": json::params_json(&tc.params),
                "generator": json::generator_json(&tc.generator),
            });
            Ok((doc, EXIT_OK))
        }
        Command::Family { branch, jordan, subcase, shifts } => family(branch, &load(&jordan)?, subcase, shifts),
        Command::Transform { system, transform, generator } => {
            let sys = json::system(&load(&system)?)?;
            let t = json::transform(&load(&transform)?)?;
            let s2 = transform_system(&t, &sys.system()).map_err(compute)?;
            let g2 = match generator {
                Some(g) => {
                    let g = json::generator(&load(&g)?)?;
                    json::generator_json(&pushforward(&t, &g).map_err(compute)?)
                }
                None => Value::Null,
            };
            Ok((json!({ "system": json::system_json(&s2), "generator": g2 }), EXIT_OK))
        }
        Command::Theorem { seed, draws } => {
            let rep = theorem_suite_parallel(seed, draws).map_err(compute)?;
            let code = if rep.passed() { EXIT_OK } else { EXIT_FAIL };
            Ok((json::theorem_json(&rep), code))
        }
    }
}

/// Given entries, with the rest left as symbols of their own names; case 4
/// has `alpha = 0` unless stated.
fn canonical(case: u8, v: &Value) -> Result<CanonicalParams, Failure> {
    let obj = v.as_object().ok_or_else(|| Failure::Usage("params: expected an object".into()))?;
    let names = param_names(case).unwrap_or_default();
    if let Some(k) = obj.keys().find(|k| !names.contains(&k.as_str())) {
        return Err(Failure::Usage(format!("params: case {case} has no parameter {k:?}; expected {names:?}")));
    }
    let mut pairs = Vec::new();
    for n in names {
        let default = if (case, *n) == (4, "alpha") { Expr::zero() } else { Expr::sym(n) };
        pairs.push((*n, obj.get(*n).map(json::expr).transpose()?.unwrap_or(default)));
    }
    CanonicalParams::from_pairs(case, pairs).map_err(compute)
}

fn kind_of(name: &str) -> Result<JordanKind, Failure> {
    match name.trim() {
        "J1" | "1" => Ok(JordanKind::J1),
        "J2" | "2" => Ok(JordanKind::J2),
        "J3" | "3" => Ok(JordanKind::J3),
        "J4" | "4" => Ok(JordanKind::J4),
        other => Err(Failure::Usage(format!("unknown Jordan kind {other:?}"))),
    }
}

/// Names forced to zero by a subcase label such as `a=0,b!=0,h1=0`.
fn zeroed(label: &str) -> Vec<&str> {
    label.split(',').filter(|p| !p.contains("!=")).filter_map(|p| p.trim().strip_suffix("=0")).collect()
}

fn jordan_params(v: &Value, zero: &[&str]) -> Result<JordanParams, Failure> {
    if v.is_array() {
        let j = jordanize(&json::float_matrix(v)?, None).map_err(compute)?;
        let q = |v: f64| Expr::rational(snap(v));
        return Ok(JordanParams { kind: j.kind, a: q(j.a), b: q(j.b), c: q(j.c), d: q(j.d) });
    }
    let kind = kind_of(v.get("kind").and_then(Value::as_str).ok_or_else(|| Failure::Usage("jordan: missing \"kind\"".into()))?)?;
    let mut p = JordanParams::symbolic(kind);
    for (name, slot) in [("a", &mut p.a), ("b", &mut p.b), ("c", &mut p.c), ("d", &mut p.d)] {
        match v.get(name) {
            Some(val) => *slot = json::expr(val)?,
            None if zero.contains(&name) => *slot = Expr::zero(),
            None => {}
        }
    }
    Ok(p)
}

fn family(branch: BranchArg, jordan: &Value, subcase: Option<String>, shifts: Option<String>) -> Result<(Value, i32), Failure> {
    let fam = match branch {
        BranchArg::XiNonzero => xi_nonzero_family(&jordan_params(jordan, &[])?).map_err(compute)?,
        BranchArg::XiZero => {
            let tag = subcase.ok_or_else(|| Failure::Usage("--subcase is required for the xi-zero branch".into()))?;
            let label = tag.split_once(':').map_or(tag.as_str(), |(_, l)| l).to_string();
            let zero = zeroed(&label);
            let params = jordan_params(jordan, &zero)?;
            let sub = Subcase::from_label(params.kind, &label).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut data = XiZeroData::opaque_shift(params);
            match shifts {
                Some(sh) => data.h = json::exprs3(&load(&sh)?)?,
                None => {
                    for (i, h) in ["h1", "h2", "h3"].iter().enumerate() {
                        if zero.contains(h) {
                            data.h[i] = Expr::zero();
                        }
                    }
                }
            }
            xi_zero_family(&data, sub).map_err(compute)?
        }
    };
    Ok((json::family_json(&fam), EXIT_OK))
}
