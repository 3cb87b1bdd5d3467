//! JSON documents. Expressions travel as strings in the parser grammar.

use lie3_core::canonical::{build_canonical, CanonicalError, CanonicalParams, LinearSystem};
use lie3_core::classify::{ClassificationReport, TheoremReport, Verdict, Witness};
use lie3_core::equivalence::EquivalenceTransform;
use lie3_core::expr::{ZeroTest, Q};
use lie3_core::families::{Branch, SolutionFamily};
use lie3_core::jordan::{JordanForm, Matrix3};
use lie3_core::linalg::RatMatrix3;
use lie3_core::symmetry::{Admission, PointGenerator, SecondOrderSystem};
use lie3_core::{parse_with, Expr};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{0}")]
    Shape(String),
    #[error("expression {text:?}: {source}")]
    Expr {
        text: String,
        source: lie3_core::expr::ParseError,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn shape(msg: impl Into<String>) -> FormatError {
    FormatError::Shape(msg.into())
}

/// Opaque functions accepted in documents: the family functions, the shifts
/// and the superposition template.
pub const OPAQUE: [&str; 9] = ["f", "g", "h", "h1", "h2", "h3", "zeta1", "zeta2", "zeta3"];

pub fn expr(v: &Value) -> Result<Expr, FormatError> {
    match v {
        Value::String(s) => parse_with(s, &OPAQUE).map_err(|source| FormatError::Expr { text: s.clone(), source }),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Expr::int(i)),
            None => n
                .as_f64()
                .and_then(Q::from_float)
                .map(Expr::rational)
                .ok_or_else(|| shape(format!("bad number {n}"))),
        },
        other => Err(shape(format!("expected an expression, got {other}"))),
    }
}

pub fn rational(v: &Value) -> Result<Q, FormatError> {
    expr(v)?
        .as_rational()
        .ok_or_else(|| shape(format!("expected a rational number, got {v}")))
}

fn array<const N: usize>(v: &Value, what: &str) -> Result<[Value; N], FormatError> {
    let a = v.as_array().filter(|a| a.len() == N).ok_or_else(|| shape(format!("{what}: expected {N} entries")))?;
    Ok(core::array::from_fn(|i| a[i].clone()))
}

fn grid<T>(v: &Value, what: &str, f: impl Fn(&Value) -> Result<T, FormatError>) -> Result<[[T; 3]; 3], FormatError> {
    let rows = array::<3>(v, what)?;
    let mut out: Vec<[T; 3]> = Vec::with_capacity(3);
    for r in &rows {
        let [a, b, c] = array::<3>(r, what)?;
        out.push([f(&a)?, f(&b)?, f(&c)?]);
    }
    out.try_into().map_err(|_| shape(what.to_string()))
}

pub fn rat_matrix(v: &Value) -> Result<RatMatrix3, FormatError> {
    Ok(RatMatrix3(grid(v, "matrix", rational)?))
}

pub fn float_matrix(v: &Value) -> Result<Matrix3, FormatError> {
    let m = rat_matrix(v)?;
    Ok(Matrix3(m.0.map(|r| r.map(|e| e.to_f64().unwrap_or(f64::NAN)))))
}

pub fn exprs3(v: &Value) -> Result<[Expr; 3], FormatError> {
    let [a, b, c] = array::<3>(v, "expression triple")?;
    Ok([expr(&a)?, expr(&b)?, expr(&c)?])
}

fn s(e: &Expr) -> Value {
    Value::String(e.to_string())
}

fn f64_matrix(m: &Matrix3) -> Value {
    json!(m.0)
}

pub fn jordan_json(j: &JordanForm) -> Value {
    json!({
        "kind": j.kind.name(),
        "a": j.a, "b": j.b, "c": j.c, "d": j.d,
        "J": f64_matrix(&j.matrix()),
        "P": f64_matrix(&j.p),
        "Pinv": f64_matrix(&j.pinv),
    })
}

pub fn generator_json(g: &PointGenerator) -> Value {
    json!({ "xi": s(&g.xi), "eta": g.eta.iter().map(s).collect::<Vec<_>>() })
}

pub fn generator(v: &Value) -> Result<PointGenerator, FormatError> {
    let xi = expr(v.get("xi").ok_or_else(|| shape("generator: missing \"xi\""))?)?;
    let eta = exprs3(v.get("eta").ok_or_else(|| shape("generator: missing \"eta\""))?)?;
    PointGenerator::new(xi, eta).map_err(|e| shape(format!("generator: {e}")))
}

pub fn params_json(p: &CanonicalParams) -> Value {
    Value::Object(p.pairs().map(|(n, e)| (n.to_string(), s(e))).collect())
}

pub fn canonical_params(case: u8, v: &Value) -> Result<CanonicalParams, FormatError> {
    let obj = v.as_object().ok_or_else(|| shape("params: expected an object"))?;
    let mut pairs = Vec::new();
    for (k, val) in obj {
        pairs.push((k.as_str(), expr(val)?));
    }
    CanonicalParams::from_pairs(case, pairs).map_err(|e| shape(format!("params: {e}")))
}

/// A parsed system document.
#[derive(Clone, Debug)]
pub enum SystemDoc {
    Linear(LinearSystem),
    General(SecondOrderSystem),
}

impl SystemDoc {
    pub fn system(&self) -> SecondOrderSystem {
        match self {
            SystemDoc::Linear(l) => l.to_system(),
            SystemDoc::General(s) => s.clone(),
        }
    }

    pub fn linear(&self) -> Option<LinearSystem> {
        match self {
            SystemDoc::Linear(l) => Some(l.clone()),
            SystemDoc::General(s) => LinearSystem::from_system(s),
        }
    }
}

/// Linear, general, or canonical-spec system documents.
pub fn system(v: &Value) -> Result<SystemDoc, FormatError> {
    if let Some(case) = v.get("case") {
        let case = case.as_u64().and_then(|c| u8::try_from(c).ok()).ok_or_else(|| shape("case: expected 1..4"))?;
        let p = canonical_params(case, v.get("params").unwrap_or(&json!({})))?;
        let (l, _) = build_canonical(&p).map_err(|e: CanonicalError| shape(e.to_string()))?;
        return Ok(SystemDoc::Linear(l));
    }
    match v.get("kind").and_then(Value::as_str) {
        Some("linear") => {
            let c = grid(v.get("C").ok_or_else(|| shape("system: missing \"C\""))?, "C", expr)?;
            LinearSystem::new(c).map(SystemDoc::Linear).map_err(|e| shape(e.to_string()))
        }
        Some("general") => {
            let get = |k: &str| v.get(k).ok_or_else(|| shape(format!("system: missing {k:?}"))).and_then(expr);
            SecondOrderSystem::new([get("F")?, get("G")?, get("H")?])
                .map(SystemDoc::General)
                .map_err(|e| shape(e.to_string()))
        }
        _ => Err(shape("system: \"kind\" must be \"linear\" or \"general\"")),
    }
}

pub fn linear_json(l: &LinearSystem) -> Value {
    json!({ "kind": "linear", "C": l.c.iter().map(|r| r.iter().map(s).collect::<Vec<_>>()).collect::<Vec<_>>() })
}

pub fn system_json(sys: &SecondOrderSystem) -> Value {
    match LinearSystem::from_system(sys) {
        Some(l) => linear_json(&l),
        None => json!({ "kind": "general", "F": s(&sys.rhs[0]), "G": s(&sys.rhs[1]), "H": s(&sys.rhs[2]) }),
    }
}

pub fn transform(v: &Value) -> Result<EquivalenceTransform, FormatError> {
    let get = |k: &str| v.get(k).ok_or_else(|| shape(format!("transform: missing {k:?}")));
    match v.get("kind").and_then(Value::as_str) {
        Some("linear") => EquivalenceTransform::linear(rat_matrix(get("P")?)?).map_err(|e| shape(e.to_string())),
        Some("shift") => Ok(EquivalenceTransform::shift(exprs3(get("phi")?)?)),
        Some("reparam") => {
            EquivalenceTransform::reparam(expr(get("phi")?)?, expr(get("psi")?)?).map_err(|e| shape(e.to_string()))
        }
        _ => Err(shape("transform: \"kind\" must be linear, shift or reparam")),
    }
}

pub fn transform_json(t: &EquivalenceTransform) -> Value {
    match t {
        EquivalenceTransform::LinearChange(p) => {
            json!({ "kind": "linear", "P": p.0.iter().map(|r| r.iter().map(|q| q.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>() })
        }
        EquivalenceTransform::Shift(phi) => json!({ "kind": "shift", "phi": phi.iter().map(s).collect::<Vec<_>>() }),
        EquivalenceTransform::Reparam { phi, psi } => json!({ "kind": "reparam", "phi": s(phi), "psi": s(psi) }),
    }
}

pub fn family_json(f: &SolutionFamily) -> Value {
    let [sv, v, w] = &f.invariants;
    let subcase = match f.branch {
        Branch::XiNonzero => format!("{}: xi!=0", f.kind().name()),
        Branch::XiZero(sub) => sub.tag(),
    };
    json!({
        "invariants": { "s": s(sv), "v": s(v), "w": s(w) },
        "F": s(&f.templates[0]),
        "G": s(&f.templates[1]),
        "H": s(&f.templates[2]),
        "generator": generator_json(&f.generator),
        "subcase": subcase,
    })
}

fn test_name(t: ZeroTest) -> &'static str {
    match t {
        ZeroTest::Symbolic => "symbolic",
        ZeroTest::Numeric => "numeric",
        ZeroTest::NonZero => "nonzero",
    }
}

pub fn admission_json(a: &Admission, g: &PointGenerator, residual_max_abs: f64) -> Value {
    json!({
        "admitted": a.admitted,
        "symbolic": a.symbolic(),
        "tests": a.tests.map(test_name),
        "residuals": a.residuals.iter().map(s).collect::<Vec<_>>(),
        "residual_max_abs": finite(residual_max_abs),
        "generator": generator_json(g),
    })
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn witness_json(w: &Witness) -> Value {
    json!({ "generator": generator_json(&w.generator), "residual_max_abs": finite(w.residual_max_abs), "symbolic": w.symbolic })
}

pub fn classification_json(r: &ClassificationReport) -> Value {
    let (verdict, case, class) = match &r.verdict {
        Verdict::CanonicalCase(k) => ("canonical-case", json!(k), Value::Null),
        Verdict::Degenerate(c) => ("degenerate", Value::Null, json!(c.name())),
        Verdict::TrivialOnly => ("trivial-only", Value::Null, Value::Null),
        Verdict::Unclassified => ("unclassified", Value::Null, Value::Null),
    };
    let first = r.witnesses.first();
    let mut m = Map::new();
    m.insert("verdict".into(), json!(verdict));
    m.insert("case".into(), case);
    m.insert("class".into(), class);
    m.insert("params".into(), r.params.as_ref().map_or(Value::Null, params_json));
    m.insert("residual_max_abs".into(), first.map_or(Value::Null, |w| finite(w.residual_max_abs)));
    m.insert("generator".into(), first.map_or(Value::Null, |w| generator_json(&w.generator)));
    m.insert("witnesses".into(), r.witnesses.iter().map(witness_json).collect());
    m.insert("notes".into(), json!(r.notes));
    Value::Object(m)
}

pub fn theorem_json(r: &TheoremReport) -> Value {
    let cases: Vec<Value> = r
        .cases
        .iter()
        .map(|c| {
            json!({
                "case": c.case,
                "draws": c.draws,
                "symbolic": c.symbolic,
                "numeric_only": c.numeric_only,
                "passed": c.symbolic == c.draws,
                "failures": c.failures.iter().map(|f| json!({
                    "index": f.index,
                    "params": params_json(&f.params),
                    "tests": f.tests.map(test_name),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "seed": r.seed, "draws": r.draws, "checks": r.checks(), "passed": r.passed(), "cases": cases })
}
