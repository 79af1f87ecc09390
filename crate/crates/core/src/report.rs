//! Run reports: JSON with 17 significant digits and a plain-text rendering.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Duration;

use serde_json::{json, Map, Number, Value};

use crate::bnb::{Normalized, Problem, SolveReport};
use crate::pbc::{extend_lagrangian, ExponentStrategy, MaxSource, VarBox};
use crate::poly::{classify_support, is_st_polynomial, Exponent, Polynomial, StReason};
use crate::relax::{build_lagrangian, BoundResult, RelaxStatus};

/// JSON number with 17 significant digits; infinities become `"+inf"` and
/// `"-inf"`.
pub fn num(v: f64) -> Value {
    if v.is_nan() {
        Value::String("nan".into())
    } else if v == f64::INFINITY {
        Value::String("+inf".into())
    } else if v == f64::NEG_INFINITY {
        Value::String("-inf".into())
    } else {
        Value::Number(Number::from_str(&format!("{v:.16e}")).expect("valid number"))
    }
}

fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

fn exps<'a>(es: impl IntoIterator<Item = &'a Exponent>) -> Value {
    Value::Array(es.into_iter().map(|e| json!(e.entries())).collect())
}

fn secs(d: Duration) -> Value {
    num(d.as_secs_f64())
}

/// Shortest display of a float for the text rendering.
fn show(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v > 0.0 {
        "+inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub json: Value,
    pub text: String,
}

impl Report {
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("serializable report");
        s.push('\n');
        s
    }
}

/// Drops `timings` objects, which are the only nondeterministic fields.
pub fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("timings");
            m.values_mut().for_each(strip_timings);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

pub struct BoundRun<'a> {
    pub problem: &'a Problem,
    pub normalized: &'a Normalized,
    pub strategy: ExponentStrategy,
    pub use_pbc: bool,
    pub result: &'a BoundResult,
    pub interval: Option<(f64, f64)>,
    pub grid: Option<GridCheck>,
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridCheck {
    pub step: f64,
    /// `None` when no grid point is feasible.
    pub minimum: Option<f64>,
    pub sound: bool,
}

fn grid_json(g: &Option<GridCheck>) -> Value {
    match g {
        None => Value::Null,
        Some(g) => json!({
            "step": num(g.step),
            "minimum": g.minimum.map(num).unwrap_or(Value::Null),
            "sound": g.sound,
        }),
    }
}

fn header(mode: &str, p: &Problem, n: &Normalized) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("instance".into(), json!(p.name));
    m.insert("mode".into(), json!(mode));
    m.insert("variables".into(), json!(n.problem.names));
    m.insert("relaxation_enabled".into(), json!(n.sonc_enabled));
    m.insert("normalization".into(), json!(n.notes));
    m
}

pub fn bound_report(run: &BoundRun<'_>) -> Report {
    let r = run.result;
    let mut m = header("bound", run.problem, run.normalized);
    m.insert("strategy".into(), json!(run.strategy.name()));
    m.insert("pbc".into(), json!(run.use_pbc));
    m.insert("status".into(), json!(r.status.name()));
    m.insert("bound".into(), num(r.bound));
    m.insert(
        "interval_bound".into(),
        run.interval.map(|(lo, _)| num(lo)).unwrap_or(Value::Null),
    );
    m.insert(
        "strategy_used".into(),
        r.strategy.map(|s| json!(s.name())).unwrap_or(Value::Null),
    );
    m.insert("pb_constraints".into(), json!(r.pb_constraints));
    m.insert(
        "formulation".into(),
        r.formulation
            .map(|f| json!(format!("{f:?}").to_lowercase()))
            .unwrap_or(Value::Null),
    );
    m.insert("pieces".into(), json!(r.pieces));
    m.insert(
        "gp".into(),
        match &r.gp_solution {
            None => Value::Null,
            Some(s) => json!({
                "status": format!("{:?}", s.status).to_lowercase(),
                "iterations": s.iterations,
                "objective": num(s.objective_value),
            }),
        },
    );
    m.insert("notes".into(), json!(r.notes));
    m.insert("grid_oracle".into(), grid_json(&run.grid));
    m.insert("timings".into(), json!({ "total_s": secs(run.elapsed) }));

    let mut t = String::new();
    let name = if run.problem.name.is_empty() {
        "-"
    } else {
        &run.problem.name
    };
    let _ = writeln!(t, "instance   {name}");
    let _ = writeln!(
        t,
        "strategy   {}{}",
        run.strategy,
        if run.use_pbc {
            ""
        } else {
            " (bound constraints off)"
        }
    );
    let _ = writeln!(t, "status     {}", r.status);
    let _ = writeln!(t, "bound      {}", show(r.bound));
    if let Some((lo, _)) = run.interval {
        let _ = writeln!(t, "interval   {}", show(lo));
    }
    if r.pb_constraints > 0 {
        let _ = writeln!(t, "pb         {} constraint(s)", r.pb_constraints);
    }
    if let Some(g) = &run.grid {
        let _ = writeln!(
            t,
            "grid       min {} (step {}) {}",
            g.minimum
                .map(show)
                .unwrap_or_else(|| "none feasible".into()),
            g.step,
            if g.sound { "sound" } else { "VIOLATED" }
        );
    }
    for note in run.normalized.notes.iter().chain(&r.notes) {
        let _ = writeln!(t, "note       {note}");
    }
    let _ = writeln!(t, "time       {:.3}s", run.elapsed.as_secs_f64());
    Report {
        json: Value::Object(m),
        text: t,
    }
}

pub fn solve_report(
    problem: &Problem,
    n: &Normalized,
    strategy: ExponentStrategy,
    use_pbc: bool,
    s: &SolveReport,
) -> Report {
    let mut m = header("solve", problem, n);
    m.insert("strategy".into(), json!(strategy.name()));
    m.insert("pbc".into(), json!(use_pbc));
    m.insert("status".into(), json!(s.status.name()));
    m.insert("primal".into(), num(s.primal));
    m.insert("dual".into(), num(s.dual));
    m.insert("gap".into(), num(s.gap()));
    m.insert("nodes".into(), json!(s.nodes_processed));
    m.insert(
        "incumbent".into(),
        s.incumbent.as_deref().map(nums).unwrap_or(Value::Null),
    );
    m.insert("root_interval_bound".into(), num(s.root_interval.0));
    m.insert(
        "root_relaxation".into(),
        match &s.root_relaxation {
            None => Value::Null,
            Some(r) => json!({ "status": r.status.name(), "bound": num(r.bound) }),
        },
    );
    let calls: Map<String, Value> = RelaxStatus::ALL
        .iter()
        .map(|st| {
            (
                st.name().to_string(),
                json!(s.relax_calls.get(st).copied().unwrap_or(0)),
            )
        })
        .collect();
    m.insert("relax_calls".into(), Value::Object(calls));
    m.insert("timings".into(), json!({ "total_s": secs(s.wall_time) }));

    let mut t = String::new();
    let name = if problem.name.is_empty() {
        "-"
    } else {
        &problem.name
    };
    let _ = writeln!(t, "instance   {name}");
    let _ = writeln!(t, "status     {}", s.status);
    let _ = writeln!(t, "primal     {}", show(s.primal));
    let _ = writeln!(t, "dual       {}", show(s.dual));
    let _ = writeln!(t, "gap        {}", show(s.gap()));
    let _ = writeln!(t, "nodes      {}", s.nodes_processed);
    if let Some(x) = &s.incumbent {
        let pts: Vec<String> = n
            .problem
            .names
            .iter()
            .zip(x)
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        let _ = writeln!(t, "incumbent  {}", pts.join(" "));
    }
    let calls: Vec<String> = s
        .relax_calls
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let _ = writeln!(t, "relax      {}", calls.join(" "));
    for note in &n.notes {
        let _ = writeln!(t, "note       {note}");
    }
    let _ = writeln!(t, "time       {:.3}s", s.wall_time.as_secs_f64());
    Report {
        json: Value::Object(m),
        text: t,
    }
}

fn st_reason(r: &StReason) -> String {
    match r {
        StReason::Ok => "ok".into(),
        StReason::NonSquareVertex(v) => format!("vertex {v} is not a monomial square"),
        StReason::AffinelyDependent => "vertices are affinely dependent".into(),
    }
}

/// Newton polytope of the objective, simplex verdict, structure of the
/// Lagrangian and a preview of the bound constraints for the box.
pub fn inspect_report(
    problem: &Problem,
    n: &Normalized,
    strategy: ExponentStrategy,
    source: MaxSource,
) -> Report {
    let p = &n.problem;
    let f = &p.objective;
    let info = classify_support(f);
    let (st, reason) = is_st_polynomial(f);
    let gs = p.polynomial_constraints();

    let mut m = header("inspect", problem, n);
    m.insert("terms".into(), json!(f.len()));
    m.insert("degree".into(), json!(f.degree()));
    m.insert("vertices".into(), exps(&info.vertices));
    m.insert("inner".into(), exps(&info.inner));
    m.insert("monomial_squares".into(), exps(&info.mosq));
    m.insert("st".into(), json!(st));
    m.insert("st_reason".into(), json!(st_reason(&reason)));

    let mut t = String::new();
    let name = if problem.name.is_empty() {
        "-"
    } else {
        &problem.name
    };
    let _ = writeln!(t, "instance   {name}");
    let _ = writeln!(t, "objective  {f}");
    let _ = writeln!(t, "vertices   {}", join(&info.vertices));
    let _ = writeln!(t, "inner      {}", join(&info.inner));
    let _ = writeln!(
        t,
        "ST         {}{}",
        if st { "yes" } else { "no" },
        if st {
            String::new()
        } else {
            format!(" ({})", st_reason(&reason))
        }
    );

    match build_lagrangian(f, &gs) {
        Ok(model) => {
            m.insert(
                "lagrangian".into(),
                json!({
                    "structure": model.structure,
                    "vertices": exps(&model.vertices),
                    "inner": exps(&model.inner),
                    "dropped": exps(&model.dropped),
                }),
            );
            let _ = writeln!(t, "lagrangian {}", model.structure);
            let preview = p
                .var_box()
                .ok()
                .map(|bx| pb_preview(&model, &bx, strategy, source));
            if let Some((v, line)) = preview {
                m.insert("pb_preview".into(), v);
                let _ = writeln!(t, "pb         {line}");
            } else {
                m.insert("pb_preview".into(), Value::Null);
                let _ = writeln!(t, "pb         no finite box");
            }
        }
        Err(e) => {
            m.insert("lagrangian".into(), json!({ "error": e.to_string() }));
            let _ = writeln!(t, "lagrangian {e}");
        }
    }
    for note in &n.notes {
        let _ = writeln!(t, "note       {note}");
    }
    Report {
        json: Value::Object(m),
        text: t,
    }
}

fn join<'a>(es: impl IntoIterator<Item = &'a Exponent>) -> String {
    let parts: Vec<String> = es.into_iter().map(|e| e.to_string()).collect();
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join(" ")
    }
}

fn pb_preview(
    model: &crate::relax::LagrangianModel,
    bx: &VarBox,
    strategy: ExponentStrategy,
    source: MaxSource,
) -> (Value, String) {
    match extend_lagrangian(model, bx, strategy, source) {
        Ok(ext) => {
            let cons: Vec<String> = ext.added.iter().map(Polynomial::to_string).collect();
            let v = json!({
                "branch": format!("{:?}", ext.branch).to_lowercase(),
                "strategy": ext.strategy.name(),
                "exponents": ext.matrix.diag,
                "constraints": cons,
                "structure": ext.model.structure,
                "escalations": ext.escalations,
            });
            let line = format!(
                "{:?} branch, strategy {}, exponents {:?}, {} constraint(s), {}",
                ext.branch,
                ext.strategy,
                ext.matrix.diag,
                ext.added.len(),
                ext.model.structure
            );
            (v, line)
        }
        Err(e) => (json!({ "error": e.to_string() }), e.to_string()),
    }
}
