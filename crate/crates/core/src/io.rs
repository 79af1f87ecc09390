//! JSON instance files.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "name": "quartic",
//!   "variables": [{"name": "x", "lower": -1, "upper": 1}],
//!   "objective": [{"coeff": 1, "exponents": [4]}, {"coeff": -1, "exponents": [1]}],
//!   "constraints": [
//!     {"name": "ball", "terms": [{"coeff": 1, "exponents": [0]}], "sense": ">="},
//!     {"name": "trig", "expr": "sin(x) + 2"}
//!   ]
//! }
//! ```
//!
//! A `null` bound is infinite. Constraints with `expr` instead of `terms`
//! are non-polynomial and only carried along.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bnb::{Constraint, ConstraintBody, Problem};
use crate::poly::{Exponent, Polynomial};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {msg}")]
    Syntax {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{}{field}: {msg}", line.map(|l| format!("line {l}, ")).unwrap_or_default())]
    Schema {
        line: Option<usize>,
        field: String,
        msg: String,
    },
}

impl IoError {
    /// Parse errors as opposed to file-system errors.
    pub fn is_parse(&self) -> bool {
        matches!(self, IoError::Syntax { .. } | IoError::Schema { .. })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    schema: u32,
    #[serde(default)]
    name: String,
    variables: Vec<RawVariable>,
    objective: Vec<RawTerm>,
    #[serde(default)]
    constraints: Vec<RawConstraint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariable {
    name: String,
    lower: Option<f64>,
    upper: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    coeff: f64,
    exponents: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<RawTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sense: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expr: Option<String>,
}

/// 1-based line of the first occurrence of `needle` after `from`.
fn line_of(text: &str, needle: &str, from: usize) -> Option<usize> {
    let start = text.get(from..)?.find(needle)? + from;
    Some(text[..start].matches('\n').count() + 1)
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, needle: Option<&str>, field: String, msg: String) -> IoError {
        let line = needle.and_then(|n| line_of(self.text, &format!("\"{n}\""), 0));
        IoError::Schema { line, field, msg }
    }

    fn section_err(&self, section: &str, name: &str, field: String, msg: String) -> IoError {
        let from = self.text.find(&format!("\"{section}\"")).unwrap_or(0);
        let line = line_of(self.text, &format!("\"{name}\""), from);
        IoError::Schema { line, field, msg }
    }
}

fn build_poly(
    n: usize,
    terms: &[RawTerm],
    field: &str,
    locate: &dyn Fn(String, String) -> IoError,
) -> Result<Polynomial, IoError> {
    let mut p = Polynomial::zero(n);
    for (k, t) in terms.iter().enumerate() {
        if t.exponents.len() != n {
            return Err(locate(
                format!("{field}.terms[{k}].exponents"),
                format!("exponent length {}, expected {n}", t.exponents.len()),
            ));
        }
        if !t.coeff.is_finite() {
            return Err(locate(
                format!("{field}.terms[{k}].coeff"),
                "coefficient must be finite".into(),
            ));
        }
        p.add_term(Exponent::new(t.exponents.clone()), t.coeff);
    }
    Ok(p)
}

/// Parses an instance from JSON text.
pub fn parse_str(text: &str) -> Result<Problem, IoError> {
    let raw: RawInstance = serde_json::from_str(text).map_err(|e| IoError::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let ctx = Ctx { text };
    if raw.schema != SCHEMA_VERSION {
        return Err(ctx.err(
            Some("schema"),
            "schema".into(),
            format!(
                "unsupported version {}, expected {SCHEMA_VERSION}",
                raw.schema
            ),
        ));
    }
    let n = raw.variables.len();
    let mut names = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for (i, v) in raw.variables.iter().enumerate() {
        let l = v.lower.unwrap_or(f64::NEG_INFINITY);
        let u = v.upper.unwrap_or(f64::INFINITY);
        if names.contains(&v.name) {
            return Err(ctx.section_err(
                "variables",
                &v.name,
                format!("variables[{i}].name"),
                format!("duplicate variable {:?}", v.name),
            ));
        }
        if l > u || l == f64::INFINITY || u == f64::NEG_INFINITY {
            return Err(ctx.section_err(
                "variables",
                &v.name,
                format!("variables[{i}] ({:?})", v.name),
                format!("empty range [{l}, {u}]"),
            ));
        }
        names.push(v.name.clone());
        lower.push(l);
        upper.push(u);
    }
    let objective = build_poly(n, &raw.objective, "objective", &|field, msg| {
        ctx.err(Some("objective"), field, msg)
    })?;

    let mut constraints = Vec::with_capacity(raw.constraints.len());
    for (i, c) in raw.constraints.iter().enumerate() {
        let label = format!("constraints[{i}] ({:?})", c.name);
        let locate = |field: String, msg: String| {
            ctx.section_err("constraints", &c.name, format!("{label}.{field}"), msg)
        };
        let body = match (&c.terms, &c.expr) {
            (Some(terms), None) => {
                if let Some(s) = &c.sense {
                    if s != ">=" {
                        return Err(locate(
                            "sense".into(),
                            format!("unsupported sense {s:?}, expected \">=\""),
                        ));
                    }
                }
                let p = build_poly(n, terms, "", &|field, msg| {
                    locate(field.trim_start_matches('.').to_string(), msg)
                })?;
                ConstraintBody::Poly(p)
            }
            (None, Some(expr)) => ConstraintBody::Opaque(expr.clone()),
            _ => {
                return Err(locate(
                    "terms".into(),
                    "exactly one of \"terms\" and \"expr\" is required".into(),
                ))
            }
        };
        constraints.push(Constraint {
            name: c.name.clone(),
            body,
        });
    }

    Ok(Problem {
        name: raw.name,
        names,
        lower,
        upper,
        objective,
        constraints,
    })
}

pub fn parse(path: &Path) -> Result<Problem, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_str(&text)
}

fn raw_terms(p: &Polynomial) -> Vec<RawTerm> {
    p.terms()
        .map(|(e, c)| RawTerm {
            coeff: c,
            exponents: e.entries().to_vec(),
        })
        .collect()
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Pretty JSON for `p`; `parse_str(&serialize(p)) == p`.
pub fn serialize(p: &Problem) -> String {
    let raw = RawInstance {
        schema: SCHEMA_VERSION,
        name: p.name.clone(),
        variables: (0..p.dim())
            .map(|i| RawVariable {
                name: p.names[i].clone(),
                lower: finite(p.lower[i]),
                upper: finite(p.upper[i]),
            })
            .collect(),
        objective: raw_terms(&p.objective),
        constraints: p
            .constraints
            .iter()
            .map(|c| match &c.body {
                ConstraintBody::Poly(g) => RawConstraint {
                    name: c.name.clone(),
                    terms: Some(raw_terms(g)),
                    sense: Some(">=".into()),
                    expr: None,
                },
                ConstraintBody::Opaque(e) => RawConstraint {
                    name: c.name.clone(),
                    terms: None,
                    sense: None,
                    expr: Some(e.clone()),
                },
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("serializable instance");
    s.push('\n');
    s
}

pub fn write(path: &Path, p: &Problem) -> Result<(), IoError> {
    fs::write(path, serialize(p)).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}
