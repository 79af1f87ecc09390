//! Spatial branch and bound with SONC node relaxations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::interval_bound;
use crate::pbc::VarBox;
use crate::poly::{Exponent, Polynomial};
use crate::relax::{sonc_bound, BoundResult, RelaxConfig, RelaxStatus};

/// Constraint violation accepted for sampled incumbents.
pub const FEAS_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BnbError {
    #[error("variable {0} has an infinite bound")]
    UnboundedVariable(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintBody {
    /// `p(x) >= 0`.
    Poly(Polynomial),
    /// Non-polynomial constraint kept only as text.
    Opaque(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub body: ConstraintBody,
}

impl Constraint {
    pub fn poly(name: impl Into<String>, p: Polynomial) -> Self {
        Constraint {
            name: name.into(),
            body: ConstraintBody::Poly(p),
        }
    }

    pub fn as_poly(&self) -> Option<&Polynomial> {
        match &self.body {
            ConstraintBody::Poly(p) => Some(p),
            ConstraintBody::Opaque(_) => None,
        }
    }
}

/// `min objective  s.t.  constraints >= 0,  lower <= x <= upper`. Bounds may
/// be infinite until normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub name: String,
    pub names: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub objective: Polynomial,
    pub constraints: Vec<Constraint>,
}

impl Problem {
    /// Unnamed problem over a finite box.
    pub fn boxed(objective: Polynomial, constraints: Vec<Polynomial>, bx: &VarBox) -> Self {
        let n = objective.dim();
        Problem {
            name: String::new(),
            names: (1..=n).map(|i| format!("x{i}")).collect(),
            lower: bx.lower.clone(),
            upper: bx.upper.clone(),
            objective,
            constraints: constraints
                .into_iter()
                .enumerate()
                .map(|(i, g)| Constraint::poly(format!("c{}", i + 1), g))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn polynomial_constraints(&self) -> Vec<Polynomial> {
        self.constraints
            .iter()
            .filter_map(|c| c.as_poly().cloned())
            .collect()
    }

    pub fn var_box(&self) -> Result<VarBox, BnbError> {
        for i in 0..self.dim() {
            if !(self.lower[i].is_finite() && self.upper[i].is_finite()) {
                return Err(BnbError::UnboundedVariable(self.names[i].clone()));
            }
        }
        VarBox::new(self.lower.clone(), self.upper.clone())
            .map_err(|_| BnbError::UnboundedVariable(String::new()))
    }
}

/// Problem after epigraph reversal with non-polynomial constraints removed.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    pub problem: Problem,
    /// Names of dropped non-polynomial constraints.
    pub dropped: Vec<String>,
    pub removed_variable: Option<String>,
    /// Whether node relaxations may run.
    pub sonc_enabled: bool,
    pub notes: Vec<String>,
}

fn mentions(expr: &str, name: &str) -> bool {
    expr.split(|c: char| !(c.is_alphanumeric() || c == '_'))
        .any(|tok| tok == name)
}

/// Index, objective coefficient and constraint index of an epigraph
/// variable `y`: linear in the objective, present in exactly one constraint
/// `k y + r(x) >= 0` with `c k > 0`, and free.
fn find_epigraph(p: &Problem) -> Option<(usize, f64, usize, f64)> {
    let n = p.dim();
    (0..n).find_map(|j| {
        if p.lower[j].is_finite() || p.upper[j].is_finite() {
            return None;
        }
        let ej = Exponent::axis(n, j, 1);
        let c = p.objective.coeff(&ej);
        if c == 0.0 || p.objective.terms().any(|(e, _)| e != &ej && e.get(j) > 0) {
            return None;
        }
        let mut hit = None;
        for (ci, con) in p.constraints.iter().enumerate() {
            let uses = match &con.body {
                ConstraintBody::Poly(g) => g.depends_on(j),
                ConstraintBody::Opaque(expr) => mentions(expr, &p.names[j]),
            };
            if uses {
                if hit.is_some() {
                    return None;
                }
                hit = Some(ci);
            }
        }
        let ci = hit?;
        let g = p.constraints[ci].as_poly()?;
        let k = g.coeff(&ej);
        if k == 0.0 || c * k <= 0.0 || g.terms().any(|(e, _)| e != &ej && e.get(j) > 0) {
            return None;
        }
        Some((j, c, ci, k))
    })
}

/// Reverses the epigraph reformulation `min c y  s.t.  k y + r(x) >= 0`,
/// drops non-polynomial constraints and decides whether relaxations run
/// (nonlinear polynomial constraints must be at least half of all
/// constraints; linear ones do not count).
pub fn normalize(problem: &Problem) -> Normalized {
    let mut p = problem.clone();
    let mut notes = Vec::new();
    let mut removed_variable = None;

    if let Some((j, c, ci, k)) = find_epigraph(&p) {
        let ej = Exponent::axis(p.dim(), j, 1);
        let g = p.constraints[ci]
            .as_poly()
            .expect("polynomial constraint")
            .clone();
        let mut r = g;
        r.add_term(ej.clone(), -k);
        let mut obj = p.objective.clone();
        obj.add_term(ej, -c);
        let obj = obj.add(&r.scaled(-c / k));
        let name = p.names[j].clone();
        p.constraints.remove(ci);
        p.objective = obj.without_variable(j).expect("variable eliminated");
        for con in &mut p.constraints {
            if let ConstraintBody::Poly(g) = &mut con.body {
                *g = g.without_variable(j).expect("variable unused");
            }
        }
        p.names.remove(j);
        p.lower.remove(j);
        p.upper.remove(j);
        notes.push(format!("removed epigraph variable {name}"));
        removed_variable = Some(name);
    }

    let total = p.constraints.len();
    let nonlinear = p
        .constraints
        .iter()
        .filter(|c| c.as_poly().is_some_and(|g| !g.is_linear()))
        .count();
    let sonc_enabled = 2 * nonlinear >= total;
    if !sonc_enabled {
        notes.push(format!(
            "relaxation disabled: {nonlinear} of {total} constraints are nonlinear polynomials"
        ));
    }

    let mut dropped = Vec::new();
    p.constraints.retain(|c| {
        if c.as_poly().is_none() {
            dropped.push(c.name.clone());
            false
        } else {
            true
        }
    });
    if !dropped.is_empty() {
        notes.push(format!(
            "dropped non-polynomial constraints: {}",
            dropped.join(", ")
        ));
    }

    Normalized {
        problem: p,
        dropped,
        removed_variable,
        sonc_enabled,
        notes,
    }
}

#[derive(Clone, Debug)]
pub struct BnbConfig {
    pub freq: usize,
    pub gap_tol: f64,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
    /// Cap on a single node relaxation.
    pub node_time_limit: Duration,
    pub samples: usize,
    pub seed: u64,
    pub relax: RelaxConfig,
    /// Keep a per-node trace in the report.
    pub record: bool,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig {
            freq: 10,
            gap_tol: 1e-4,
            time_limit: None,
            node_limit: Some(100_000),
            node_time_limit: Duration::from_secs(5),
            samples: 32,
            seed: 0,
            relax: RelaxConfig::default(),
            record: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    GapClosed,
    Infeasible,
    Interrupted,
    NodeLimit,
    NoIncumbent,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::GapClosed => "gap-closed",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Interrupted => "interrupted",
            SolveStatus::NodeLimit => "node-limit",
            SolveStatus::NoIncumbent => "no-incumbent",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeOutcome {
    Infeasible,
    Pruned,
    Branched,
}

#[derive(Clone, Debug)]
pub struct NodeTrace {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub bx: VarBox,
    pub interval: f64,
    /// Relaxation status and bound when it ran at this node.
    pub relax: Option<(RelaxStatus, f64)>,
    /// Bound after combining with the parent's.
    pub bound: f64,
    pub outcome: NodeOutcome,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// `+inf` without incumbent.
    pub primal: f64,
    /// `-inf` when nothing is known.
    pub dual: f64,
    pub incumbent: Option<Vec<f64>>,
    pub nodes_processed: usize,
    pub relax_calls: BTreeMap<RelaxStatus, usize>,
    pub root_interval: (f64, f64),
    pub root_relaxation: Option<BoundResult>,
    pub wall_time: Duration,
    pub trace: Vec<NodeTrace>,
}

impl SolveReport {
    /// `(primal - dual) / max(1, |primal|)`; infinite unless both are finite.
    pub fn gap(&self) -> f64 {
        if self.primal.is_finite() && self.dual.is_finite() {
            (self.primal - self.dual).max(0.0) / self.primal.abs().max(1.0)
        } else {
            f64::INFINITY
        }
    }

    pub fn relax_invocations(&self) -> usize {
        self.relax_calls.values().sum()
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    pub id: usize,
    pub parent: Option<usize>,
    pub bx: VarBox,
    pub depth: usize,
    pub dual: f64,
}

struct Open(Node);

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Open {}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Open {
    // max-heap: smallest dual first, then smallest id
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .dual
            .total_cmp(&self.0.dual)
            .then_with(|| other.0.id.cmp(&self.0.id))
    }
}

fn sample_points(bx: &VarBox, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = bx.dim();
    let mut pts = vec![bx.center()];
    if n <= 6 {
        for mask in 0..(1usize << n) {
            pts.push(
                (0..n)
                    .map(|i| {
                        let q = if mask >> i & 1 == 1 { 0.75 } else { 0.25 };
                        bx.lower[i] + q * bx.width(i)
                    })
                    .collect(),
            );
        }
    }
    for _ in 0..count {
        pts.push(
            (0..n)
                .map(|i| {
                    if bx.width(i) > 0.0 {
                        rng.gen_range(bx.lower[i]..=bx.upper[i])
                    } else {
                        bx.lower[i]
                    }
                })
                .collect(),
        );
    }
    pts
}

/// Best-first branch and bound over the problem box.
pub fn solve(n: &Normalized, cfg: &BnbConfig) -> Result<SolveReport, BnbError> {
    let start = Instant::now();
    let p = &n.problem;
    let root_box = p.var_box()?;
    let gs = p.polynomial_constraints();
    let checkable = n.dropped.is_empty();
    let f = &p.objective;

    let mut relax_calls: BTreeMap<RelaxStatus, usize> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    heap.push(Open(Node {
        id: 0,
        parent: None,
        bx: root_box.clone(),
        depth: 0,
        dual: f64::NEG_INFINITY,
    }));
    let mut next_id = 1;
    let mut primal = f64::INFINITY;
    let mut incumbent: Option<Vec<f64>> = None;
    let mut closed_min = f64::INFINITY;
    let mut nodes = 0;
    let mut trace = Vec::new();
    let mut root_relaxation = None;
    let root_interval = interval_bound(f, &root_box);
    let mut stop = None;

    let threshold = |inc: f64| inc - cfg.gap_tol * inc.abs().max(1.0);

    while let Some(Open(node)) = heap.pop() {
        if node.dual >= threshold(primal) {
            closed_min = closed_min.min(node.dual);
            stop = Some(SolveStatus::GapClosed);
            break;
        }
        let elapsed = start.elapsed();
        if cfg.time_limit.is_some_and(|t| elapsed >= t) {
            closed_min = closed_min.min(node.dual);
            stop = Some(SolveStatus::Interrupted);
            break;
        }
        if cfg.node_limit.is_some_and(|l| nodes >= l) {
            closed_min = closed_min.min(node.dual);
            stop = Some(SolveStatus::NodeLimit);
            break;
        }
        nodes += 1;
        let scheduled = cfg.freq > 0 && node.depth % cfg.freq == 0;

        let mut record = |interval, relax, bound, outcome| {
            if cfg.record {
                trace.push(NodeTrace {
                    id: node.id,
                    parent: node.parent,
                    depth: node.depth,
                    bx: node.bx.clone(),
                    interval,
                    relax,
                    bound,
                    outcome,
                });
            }
        };

        if gs.iter().any(|g| interval_bound(g, &node.bx).1 < 0.0) {
            let mut relax = None;
            if scheduled {
                *relax_calls.entry(RelaxStatus::Infeasible).or_default() += 1;
                relax = Some((RelaxStatus::Infeasible, f64::INFINITY));
            }
            record(f64::INFINITY, relax, f64::INFINITY, NodeOutcome::Infeasible);
            continue;
        }

        let interval = interval_bound(f, &node.bx).0;
        let mut bound = interval;
        let mut relax = None;
        if scheduled {
            if n.sonc_enabled {
                let mut rc = cfg.relax.clone();
                let mut cap = cfg.node_time_limit;
                if let Some(t) = cfg.time_limit {
                    cap = cap.min(t.saturating_sub(start.elapsed()));
                }
                rc.solver.time_limit = Some(cap);
                let res = sonc_bound(f, &gs, Some(&node.bx), &rc);
                *relax_calls.entry(res.status).or_default() += 1;
                relax = Some((res.status, res.bound));
                if res.is_optimal() {
                    bound = bound.max(res.bound);
                }
                if node.id == 0 {
                    root_relaxation = Some(res);
                }
            } else {
                *relax_calls.entry(RelaxStatus::DidNotRun).or_default() += 1;
                relax = Some((RelaxStatus::DidNotRun, f64::NEG_INFINITY));
            }
        }
        bound = bound.max(node.dual);

        // without an incumbent nothing can be pruned; the root bound is final
        if !checkable {
            closed_min = closed_min.min(bound);
            record(interval, relax, bound, NodeOutcome::Pruned);
            stop = Some(SolveStatus::NoIncumbent);
            break;
        }

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(node.id as u64));
        for x in sample_points(&node.bx, cfg.samples, &mut rng) {
            if gs.iter().all(|g| g.eval_unchecked(&x) >= -FEAS_TOL) {
                let v = f.eval_unchecked(&x);
                if v < primal {
                    primal = v;
                    incumbent = Some(x);
                }
            }
        }

        let i = node.bx.widest();
        let tiny = node.bx.width(i) <= 1e-10 * node.bx.magnitude(i).max(1.0);
        if bound >= threshold(primal) || tiny {
            closed_min = closed_min.min(bound);
            record(interval, relax, bound, NodeOutcome::Pruned);
            continue;
        }
        record(interval, relax, bound, NodeOutcome::Branched);
        let (left, right) = node.bx.bisect(i);
        for bx in [left, right] {
            heap.push(Open(Node {
                id: next_id,
                parent: Some(node.id),
                bx,
                depth: node.depth + 1,
                dual: bound,
            }));
            next_id += 1;
        }
    }

    let open_min = heap.iter().map(|o| o.0.dual).fold(f64::INFINITY, f64::min);
    let dual = closed_min.min(open_min).min(primal);
    let status = match stop {
        Some(s) => s,
        None if primal.is_finite() => SolveStatus::GapClosed,
        None if dual == f64::INFINITY && checkable => SolveStatus::Infeasible,
        None => SolveStatus::NoIncumbent,
    };
    Ok(SolveReport {
        status,
        primal,
        dual,
        incumbent,
        nodes_processed: nodes,
        relax_calls,
        root_interval,
        root_relaxation,
        wall_time: start.elapsed(),
        trace,
    })
}
