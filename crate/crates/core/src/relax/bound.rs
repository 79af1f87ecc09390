use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    build_constrained_gp, build_lagrangian, split_into_st, Formulation, LagrangianModel,
    RelaxError, Structure,
};
use crate::gp::{GpSolution, GpSolver, GpStatus};
use crate::pbc::{extend_lagrangian, ExponentStrategy, MaxSource, PbBranch, VarBox};
use crate::poly::Polynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelaxStatus {
    Optimal,
    Infeasible,
    Unsolvable,
    Interrupted,
    DidNotRun,
}

impl RelaxStatus {
    pub const ALL: [RelaxStatus; 5] = [
        RelaxStatus::Optimal,
        RelaxStatus::Infeasible,
        RelaxStatus::Unsolvable,
        RelaxStatus::Interrupted,
        RelaxStatus::DidNotRun,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelaxStatus::Optimal => "optimal",
            RelaxStatus::Infeasible => "infeasible",
            RelaxStatus::Unsolvable => "unsolvable",
            RelaxStatus::Interrupted => "interrupted",
            RelaxStatus::DidNotRun => "did-not-run",
        }
    }
}

impl fmt::Display for RelaxStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct RelaxConfig {
    pub use_pbc: bool,
    pub strategy: ExponentStrategy,
    pub max_source: MaxSource,
    pub solver: GpSolver,
}

impl Default for RelaxConfig {
    fn default() -> Self {
        RelaxConfig {
            use_pbc: true,
            strategy: ExponentStrategy::Fixed4,
            max_source: MaxSource::default(),
            solver: GpSolver::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundResult {
    pub status: RelaxStatus,
    /// `f0 - gamma`; `-inf` unless the status is optimal.
    pub bound: f64,
    pub gp_solution: Option<GpSolution>,
    pub notes: Vec<String>,
    pub formulation: Option<Formulation>,
    /// Strategy of the bound constraints actually used.
    pub strategy: Option<ExponentStrategy>,
    pub pb_constraints: usize,
    /// Number of ST pieces when the splitting fallback ran.
    pub pieces: usize,
}

impl BoundResult {
    fn failed(status: RelaxStatus, notes: Vec<String>) -> Self {
        BoundResult {
            status,
            bound: f64::NEG_INFINITY,
            gp_solution: None,
            notes,
            formulation: None,
            strategy: None,
            pb_constraints: 0,
            pieces: 0,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == RelaxStatus::Optimal
    }
}

fn map_status(s: GpStatus) -> RelaxStatus {
    match s {
        GpStatus::Optimal | GpStatus::Unbounded => RelaxStatus::Optimal,
        GpStatus::Interrupted => RelaxStatus::Interrupted,
        GpStatus::Infeasible | GpStatus::IterationLimit | GpStatus::NumericalError => {
            RelaxStatus::Unsolvable
        }
    }
}

/// SONC lower bound for `min f  s.t.  gs >= 0` (and `x` in `bx` when given).
///
/// Bound constraints from `bx` are added when enabled. Unconstrained
/// problems whose simplex test fails only on affine dependence fall back to
/// splitting into ST pieces. Solver failures are reported through the
/// status, never as errors.
pub fn sonc_bound(
    f: &Polynomial,
    gs: &[Polynomial],
    bx: Option<&VarBox>,
    cfg: &RelaxConfig,
) -> BoundResult {
    let mut notes = Vec::new();
    let base = match build_lagrangian(f, gs) {
        Ok(m) => m,
        Err(e) => return BoundResult::failed(RelaxStatus::Unsolvable, vec![e.to_string()]),
    };

    let mut model = base.clone();
    let mut strategy = None;
    let mut pb_count = 0;
    if let (true, Some(bx)) = (cfg.use_pbc, bx) {
        match extend_lagrangian(&base, bx, cfg.strategy, cfg.max_source) {
            Ok(ext) => {
                if ext.branch == PbBranch::Cover || !ext.added.is_empty() {
                    strategy = Some(ext.strategy);
                    pb_count = ext.added.len();
                    notes.push(format!(
                        "{} bound constraint(s), exponents {:?}",
                        ext.added.len(),
                        ext.matrix.diag
                    ));
                }
                notes.extend(ext.escalations);
                model = ext.model;
            }
            Err(e) => notes.push(format!("bound constraints not applicable: {e}")),
        }
    }

    if model.structure == Structure::St {
        let mut res = solve_model(&model, cfg, notes);
        res.strategy = strategy;
        res.pb_constraints = pb_count;
        return res;
    }

    notes.push(model.structure.to_string());
    if gs.is_empty() && pb_count == 0 && model.structure == Structure::AffinelyDependent {
        return split_bound(f, cfg, notes);
    }
    BoundResult::failed(RelaxStatus::Unsolvable, notes)
}

fn solve_model(model: &LagrangianModel, cfg: &RelaxConfig, mut notes: Vec<String>) -> BoundResult {
    let gp_model = match build_constrained_gp(model) {
        Ok(m) => m,
        Err(e) => {
            notes.push(e.to_string());
            return BoundResult::failed(RelaxStatus::Unsolvable, notes);
        }
    };
    let sol = match cfg.solver.solve(&gp_model.gp) {
        Ok(s) => s,
        Err(e) => {
            notes.push(e.to_string());
            return BoundResult::failed(RelaxStatus::Unsolvable, notes);
        }
    };
    let status = map_status(sol.status);
    if sol.status != GpStatus::Optimal {
        notes.push(format!("gp status {:?}", sol.status));
    }
    let bound = if status == RelaxStatus::Optimal {
        gp_model.bound(&sol)
    } else {
        f64::NEG_INFINITY
    };
    let status = if status == RelaxStatus::Optimal && !bound.is_finite() {
        notes.push("non-finite bound".into());
        RelaxStatus::Unsolvable
    } else {
        status
    };
    BoundResult {
        status,
        bound: if status == RelaxStatus::Optimal {
            bound
        } else {
            f64::NEG_INFINITY
        },
        gp_solution: Some(sol),
        notes,
        formulation: Some(gp_model.formulation),
        strategy: None,
        pb_constraints: 0,
        pieces: 0,
    }
}

/// Bounds `q = f - f0 + 1` piecewise; `f >= f0 - 1 + sum of piece bounds +
/// constant of the monomial-square remainder`.
fn split_bound(f: &Polynomial, cfg: &RelaxConfig, mut notes: Vec<String>) -> BoundResult {
    let f0 = f.constant_term();
    let mut q = f.clone();
    q.add_term(crate::poly::Exponent::zero(f.dim()), 1.0 - f0);
    let split = match split_into_st(&q) {
        Ok(s) => s,
        Err(e) => {
            notes.push(e.to_string());
            return BoundResult::failed(RelaxStatus::Unsolvable, notes);
        }
    };
    let mut total = f0 - 1.0 + split.remainder.constant_term();
    for piece in &split.pieces {
        let model = match build_lagrangian(piece, &[]) {
            Ok(m) if m.structure == Structure::St => m,
            Ok(m) => {
                notes.push(format!("piece not ST: {}", m.structure));
                return BoundResult::failed(RelaxStatus::Unsolvable, notes);
            }
            Err(e) => {
                notes.push(e.to_string());
                return BoundResult::failed(RelaxStatus::Unsolvable, notes);
            }
        };
        let res = solve_model(&model, cfg, Vec::new());
        if !res.is_optimal() {
            notes.extend(res.notes);
            return BoundResult::failed(res.status, notes);
        }
        total += res.bound;
    }
    notes.push(format!("split into {} ST piece(s)", split.pieces.len()));
    BoundResult {
        status: RelaxStatus::Optimal,
        bound: total,
        gp_solution: None,
        notes,
        formulation: None,
        strategy: None,
        pb_constraints: 0,
        pieces: split.pieces.len(),
    }
}

impl From<RelaxError> for BoundResult {
    fn from(e: RelaxError) -> Self {
        BoundResult::failed(RelaxStatus::Unsolvable, vec![e.to_string()])
    }
}
