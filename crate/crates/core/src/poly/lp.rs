//! Convex-combination feasibility LPs over exponent vectors.

use microlp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, SolveOutcome};

use super::Exponent;

/// Weight below which an LP value is treated as zero.
const LP_ZERO: f64 = 1e-9;

/// Solves `point = sum_j w_j * candidates[j]`, `sum_j w_j = 1`, `w >= 0`.
///
/// With `prefer = Some(k)` the weight of candidate `k` is maximized, otherwise
/// any feasible point is returned. The simplex returns a basic solution, so the
/// candidates with nonzero weight are affinely independent.
pub(crate) fn convex_cover(
    point: &Exponent,
    candidates: &[&Exponent],
    prefer: Option<usize>,
) -> Option<Vec<(usize, f64)>> {
    if candidates.is_empty() {
        return None;
    }
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..candidates.len())
        .map(|j| {
            let obj = if prefer == Some(j) { 1.0 } else { 0.0 };
            lp.add_var(obj, (0.0, f64::INFINITY))
        })
        .collect();

    let mut sum = LinearExpr::empty();
    for &v in &vars {
        sum.add(v, 1.0);
    }
    lp.add_constraint(sum, ComparisonOp::Eq, 1.0);

    for i in 0..point.dim() {
        let mut row = LinearExpr::empty();
        for (j, c) in candidates.iter().enumerate() {
            let e = c.get(i);
            if e != 0 {
                row.add(vars[j], f64::from(e));
            }
        }
        lp.add_constraint(row, ComparisonOp::Eq, f64::from(point.get(i)));
    }

    match lp.solve() {
        Ok(SolveOutcome::Solution(sol)) => Some(
            vars.iter()
                .enumerate()
                .map(|(j, &v)| (j, sol.var_value(v)))
                .filter(|&(_, w)| w > LP_ZERO)
                .collect(),
        ),
        _ => None,
    }
}

/// Whether `point` is a convex combination of `others`.
pub(crate) fn in_hull(point: &Exponent, others: &[&Exponent]) -> bool {
    convex_cover(point, others, None).is_some()
}
