use std::collections::BTreeMap;

use proptest::prelude::*;

use sonc_core::bnb::{normalize, solve, BnbConfig, NodeOutcome, Problem, SolveReport, SolveStatus};
use sonc_core::generate::{random_instance, GenSpec};
use sonc_core::interval::naive_enclosure;
use sonc_core::oracle::grid_minimum;
use sonc_core::pbc::VarBox;
use sonc_core::poly::Polynomial;

const STEP: f64 = 0.02;
const SLACK: f64 = 1e-5;

fn instance(seed: u64) -> Problem {
    random_instance(
        &GenSpec {
            vars: 1 + (seed % 2) as usize,
            max_degree: 3 + (seed % 4) as u32,
            terms: 5,
            constraints: usize::from(seed.is_multiple_of(3)),
            odd_vertex: !seed.is_multiple_of(5),
            radius: (0.5, 1.5),
        },
        seed,
    )
}

fn run(p: &Problem, freq: usize, node_limit: usize) -> SolveReport {
    let cfg = BnbConfig {
        freq,
        node_limit: Some(node_limit),
        record: true,
        ..BnbConfig::default()
    };
    solve(&normalize(p), &cfg).unwrap()
}

/// Grid points of `bx` (spacing `STEP`, anchored at the root box) that
/// satisfy every constraint.
fn feasible_grid_values(p: &Problem, bx: &VarBox) -> Vec<f64> {
    let root = p.var_box().unwrap();
    let gs = p.polynomial_constraints();
    let n = p.dim();
    let axes: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let k = (root.width(i) / STEP).floor() as usize;
            (0..=k)
                .map(|j| root.lower[i] + j as f64 * STEP)
                .chain(std::iter::once(root.upper[i]))
                .filter(|&x| x >= bx.lower[i] && x <= bx.upper[i])
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    if axes.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let x: Vec<f64> = (0..n).map(|i| axes[i][idx[i]]).collect();
        if gs.iter().all(|g| g.evaluate(&x).unwrap() >= 0.0) {
            out.push(p.objective.evaluate(&x).unwrap());
        }
        let mut d = 0;
        loop {
            if d == n {
                return out;
            }
            idx[d] += 1;
            if idx[d] < axes[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Upper bound on the gradient norm of the objective over the box.
fn lipschitz(p: &Problem) -> f64 {
    let bx = p.var_box().unwrap();
    (0..p.dim())
        .map(|i| {
            let d = naive_enclosure(&p.objective.derivative(i), &bx);
            d.lo.abs().max(d.hi.abs()).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

fn grid_min(p: &Problem) -> Option<f64> {
    let gs: Vec<Polynomial> = p.polynomial_constraints();
    grid_minimum(&p.objective, &gs, &p.var_box().unwrap(), STEP).map(|(v, _)| v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn bounds_bracket_the_grid_minimum(seed in 0u64..100_000) {
        let p = instance(seed);
        let r = run(&p, 10, 20_000);
        prop_assert!(matches!(r.status, SolveStatus::GapClosed | SolveStatus::NodeLimit));
        let m = grid_min(&p).unwrap();
        prop_assert!(r.dual <= m + SLACK, "dual {} > grid {m}", r.dual);
        prop_assert!(r.dual <= r.primal + 1e-9);

        // the incumbent is a genuine point: inside the box, feasible, and
        // attaining the primal value
        let x = r.incumbent.clone().unwrap();
        prop_assert!(p.var_box().unwrap().contains(&x, 0.0));
        for g in p.polynomial_constraints() {
            prop_assert!(g.evaluate(&x).unwrap() >= -1e-6);
        }
        prop_assert_eq!(p.objective.evaluate(&x).unwrap(), r.primal);

        let gap = BnbConfig::default().gap_tol * r.primal.abs().max(1.0);
        if r.status == SolveStatus::GapClosed {
            prop_assert!(r.primal <= m + gap + SLACK, "primal {} far above grid {m}", r.primal);
        }
        if p.constraints.is_empty() {
            // a grid point lies within step * sqrt(n) / 2 of any minimizer
            let reach = STEP * (p.dim() as f64).sqrt() / 2.0;
            let floor = m - lipschitz(&p) * reach - SLACK;
            prop_assert!(r.primal >= floor, "primal {} < {floor}", r.primal);
        }
    }

    #[test]
    fn node_bounds_never_decrease(seed in 0u64..100_000) {
        let p = instance(seed);
        let r = run(&p, 1, 3000);
        let by_id: BTreeMap<usize, f64> = r.trace.iter().map(|t| (t.id, t.bound)).collect();
        for t in &r.trace {
            if let (Some(parent), Some((_, sonc))) = (t.parent, t.relax) {
                let pb = by_id[&parent];
                let child = t.interval.max(sonc);
                prop_assert!(child >= pb - 1e-7, "node {}: {child} < parent {pb}", t.id);
            }
        }
    }

    #[test]
    fn pruned_boxes_hold_no_better_points(seed in 0u64..100_000) {
        let p = instance(seed);
        let r = run(&p, 10, 3000);
        let cut = r.primal - BnbConfig::default().gap_tol * r.primal.abs().max(1.0);
        for t in &r.trace {
            match t.outcome {
                NodeOutcome::Pruned => {
                    for v in feasible_grid_values(&p, &t.bx) {
                        prop_assert!(v >= cut - 1e-9, "node {}: {v} < {cut}", t.id);
                    }
                }
                NodeOutcome::Infeasible => {
                    prop_assert!(feasible_grid_values(&p, &t.bx).is_empty());
                }
                NodeOutcome::Branched => {}
            }
        }
    }

    #[test]
    fn relaxation_calls_are_accounted(seed in 0u64..100_000, freq in 1usize..4) {
        let p = instance(seed);
        let r = run(&p, freq, 3000);
        let traced = r.trace.iter().filter(|t| t.relax.is_some()).count();
        prop_assert_eq!(r.relax_invocations(), traced);
        let scheduled = r.trace.iter().filter(|t| t.depth % freq == 0).count();
        prop_assert_eq!(traced, scheduled);
        for t in &r.trace {
            if let Some((s, _)) = t.relax {
                prop_assert!(r.relax_calls[&s] > 0);
            }
        }
    }

    #[test]
    fn child_enclosures_nest(seed in 0u64..100_000) {
        let p = instance(seed);
        let r = run(&p, 10, 3000);
        let boxes: BTreeMap<usize, &VarBox> = r.trace.iter().map(|t| (t.id, &t.bx)).collect();
        for t in &r.trace {
            if let Some(parent) = t.parent {
                let outer = boxes[&parent];
                prop_assert!(t.bx.is_subset_of(outer));
                let a = naive_enclosure(&p.objective, outer);
                let b = naive_enclosure(&p.objective, &t.bx);
                let slack = 1e-12 * (1.0 + a.lo.abs().max(a.hi.abs()));
                prop_assert!(b.lo >= a.lo - slack && b.hi <= a.hi + slack);
            }
        }
    }
}
