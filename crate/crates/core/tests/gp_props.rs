use proptest::prelude::*;

use sonc_core::gp::{log_transform, GeometricProgram, GpSolver, GpStatus, Monomial, Posynomial};

fn monomial(n: usize) -> impl Strategy<Value = Monomial> {
    (0.1..2.0f64, prop::collection::vec(-2.0..2.0f64, n))
        .prop_map(|(c, a)| Monomial::new(c, a.into_iter().enumerate().collect()))
}

fn posynomial(n: usize, max_terms: usize) -> impl Strategy<Value = Posynomial> {
    prop::collection::vec(monomial(n), 1..=max_terms).prop_map(Posynomial::new)
}

/// Random program that is strictly feasible at `x = 1`.
fn program() -> impl Strategy<Value = GeometricProgram> {
    (1usize..=4).prop_flat_map(|n| {
        (
            posynomial(n, 4),
            prop::collection::vec((posynomial(n, 3), 0.2..0.9f64), 0..=3),
        )
            .prop_map(move |(obj, cons)| {
                let mut gp = GeometricProgram::new(n, obj);
                for (mut p, slack) in cons {
                    let total: f64 = p.terms.iter().map(|m| m.coeff).sum();
                    for m in &mut p.terms {
                        m.coeff *= slack / total;
                    }
                    gp.ineq.push(p);
                }
                gp
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn optimal_points_are_feasible(gp in program()) {
        let sol = GpSolver::default().solve(&gp).unwrap();
        prop_assert!(
            matches!(sol.status, GpStatus::Optimal | GpStatus::Unbounded),
            "{:?}", sol.status
        );
        if sol.status == GpStatus::Optimal {
            for p in &gp.ineq {
                prop_assert!(p.eval(&sol.x) <= 1.0 + 1e-6);
            }
            // x = 1 is feasible, so the optimum cannot exceed its value
            let ones = vec![1.0; gp.num_vars];
            prop_assert!(sol.objective_value <= gp.objective.eval(&ones) * (1.0 + 1e-6));
        }
    }

    #[test]
    fn solves_are_deterministic(gp in program()) {
        let s = GpSolver::default();
        let a = s.solve(&gp).unwrap();
        let b = s.solve(&gp).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.x, b.x);
        prop_assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn log_objective_is_midpoint_convex(
        gp in program(),
        y in prop::collection::vec(-5.0..5.0f64, 4),
        z in prop::collection::vec(-5.0..5.0f64, 4),
    ) {
        let lp = log_transform(&gp);
        let n = gp.num_vars;
        let (y, z) = (&y[..n], &z[..n]);
        let mid: Vec<f64> = y.iter().zip(z).map(|(a, b)| 0.5 * (a + b)).collect();
        for f in std::iter::once(&lp.objective).chain(&lp.ineq) {
            let avg = 0.5 * (f.value(y) + f.value(z));
            prop_assert!(f.value(&mid) <= avg + 1e-9);
        }
    }
}
