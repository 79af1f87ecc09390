use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sonc_core::generate::{random_instance, GenSpec};
use sonc_core::gp::{GpSolver, GpStatus};
use sonc_core::oracle::grid_minimum;
use sonc_core::pbc::VarBox;
use sonc_core::poly::{Exponent, Polynomial};
use sonc_core::relax::{
    build_constrained_gp_with, build_lagrangian, sonc_bound, split_into_st, Formulation,
    RelaxConfig, RelaxStatus, Structure,
};

const SLACK: f64 = 1e-5;

fn unconstrained() -> RelaxConfig {
    RelaxConfig {
        use_pbc: false,
        ..RelaxConfig::default()
    }
}

/// Vertices `0` and `2 d_i e_i` with positive coefficients plus random
/// lattice points of the simplex; `squares` adds even inner terms with
/// positive coefficients.
fn st_polynomial(rng: &mut ChaCha8Rng, squares: bool) -> Polynomial {
    let n = rng.gen_range(1..=2);
    let d: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let mut p = Polynomial::zero(n);
    p.add_term(Exponent::zero(n), rng.gen_range(0.1..2.0));
    for (i, &di) in d.iter().enumerate() {
        p.add_term(Exponent::axis(n, i, 2 * di), rng.gen_range(0.2..2.0));
    }
    for _ in 0..rng.gen_range(1..=4) {
        let e: Vec<u32> = (0..n).map(|i| rng.gen_range(0..2 * d[i])).collect();
        let frac: f64 = (0..n).map(|i| f64::from(e[i]) / f64::from(2 * d[i])).sum();
        if frac >= 1.0 || e.iter().all(|&k| k == 0) {
            continue;
        }
        let e = Exponent::new(e);
        let c = if squares && e.is_even() {
            rng.gen_range(0.1..1.0)
        } else {
            rng.gen_range(-1.0..1.0)
        };
        p.add_term(e, c);
    }
    p
}

fn grid_min(p: &Polynomial, gs: &[Polynomial], bx: &VarBox) -> f64 {
    grid_minimum(p, gs, bx, 0.02).map_or(f64::INFINITY, |(v, _)| v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bounds_are_sound_on_random_instances(seed in 0u64..1_000_000) {
        let n = 1 + (seed % 3) as usize;
        let spec = GenSpec {
            vars: n,
            max_degree: 2 + (seed % 7) as u32,
            terms: 5,
            constraints: (seed % 2) as usize,
            odd_vertex: seed % 4 != 0,
            radius: if n == 3 { (0.5, 1.0) } else { (0.5, 2.0) },
        };
        let p = random_instance(&spec, seed);
        let gs = p.polynomial_constraints();
        let bx = p.var_box().unwrap();
        let res = sonc_bound(&p.objective, &gs, Some(&bx), &RelaxConfig::default());
        if res.status == RelaxStatus::Optimal {
            prop_assert!(res.bound.is_finite());
            let m = grid_min(&p.objective, &gs, &bx);
            prop_assert!(res.bound <= m + SLACK, "{} > {m}", res.bound);
        }
    }

    #[test]
    fn split_formulation_is_never_tighter(seed in any::<u64>()) {
        // x_i^{2d} caps above every power of f keep the strict program's
        // assumptions true
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = st_polynomial(&mut rng, false);
        let n = f.dim();
        let gs: Vec<Polynomial> = (0..n)
            .map(|i| {
                let mut g = Polynomial::constant(n, rng.gen_range(0.5..3.0));
                g.add_term(Exponent::axis(n, i, 8), -1.0);
                g
            })
            .collect();
        let model = build_lagrangian(&f, &gs).unwrap();
        prop_assert_eq!(&model.structure, &Structure::St);
        prop_assert!(model.strict_assumptions_hold());
        let solver = GpSolver::default();
        let strict = build_constrained_gp_with(&model, Formulation::Strict).unwrap();
        let split = build_constrained_gp_with(&model, Formulation::Split).unwrap();
        let a = solver.solve(&strict.gp).unwrap();
        let b = solver.solve(&split.gp).unwrap();
        if a.status == GpStatus::Optimal && b.status == GpStatus::Optimal {
            let (sa, sb) = (strict.bound(&a), split.bound(&b));
            prop_assert!(sb <= sa + 1e-6 * sa.abs().max(1.0), "split {sb} > strict {sa}");
        }
    }

    #[test]
    fn split_pieces_sum_and_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 2 * rng.gen_range(1..=2);
        let mut p = Polynomial::zero(2);
        for e in [[0, 0], [d, 0], [0, d], [d, d]] {
            p.add_term(Exponent::new(e.to_vec()), rng.gen_range(0.2..2.0));
        }
        for _ in 0..rng.gen_range(1..=4) {
            let e = Exponent::new(vec![rng.gen_range(0..=d), rng.gen_range(0..=d)]);
            if p.coeff(&e) == 0.0 {
                p.add_term(e, rng.gen_range(-1.0..1.0));
            }
        }
        let s = split_into_st(&p).unwrap();
        let diff = s.total().sub(&p);
        prop_assert!(diff.terms().all(|(_, c)| c.abs() <= 1e-12), "{diff}");

        let mut total = 0.0;
        for piece in &s.pieces {
            let r = sonc_bound(piece, &[], None, &unconstrained());
            if r.status != RelaxStatus::Optimal {
                return Ok(());
            }
            total += r.bound;
        }
        let m = grid_min(&p, &[], &VarBox::uniform(2, -1.5, 1.5).unwrap());
        prop_assert!(total <= m + SLACK, "{total} > {m}");
    }

    #[test]
    fn dropping_square_inner_terms_stays_valid(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = st_polynomial(&mut rng, true);
        let r = sonc_bound(&p, &[], None, &unconstrained());
        if r.status == RelaxStatus::Optimal {
            let bx = VarBox::uniform(p.dim(), -1.5, 1.5).unwrap();
            let m = grid_min(&p, &[], &bx);
            prop_assert!(r.bound <= m + SLACK, "{p}: {} > {m}", r.bound);
        }
    }
}
