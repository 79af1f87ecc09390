//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bnb::{Constraint, Problem};
use crate::poly::{Exponent, Polynomial};

#[derive(Clone, Debug)]
pub struct GenSpec {
    pub vars: usize,
    pub max_degree: u32,
    pub terms: usize,
    pub constraints: usize,
    /// Add a term whose odd power of `x1` exceeds every other power of `x1`,
    /// which makes it a Newton vertex that is not a monomial square.
    pub odd_vertex: bool,
    /// Box half-widths are drawn from this range.
    pub radius: (f64, f64),
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            vars: 2,
            max_degree: 6,
            terms: 6,
            constraints: 0,
            odd_vertex: true,
            radius: (0.5, 2.0),
        }
    }
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn random_exponent(rng: &mut ChaCha8Rng, n: usize, max_degree: u32, cap0: u32) -> Exponent {
    let total = rng.gen_range(0..=max_degree);
    let mut v = vec![0u32; n];
    for _ in 0..total {
        let i = rng.gen_range(0..n);
        if i == 0 && v[0] >= cap0 {
            continue;
        }
        v[i] += 1;
    }
    Exponent::new(v)
}

fn random_poly(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_degree: u32,
    terms: usize,
    cap0: u32,
) -> Polynomial {
    let mut p = Polynomial::zero(n);
    for _ in 0..terms {
        let e = random_exponent(rng, n, max_degree, cap0);
        p.add_term(e, round3(rng.gen_range(-1.0..1.0)));
    }
    p
}

/// Random box-bounded instance; the same seed always yields the same problem.
pub fn random_instance(spec: &GenSpec, seed: u64) -> Problem {
    assert!(spec.vars >= 1 && spec.max_degree >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.vars;
    let odd = if spec.max_degree % 2 == 1 {
        spec.max_degree
    } else {
        spec.max_degree - 1
    };
    let cap0 = if spec.odd_vertex {
        odd.saturating_sub(1)
    } else {
        u32::MAX
    };

    let mut objective = random_poly(&mut rng, n, spec.max_degree, spec.terms, cap0);
    if spec.odd_vertex {
        let c = round3(rng.gen_range(0.1..1.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        objective.add_term(Exponent::axis(n, 0, odd), c);
    }

    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for _ in 0..n {
        let r = (rng.gen_range(spec.radius.0..=spec.radius.1) * 100.0).round() / 100.0;
        let shift = (rng.gen_range(-0.25..=0.25) * r * 100.0).round() / 100.0;
        lower.push(shift - r);
        upper.push(shift + r);
    }

    let constraints = (0..spec.constraints)
        .map(|k| {
            // c0 - sum x_i^2 + small perturbation keeps the origin region feasible
            let mut g = random_poly(&mut rng, n, spec.max_degree.min(4), 2, cap0).scaled(0.25);
            let r2: f64 = (0..n)
                .map(|i| lower[i].abs().max(upper[i].abs()).powi(2))
                .sum();
            g.add_term(Exponent::zero(n), round3(rng.gen_range(0.5..1.0) * r2));
            for i in 0..n {
                g.add_term(Exponent::axis(n, i, 2), -1.0);
            }
            Constraint::poly(format!("c{}", k + 1), g)
        })
        .collect();

    Problem {
        name: format!("random-{seed}"),
        names: (1..=n).map(|i| format!("x{i}")).collect(),
        lower,
        upper,
        objective,
        constraints,
    }
}
