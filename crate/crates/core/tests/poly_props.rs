use proptest::prelude::*;

use sonc_core::interval::{interval_bound, naive_enclosure};
use sonc_core::pbc::VarBox;
use sonc_core::poly::{
    affinely_independent, barycentric, classify_support, in_convex_hull, is_st_polynomial,
    Exponent, Polynomial,
};

fn poly(max_dim: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    (1..=max_dim).prop_flat_map(move |n| {
        prop::collection::vec(
            (prop::collection::vec(0..=max_exp, n), -2.0..2.0f64),
            1..=max_terms,
        )
        .prop_map(move |terms| {
            let mut p = Polynomial::zero(n);
            for (e, c) in terms {
                p.add_term(Exponent::new(e), c);
            }
            p
        })
    })
}

/// Box with a point inside it.
fn box_and_point(n: usize) -> impl Strategy<Value = (VarBox, Vec<f64>)> {
    prop::collection::vec((-2.0..2.0f64, 0.01..2.0f64, 0.0..=1.0f64), n).prop_map(|axes| {
        let lower: Vec<f64> = axes.iter().map(|a| a.0).collect();
        let upper: Vec<f64> = axes.iter().map(|a| a.0 + a.1).collect();
        let x = axes.iter().map(|a| a.0 + a.1 * a.2).collect();
        (VarBox::new(lower, upper).unwrap(), x)
    })
}

fn naive_eval(p: &Polynomial, x: &[f64]) -> (f64, f64) {
    let mut sum = 0.0;
    let mut scale = 0.0;
    for (e, c) in p.terms() {
        let t = c * e
            .entries()
            .iter()
            .zip(x)
            .map(|(&k, &xi)| xi.powf(f64::from(k)))
            .product::<f64>();
        sum += t;
        scale += t.abs();
    }
    (sum, scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn evaluate_matches_powf(p in poly(3, 6, 8), xs in prop::collection::vec(-3.0..3.0f64, 3)) {
        let x = &xs[..p.dim()];
        let (expected, scale) = naive_eval(&p, x);
        let got = p.evaluate(x).unwrap();
        prop_assert!((got - expected).abs() <= 1e-12 * scale.max(1e-300) + 1e-300);
    }

    #[test]
    fn classification_matches_hull_membership(p in poly(3, 6, 7)) {
        let info = classify_support(&p);
        let support = p.support();
        let verts: Vec<Exponent> = info.vertices.iter().cloned().collect();
        for v in &info.vertices {
            let others: Vec<Exponent> = support.iter().filter(|e| *e != v).cloned().collect();
            prop_assert!(others.is_empty() || !in_convex_hull(v, &others), "{v} is not a vertex");
        }
        for b in &info.inner {
            prop_assert!(in_convex_hull(b, &verts), "{b} is outside the hull");
        }
        prop_assert_eq!(info.support().len(), support.len());
    }

    #[test]
    fn st_implies_simplex(p in poly(3, 6, 7)) {
        let (st, _) = is_st_polynomial(&p);
        if st {
            prop_assert!(classify_support(&p).vertices.len() <= p.dim() + 1);
        }
    }

    #[test]
    fn barycentric_weights_valid(p in poly(3, 8, 8)) {
        let info = classify_support(&p);
        let verts: Vec<Exponent> = info.vertices.iter().cloned().collect();
        if !affinely_independent(&verts) {
            return Ok(());
        }
        for beta in &info.inner {
            let b = barycentric(&verts, beta).unwrap();
            prop_assert!(b.weights.values().all(|&w| w >= -1e-12));
            prop_assert!((b.weight_sum() - 1.0).abs() <= 1e-9);
            prop_assert!(b.residual() <= 1e-9);
        }
    }

    #[test]
    fn barycentric_on_scaled_simplex(
        d in prop::collection::vec(1u32..=5, 1..=4),
        raw in prop::collection::vec(0.0..1.0f64, 4),
    ) {
        // vertices 0 and 2 d_i e_i; beta rounded down from a random point
        let n = d.len();
        let mut verts = vec![Exponent::zero(n)];
        verts.extend((0..n).map(|i| Exponent::axis(n, i, 2 * d[i])));
        let total: f64 = raw[..n].iter().sum::<f64>() + 1.0;
        let beta = Exponent::new(
            (0..n).map(|i| (raw[i] / total * f64::from(2 * d[i])).floor() as u32).collect(),
        );
        let b = barycentric(&verts, &beta).unwrap();
        prop_assert!(b.is_valid());
        for i in 0..n {
            let expected = f64::from(beta.get(i)) / f64::from(2 * d[i]);
            prop_assert!((b.weight(&verts[i + 1]) - expected).abs() <= 1e-9);
        }
    }

    #[test]
    fn interval_bound_contains_values(
        (p, (bx, x)) in poly(3, 6, 6).prop_flat_map(|p| {
            let n = p.dim();
            (Just(p), box_and_point(n))
        })
    ) {
        let (lo, hi) = interval_bound(&p, &bx);
        let v = p.evaluate(&x).unwrap();
        prop_assert!(lo <= v + 1e-9 && v <= hi + 1e-9, "{v} not in [{lo}, {hi}]");
    }

    #[test]
    fn naive_enclosure_shrinks_on_subboxes(
        (p, (bx, _)) in poly(3, 6, 6).prop_flat_map(|p| {
            let n = p.dim();
            (Just(p), box_and_point(n))
        }),
        axis in 0usize..3,
    ) {
        let parent = naive_enclosure(&p, &bx);
        let (left, right) = bx.bisect(axis % bx.dim());
        for child in [left, right] {
            let c = naive_enclosure(&p, &child);
            let slack = 1e-12 * (1.0 + parent.lo.abs().max(parent.hi.abs()));
            prop_assert!(c.lo >= parent.lo - slack && c.hi <= parent.hi + slack);
        }
    }
}
