//! Brute-force grid minimization for small instances.

use crate::pbc::VarBox;
use crate::poly::Polynomial;

/// Grid points along each axis: `l, l + step, ...` plus `u`.
fn axis_points(l: f64, u: f64, step: f64) -> Vec<f64> {
    let k = ((u - l) / step).floor() as usize;
    let mut pts: Vec<f64> = (0..=k).map(|i| l + i as f64 * step).collect();
    if u - pts[k] > 1e-12 * step {
        pts.push(u);
    }
    pts
}

/// Monomials as products of per-axis power tables.
struct Evaluator {
    terms: Vec<(Vec<(usize, usize)>, f64)>,
}

impl Evaluator {
    fn new(p: &Polynomial) -> Self {
        Evaluator {
            terms: p
                .terms()
                .map(|(e, c)| {
                    let pows = e
                        .entries()
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(i, &k)| (i, k as usize))
                        .collect();
                    (pows, c)
                })
                .collect(),
        }
    }

    fn eval(&self, tables: &[Vec<Vec<f64>>], idx: &[usize]) -> f64 {
        self.terms
            .iter()
            .map(|(pows, c)| {
                pows.iter()
                    .fold(*c, |acc, &(i, k)| acc * tables[i][idx[i]][k])
            })
            .sum()
    }
}

/// Minimum of `f` over grid points of `bx` (spacing `step`) satisfying
/// `g >= 0` for all `gs`; `None` if no grid point is feasible.
pub fn grid_minimum(
    f: &Polynomial,
    gs: &[Polynomial],
    bx: &VarBox,
    step: f64,
) -> Option<(f64, Vec<f64>)> {
    assert!(step > 0.0);
    let n = bx.dim();
    let axes: Vec<Vec<f64>> = (0..n)
        .map(|i| axis_points(bx.lower[i], bx.upper[i], step))
        .collect();
    let maxdeg = std::iter::once(f)
        .chain(gs)
        .flat_map(|p| (0..n).map(move |i| p.max_power(i)))
        .max()
        .unwrap_or(0) as usize;
    let tables: Vec<Vec<Vec<f64>>> = axes
        .iter()
        .map(|pts| {
            pts.iter()
                .map(|&x| {
                    let mut row = vec![1.0; maxdeg + 1];
                    for k in 1..=maxdeg {
                        row[k] = row[k - 1] * x;
                    }
                    row
                })
                .collect()
        })
        .collect();
    let fe = Evaluator::new(f);
    let ge: Vec<Evaluator> = gs.iter().map(Evaluator::new).collect();

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut idx = vec![0usize; n];
    loop {
        if ge.iter().all(|g| g.eval(&tables, &idx) >= 0.0) {
            let v = fe.eval(&tables, &idx);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, idx.clone()));
            }
        }
        let mut d = 0;
        loop {
            if d == n {
                return best.map(|(v, ix)| (v, (0..n).map(|i| axes[i][ix[i]]).collect()));
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
