//! Newton-polytope geometry of exponent sets.
//!
//! Vertices are found with one LP per point: `e` is a vertex iff it is not a
//! convex combination of the remaining points. Barycentric coordinates come
//! from a least-squares solve of the lifted affine system `[1; V] w = [1; b]`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};

use super::lp::in_hull;
use super::{Exponent, PolyError, Polynomial, BARY_TOL};

/// Weights with magnitude below this are snapped to zero.
const WEIGHT_ZERO: f64 = 1e-12;

/// Vertex / inner / monomial-square classification of a support.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonInfo {
    pub vertices: BTreeSet<Exponent>,
    pub inner: BTreeSet<Exponent>,
    pub mosq: BTreeSet<Exponent>,
    pub non_mosq: BTreeSet<Exponent>,
}

impl NewtonInfo {
    pub fn support(&self) -> BTreeSet<Exponent> {
        self.vertices.union(&self.inner).cloned().collect()
    }
}

/// Convex-combination weights of `beta` over a set of affinely independent
/// vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Barycentric {
    pub beta: Exponent,
    /// One entry per vertex, including zero weights.
    pub weights: BTreeMap<Exponent, f64>,
    /// Vertices with nonzero weight.
    pub support: BTreeSet<Exponent>,
}

impl Barycentric {
    pub(crate) fn from_weights(beta: Exponent, weights: BTreeMap<Exponent, f64>) -> Self {
        let support = weights
            .iter()
            .filter(|(_, &w)| w > 0.0)
            .map(|(e, _)| e.clone())
            .collect();
        Barycentric {
            beta,
            weights,
            support,
        }
    }

    pub fn weight(&self, e: &Exponent) -> f64 {
        self.weights.get(e).copied().unwrap_or(0.0)
    }

    /// Weight of the zero exponent (the constant term).
    pub fn zero_weight(&self) -> f64 {
        self.weight(&Exponent::zero(self.beta.dim()))
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.values().sum()
    }

    /// `max_i |sum_a w_a a_i - beta_i|`.
    pub fn residual(&self) -> f64 {
        let n = self.beta.dim();
        let mut acc = vec![0.0; n];
        for (a, &w) in &self.weights {
            for (i, slot) in acc.iter_mut().enumerate() {
                *slot += w * f64::from(a.get(i));
            }
        }
        acc.iter()
            .zip(self.beta.entries())
            .map(|(s, &b)| (s - f64::from(b)).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_valid(&self) -> bool {
        self.weights.values().all(|&w| w >= -WEIGHT_ZERO)
            && (self.weight_sum() - 1.0).abs() <= BARY_TOL
            && self.residual() <= BARY_TOL
    }
}

/// Why a polynomial fails (or passes) the simplex-with-square-vertices test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StReason {
    Ok,
    NonSquareVertex(Exponent),
    AffinelyDependent,
}

pub fn in_convex_hull(point: &Exponent, points: &[Exponent]) -> bool {
    let refs: Vec<&Exponent> = points.iter().collect();
    in_hull(point, &refs)
}

/// Vertices of `conv(points)`.
pub fn hull_vertices(points: &[Exponent]) -> BTreeSet<Exponent> {
    let uniq: Vec<&Exponent> = points.iter().collect::<BTreeSet<_>>().into_iter().collect();
    if uniq.len() <= 1 {
        return uniq.into_iter().cloned().collect();
    }
    let mut out = BTreeSet::new();
    for (k, p) in uniq.iter().enumerate() {
        let others: Vec<&Exponent> = uniq
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, e)| *e)
            .collect();
        if !in_hull(p, &others) {
            out.insert((*p).clone());
        }
    }
    out
}

/// Classifies `points` into vertices and inner points; `is_square` decides
/// the monomial-square split.
pub fn classify_points<F>(points: &[Exponent], is_square: F) -> NewtonInfo
where
    F: Fn(&Exponent) -> bool,
{
    let vertices = hull_vertices(points);
    let all: BTreeSet<Exponent> = points.iter().cloned().collect();
    let inner = all.difference(&vertices).cloned().collect();
    let (mosq, non_mosq) = all.into_iter().partition(|e| is_square(e));
    NewtonInfo {
        vertices,
        inner,
        mosq,
        non_mosq,
    }
}

pub fn classify_support(p: &Polynomial) -> NewtonInfo {
    classify_points(&p.support(), |e| p.is_monomial_square(e))
}

fn lifted(points: &[&Exponent], dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim + 1, points.len(), |r, c| {
        if r == 0 {
            1.0
        } else {
            f64::from(points[c].get(r - 1))
        }
    })
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > max * 1e-10).count()
}

pub fn affinely_independent(points: &[Exponent]) -> bool {
    if points.is_empty() {
        return true;
    }
    let refs: Vec<&Exponent> = points.iter().collect();
    numerical_rank(&lifted(&refs, points[0].dim())) == points.len()
}

/// Barycentric coordinates of `beta` with respect to affinely independent
/// `vertices`.
pub fn barycentric(vertices: &[Exponent], beta: &Exponent) -> Result<Barycentric, PolyError> {
    let dim = beta.dim();
    if let Some(v) = vertices.iter().find(|v| v.dim() != dim) {
        return Err(PolyError::DimensionMismatch {
            expected: dim,
            got: v.dim(),
        });
    }
    if vertices.is_empty() {
        return Err(PolyError::NotInHull(beta.clone()));
    }
    let refs: Vec<&Exponent> = vertices.iter().collect();
    let m = lifted(&refs, dim);
    if numerical_rank(&m) < vertices.len() {
        return Err(PolyError::Degenerate);
    }
    let mut rhs = DVector::zeros(dim + 1);
    rhs[0] = 1.0;
    for i in 0..dim {
        rhs[i + 1] = f64::from(beta.get(i));
    }
    let svd = m.clone().svd(true, true);
    let w = svd.solve(&rhs, 1e-12).map_err(|_| PolyError::Degenerate)?;

    let mut weights = BTreeMap::new();
    for (v, &wi) in vertices.iter().zip(w.iter()) {
        if wi < -BARY_TOL {
            return Err(PolyError::NotInHull(beta.clone()));
        }
        let snapped = if wi.abs() <= WEIGHT_ZERO || wi < 0.0 {
            0.0
        } else {
            wi
        };
        weights.insert(v.clone(), snapped);
    }
    let total: f64 = weights.values().sum();
    if total > 0.0 {
        weights.values_mut().for_each(|w| *w /= total);
    }
    let bary = Barycentric::from_weights(beta.clone(), weights);
    if bary.residual() > BARY_TOL || (bary.weight_sum() - 1.0).abs() > BARY_TOL {
        return Err(PolyError::NotInHull(beta.clone()));
    }
    Ok(bary)
}

/// Simplex-with-monomial-square-vertices test on the support of `p` as given.
pub fn is_st_polynomial(p: &Polynomial) -> (bool, StReason) {
    let info = classify_support(p);
    if let Some(v) = info.vertices.iter().find(|v| !info.mosq.contains(*v)) {
        return (false, StReason::NonSquareVertex(v.clone()));
    }
    let verts: Vec<Exponent> = info.vertices.iter().cloned().collect();
    if !affinely_independent(&verts) {
        return (false, StReason::AffinelyDependent);
    }
    (true, StReason::Ok)
}

/// Inner points lying on a proper face: some simplex vertex gets zero weight.
pub fn degenerate_inner_points(info: &NewtonInfo, barys: &[Barycentric]) -> BTreeSet<Exponent> {
    barys
        .iter()
        .filter(|b| info.inner.contains(&b.beta))
        .filter(|b| info.vertices.iter().any(|v| b.weight(v) <= WEIGHT_ZERO))
        .map(|b| b.beta.clone())
        .collect()
}
