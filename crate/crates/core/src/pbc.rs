//! Polynomial-bound constraints `M_i^{d_i} - x_i^{d_i} >= 0` derived from a
//! finite box, exponent strategies for the `d_i`, and the simplex cover
//! `{0, d_1 e_1, ..., d_n e_n}` they provide.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Barycentric, Exponent, Polynomial};
use crate::relax::{LagrangianModel, RelaxError, Structure};

/// Slack allowed on the cover weight of the zero exponent.
pub const COVER_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PbcError {
    #[error("box bounds must be finite with lower <= upper (variable {0})")]
    BadBox(usize),
    #[error("box has {got} variables, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exponent {beta} is not covered by the bound exponents (zero weight {lambda0})")]
    InvalidCover { beta: Exponent, lambda0: f64 },
    #[error(transparent)]
    Relax(#[from] RelaxError),
}

/// Axis-aligned box `lower <= x <= upper` with finite entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl VarBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, PbcError> {
        if lower.len() != upper.len() {
            return Err(PbcError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l <= u) {
                return Err(PbcError::BadBox(i));
            }
        }
        Ok(VarBox { lower, upper })
    }

    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self, PbcError> {
        VarBox::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    /// `max(|l_i|, |u_i|)`.
    pub fn magnitude(&self, i: usize) -> f64 {
        self.lower[i].abs().max(self.upper[i].abs())
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol)
    }

    /// Whether `self` lies inside `other`.
    pub fn is_subset_of(&self, other: &VarBox) -> bool {
        self.dim() == other.dim()
            && (0..self.dim())
                .all(|i| self.lower[i] >= other.lower[i] && self.upper[i] <= other.upper[i])
    }

    /// Index of the widest edge (lowest index on ties).
    pub fn widest(&self) -> usize {
        let mut best = 0;
        for i in 1..self.dim() {
            if self.width(i) > self.width(best) {
                best = i;
            }
        }
        best
    }

    /// Splits edge `i` at its midpoint.
    pub fn bisect(&self, i: usize) -> (VarBox, VarBox) {
        let mid = 0.5 * (self.lower[i] + self.upper[i]);
        let mut left = self.clone();
        let mut right = self.clone();
        left.upper[i] = mid;
        right.lower[i] = mid;
        (left, right)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentStrategy {
    /// `(n + n mod 2) * max_i`.
    N0,
    /// `(n + n mod 2) * max_i + 4`.
    N4,
    /// `2 * max_i + 4`.
    Fixed4,
}

impl ExponentStrategy {
    pub const ALL: [ExponentStrategy; 3] = [
        ExponentStrategy::N0,
        ExponentStrategy::N4,
        ExponentStrategy::Fixed4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExponentStrategy::N0 => "n0",
            ExponentStrategy::N4 => "n4",
            ExponentStrategy::Fixed4 => "fixed4",
        }
    }
}

impl fmt::Display for ExponentStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which exponents feed the per-variable maxima of a strategy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaxSource {
    /// Points of the support that are not Newton-polytope vertices.
    Inner,
    /// Terms of the Lagrangian that are not monomial squares.
    #[default]
    NonSquare,
}

/// Diagonal exponent matrix; `diag[i]` is the power of `x_i` in its bound
/// constraint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PbcMatrix {
    pub diag: Vec<u32>,
}

impl PbcMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `diag[i] * e_i`.
    pub fn exponent(&self, i: usize) -> Exponent {
        Exponent::axis(self.dim(), i, self.diag[i])
    }

    pub fn exponents(&self) -> Vec<Exponent> {
        (0..self.dim()).map(|i| self.exponent(i)).collect()
    }
}

pub fn pbc_exponents(strategy: ExponentStrategy, n: usize, delta_max: &[u32]) -> PbcMatrix {
    assert_eq!(delta_max.len(), n, "one maximum per variable");
    let even_n = (n + n % 2) as u32;
    let diag = delta_max
        .iter()
        .map(|&m| {
            let d = match strategy {
                ExponentStrategy::N0 => even_n * m,
                ExponentStrategy::N4 => even_n * m + 4,
                ExponentStrategy::Fixed4 => 2 * m + 4,
            };
            d.max(2)
        })
        .collect();
    PbcMatrix { diag }
}

/// `max(|l_i|, |u_i|)^{d_i} - x_i^{d_i}` for every variable.
pub fn build_pbc(bx: &VarBox, a: &PbcMatrix) -> Vec<Polynomial> {
    assert_eq!(
        bx.dim(),
        a.dim(),
        "box and exponent matrix dimensions differ"
    );
    (0..bx.dim()).map(|i| pbc_constraint(bx, a, i)).collect()
}

fn pbc_constraint(bx: &VarBox, a: &PbcMatrix, i: usize) -> Polynomial {
    let n = bx.dim();
    let mut p = Polynomial::zero(n);
    p.add_term(Exponent::zero(n), bx.magnitude(i).powi(a.diag[i] as i32));
    p.add_term(a.exponent(i), -1.0);
    p
}

/// Weights `beta_i / d_i` on `d_i e_i` and the remainder on `0`.
pub fn cover_certificate(beta: &Exponent, a: &PbcMatrix) -> Result<Barycentric, PbcError> {
    let n = a.dim();
    if beta.dim() != n {
        return Err(PbcError::DimensionMismatch {
            expected: n,
            got: beta.dim(),
        });
    }
    let mut weights = BTreeMap::new();
    let mut rest = 1.0;
    for i in 0..n {
        let w = f64::from(beta.get(i)) / f64::from(a.diag[i]);
        rest -= w;
        weights.insert(a.exponent(i), w);
    }
    if rest < -COVER_SLACK {
        return Err(PbcError::InvalidCover {
            beta: beta.clone(),
            lambda0: rest,
        });
    }
    weights.insert(
        Exponent::zero(n),
        if rest <= COVER_SLACK { 0.0 } else { rest },
    );
    Ok(Barycentric::from_weights(beta.clone(), weights))
}

/// Per-variable maxima over the exponents selected by `source`.
pub fn exponent_maxima(model: &LagrangianModel, source: MaxSource) -> Vec<u32> {
    let mut max = vec![0; model.dim];
    let mut visit = |e: &Exponent| {
        for (i, m) in max.iter_mut().enumerate() {
            *m = (*m).max(e.get(i));
        }
    };
    match source {
        MaxSource::Inner => model.hull_inner.iter().for_each(&mut visit),
        MaxSource::NonSquare => model
            .support_union
            .iter()
            .filter(|e| !model.is_lagrangian_square(e))
            .for_each(&mut visit),
    }
    max
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PbBranch {
    /// Model was already ST; only bound constraints reusing existing
    /// exponents were appended.
    Reuse,
    /// Bound constraints for every variable with the cover
    /// `{0, d_1 e_1, ..., d_n e_n}`.
    Cover,
}

#[derive(Clone, Debug)]
pub struct PbExtension {
    pub model: LagrangianModel,
    pub branch: PbBranch,
    pub added: Vec<Polynomial>,
    pub matrix: PbcMatrix,
    pub strategy: ExponentStrategy,
    pub source: MaxSource,
    /// One line per fallback from the requested strategy.
    pub escalations: Vec<String>,
}

/// Appends bound constraints to `model`.
///
/// An ST model only receives constraints whose exponent is already in the
/// support and which do not give a vertex a second positive coefficient.
/// Any other model receives a constraint for every variable and is rebuilt
/// over the cover; on an invalid cover the strategy escalates to `N4` and
/// then to `N4` with non-square maxima.
pub fn extend_lagrangian(
    model: &LagrangianModel,
    bx: &VarBox,
    strategy: ExponentStrategy,
    source: MaxSource,
) -> Result<PbExtension, PbcError> {
    if bx.dim() != model.dim {
        return Err(PbcError::DimensionMismatch {
            expected: model.dim,
            got: bx.dim(),
        });
    }
    if matches!(model.structure, Structure::St | Structure::VertexSign(_)) {
        let matrix = pbc_exponents(strategy, model.dim, &exponent_maxima(model, source));
        let ext = extend_reuse(model, bx, matrix, strategy, source);
        if ext.model.structure == Structure::St {
            return Ok(ext);
        }
    }

    let mut attempts = vec![(strategy, source)];
    if strategy != ExponentStrategy::N4 {
        attempts.push((ExponentStrategy::N4, source));
    }
    if source != MaxSource::NonSquare {
        attempts.push((ExponentStrategy::N4, MaxSource::NonSquare));
    }
    let mut escalations = Vec::new();
    let mut last_err = None;
    for (k, &(s, src)) in attempts.iter().enumerate() {
        let matrix = pbc_exponents(s, model.dim, &exponent_maxima(model, src));
        let added = build_pbc(bx, &matrix);
        let mut gs = model.constraints.clone();
        let mut pb_mu = model.pb_mu.clone();
        for (i, g) in added.iter().enumerate() {
            pb_mu.insert(matrix.exponent(i), gs.len());
            gs.push(g.clone());
        }
        match LagrangianModel::with_cover(&model.f, &gs, pb_mu, &matrix) {
            Ok(m) if m.structure == Structure::St => {
                return Ok(PbExtension {
                    model: m,
                    branch: PbBranch::Cover,
                    added,
                    matrix,
                    strategy: s,
                    source: src,
                    escalations,
                });
            }
            Ok(m) => {
                let beta = match &m.structure {
                    Structure::InvalidCover(b) => b.clone(),
                    _ => Exponent::zero(model.dim),
                };
                let lambda0 = cover_certificate(&beta, &matrix)
                    .err()
                    .and_then(|e| match e {
                        PbcError::InvalidCover { lambda0, .. } => Some(lambda0),
                        _ => None,
                    })
                    .unwrap_or(f64::NAN);
                if let Some(&(ns, nsrc)) = attempts.get(k + 1) {
                    escalations.push(format!(
                        "{s}/{src:?} leaves {beta} uncovered; escalating to {ns}/{nsrc:?}"
                    ));
                }
                last_err = Some(PbcError::InvalidCover { beta, lambda0 });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn extend_reuse(
    model: &LagrangianModel,
    bx: &VarBox,
    matrix: PbcMatrix,
    strategy: ExponentStrategy,
    source: MaxSource,
) -> PbExtension {
    let mut gs = model.constraints.clone();
    let mut pb_mu = model.pb_mu.clone();
    let mut added = Vec::new();
    for i in 0..model.dim {
        let e = matrix.exponent(i);
        if !model.support_union.contains(&e) || pb_mu.contains_key(&e) {
            continue;
        }
        let second_positive = model.vertices.contains(&e)
            && model
                .coeff
                .get(&e)
                .is_some_and(|form| form.num_positive_terms() > 0);
        if second_positive {
            continue;
        }
        let g = pbc_constraint(bx, &matrix, i);
        pb_mu.insert(e, gs.len());
        gs.push(g.clone());
        added.push(g);
    }
    let extended = if added.is_empty() {
        model.clone()
    } else {
        match LagrangianModel::assemble(&model.f, &gs, pb_mu) {
            Ok(m) if m.structure == Structure::St => m,
            _ => {
                added.clear();
                model.clone()
            }
        }
    };
    PbExtension {
        model: extended,
        branch: PbBranch::Reuse,
        added,
        matrix,
        strategy,
        source,
        escalations: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::tests::triangle;
    use crate::relax::build_lagrangian;

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v.to_vec())
    }

    #[test]
    fn strategy_formulas() {
        assert_eq!(
            pbc_exponents(ExponentStrategy::N0, 2, &[2, 2]).diag,
            vec![4, 4]
        );
        assert_eq!(
            pbc_exponents(ExponentStrategy::N4, 2, &[2, 2]).diag,
            vec![8, 8]
        );
        assert_eq!(
            pbc_exponents(ExponentStrategy::Fixed4, 2, &[2, 2]).diag,
            vec![8, 8]
        );
        assert_eq!(
            pbc_exponents(ExponentStrategy::Fixed4, 3, &[2, 2, 2]).diag,
            vec![8, 8, 8]
        );
        assert_eq!(
            pbc_exponents(ExponentStrategy::N4, 3, &[2, 2, 2]).diag,
            vec![12, 12, 12]
        );
    }

    #[test]
    fn zero_maximum_is_clamped() {
        assert_eq!(
            pbc_exponents(ExponentStrategy::N0, 2, &[0, 3]).diag,
            vec![2, 6]
        );
    }

    #[test]
    fn bound_constraint_values() {
        let a = PbcMatrix { diag: vec![6] };
        let g = &build_pbc(&VarBox::uniform(1, -2.0, 3.0).unwrap(), &a)[0];
        assert_eq!(g.coeff(&e(&[0])), 729.0);
        assert_eq!(g.coeff(&e(&[6])), -1.0);
        let unit = &build_pbc(&VarBox::uniform(1, -1.0, 1.0).unwrap(), &a)[0];
        assert_eq!(unit.coeff(&e(&[0])), 1.0);
        let flat = &build_pbc(
            &VarBox::uniform(1, 0.0, 0.0).unwrap(),
            &PbcMatrix { diag: vec![4] },
        )[0];
        assert_eq!(flat.len(), 1);
        assert_eq!(flat.coeff(&e(&[4])), -1.0);
    }

    #[test]
    fn cover_weights_follow_formula() {
        let b = cover_certificate(&e(&[1, 1]), &PbcMatrix { diag: vec![8, 8] }).unwrap();
        assert!((b.weight(&e(&[8, 0])) - 0.125).abs() < 1e-15);
        assert!((b.weight(&e(&[0, 8])) - 0.125).abs() < 1e-15);
        assert!((b.zero_weight() - 0.75).abs() < 1e-15);

        let b = cover_certificate(
            &e(&[1, 2, 1]),
            &PbcMatrix {
                diag: vec![12, 12, 12],
            },
        )
        .unwrap();
        assert!((b.weight(&e(&[0, 12, 0])) - 1.0 / 6.0).abs() < 1e-15);
        assert!((b.zero_weight() - 2.0 / 3.0).abs() < 1e-15);
        assert!(b.is_valid());

        let b = cover_certificate(&e(&[0, 0]), &PbcMatrix { diag: vec![4, 4] }).unwrap();
        assert_eq!(b.zero_weight(), 1.0);
        assert_eq!(b.support.len(), 1);
    }

    #[test]
    fn uncovered_exponent_is_rejected() {
        let err = cover_certificate(&e(&[3, 3]), &PbcMatrix { diag: vec![4, 4] }).unwrap_err();
        assert!(matches!(err, PbcError::InvalidCover { .. }));
    }

    #[test]
    fn quartic_gets_cover_branch() {
        let f = Polynomial::from_slice(1, &[(&[4], 1.0), (&[1], -1.0)]);
        let model = build_lagrangian(&f, &[]).unwrap();
        let bx = VarBox::uniform(1, -1.0, 1.0).unwrap();
        let ext =
            extend_lagrangian(&model, &bx, ExponentStrategy::Fixed4, MaxSource::default()).unwrap();
        assert_eq!(ext.branch, PbBranch::Cover);
        assert_eq!(ext.matrix.diag, vec![6]);
        let verts: Vec<_> = ext.model.vertices.iter().cloned().collect();
        assert_eq!(verts, vec![e(&[0]), e(&[6])]);
        assert!(ext.model.dropped.contains(&e(&[4])));
        assert_eq!(
            ext.model.inner.iter().cloned().collect::<Vec<_>>(),
            vec![e(&[1])]
        );
    }

    #[test]
    fn st_model_without_matching_exponents_is_unchanged() {
        let model = build_lagrangian(&triangle(), &[]).unwrap();
        let bx = VarBox::uniform(2, -1.0, 1.0).unwrap();
        let ext =
            extend_lagrangian(&model, &bx, ExponentStrategy::Fixed4, MaxSource::default()).unwrap();
        assert_eq!(ext.branch, PbBranch::Reuse);
        assert!(ext.added.is_empty());
        assert_eq!(ext.model.num_mu, 0);
    }

    #[test]
    fn st_geometry_reuses_existing_exponent() {
        // the vertex x^6 has no positive coefficient until its bound is added
        let f = Polynomial::from_slice(1, &[(&[6], -1.0), (&[3], -0.5), (&[2], 1.0), (&[0], 1.0)]);
        let model = build_lagrangian(&f, &[]).unwrap();
        assert!(matches!(model.structure, Structure::VertexSign(_)));
        let bx = VarBox::uniform(1, -1.0, 1.0).unwrap();
        let ext = extend_lagrangian(&model, &bx, ExponentStrategy::N0, MaxSource::Inner).unwrap();
        assert_eq!(ext.branch, PbBranch::Reuse);
        assert_eq!(ext.added.len(), 1);
        assert_eq!(ext.model.structure, Structure::St);
    }

    #[test]
    fn reuse_skips_second_positive_term() {
        let f = Polynomial::from_slice(1, &[(&[6], -1.0), (&[2], 1.0), (&[1], -0.5), (&[0], 1.0)]);
        let g = Polynomial::from_slice(1, &[(&[0], 1.0), (&[6], -1.0), (&[1], 0.1)]);
        let model = build_lagrangian(&f, std::slice::from_ref(&g)).unwrap();
        assert_eq!(model.structure, Structure::St);
        let bx = VarBox::uniform(1, -1.0, 1.0).unwrap();
        let ext =
            extend_lagrangian(&model, &bx, ExponentStrategy::Fixed4, MaxSource::NonSquare).unwrap();
        assert!(ext.added.is_empty());
        assert_eq!(ext.model.num_mu, 1);
    }

    #[test]
    fn box_helpers() {
        let bx = VarBox::new(vec![-1.0, 0.0], vec![3.0, 1.0]).unwrap();
        assert_eq!(bx.widest(), 0);
        let (l, r) = bx.bisect(0);
        assert_eq!(l.upper[0], 1.0);
        assert_eq!(r.lower[0], 1.0);
        assert!(l.is_subset_of(&bx) && r.is_subset_of(&bx));
        assert!(VarBox::new(vec![1.0], vec![0.0]).is_err());
        assert!(VarBox::new(vec![f64::NEG_INFINITY], vec![0.0]).is_err());
    }
}
