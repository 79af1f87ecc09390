//! SONC relaxations of `min f  s.t.  g_i >= 0`.
//!
//! The Lagrangian `L(x, mu) = f - sum_i mu_i g_i` has coefficients that are
//! affine in `mu`. When its Newton polytope (with the constant term added) is
//! a simplex whose vertices carry exactly one positive coefficient term, the
//! best SONC certificate for `L - c` is a geometric program in `mu`, the
//! circuit weights `a` and the inner-coefficient bounds `b`.

mod bound;
mod gp_model;
mod split;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pbc::{cover_certificate, PbcMatrix};
use crate::poly::{
    affinely_independent, barycentric, hull_vertices, Barycentric, Exponent, Polynomial,
};

pub use bound::{sonc_bound, BoundResult, RelaxConfig, RelaxStatus};
pub use gp_model::{
    build_constrained_gp, build_constrained_gp_with, build_unconstrained_gp, Formulation,
    SoncGpModel, VarIndex,
};
pub use split::{split_into_st, StSplit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelaxError {
    #[error("polynomial {index} has {got} variables, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("polynomial is not an ST-polynomial: {0}")]
    NotSt(Structure),
    #[error("structure assumption violated: {0}")]
    StructureViolation(Structure),
    #[error("term {0} admits no monomial-square cover")]
    NoCover(Exponent),
    #[error("GP coefficient overflow at inner term {0}")]
    Overflow(Exponent),
}

/// Outcome of the structure checks on a Lagrangian model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "exponent")]
pub enum Structure {
    St,
    /// A Newton-polytope vertex with an odd exponent.
    NonSquareVertex(Exponent),
    AffinelyDependent,
    /// A vertex coefficient without exactly one positive term.
    VertexSign(Exponent),
    /// An inner term outside the bound-constraint cover.
    InvalidCover(Exponent),
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::St => write!(f, "ST"),
            Structure::NonSquareVertex(e) => write!(f, "vertex {e} is not a monomial square"),
            Structure::AffinelyDependent => write!(f, "vertices are affinely dependent"),
            Structure::VertexSign(e) => {
                write!(f, "vertex {e} lacks a single positive coefficient term")
            }
            Structure::InvalidCover(e) => write!(f, "term {e} lies outside the cover"),
        }
    }
}

/// `constant + sum_i mu[i] * mu_i`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearForm {
    pub constant: f64,
    pub mu: BTreeMap<usize, f64>,
}

/// One summand of a [`LinearForm`]: `None` is the constant.
pub type FormTerm = (Option<usize>, f64);

impl LinearForm {
    pub fn constant(c: f64) -> Self {
        LinearForm {
            constant: c,
            mu: BTreeMap::new(),
        }
    }

    pub fn eval(&self, mu: &[f64]) -> f64 {
        self.mu
            .iter()
            .fold(self.constant, |acc, (&i, &c)| acc + c * mu[i])
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.mu.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.mu.is_empty()
    }

    /// All summands nonzero, constant first.
    pub fn terms(&self) -> Vec<FormTerm> {
        let mut out = Vec::with_capacity(self.mu.len() + 1);
        if self.constant != 0.0 {
            out.push((None, self.constant));
        }
        out.extend(self.mu.iter().map(|(&i, &c)| (Some(i), c)));
        out
    }

    /// Nonnegative for every `mu >= 0`.
    pub fn is_nonnegative(&self) -> bool {
        self.constant >= 0.0 && self.mu.values().all(|&c| c >= 0.0)
    }

    pub fn num_positive_terms(&self) -> usize {
        self.terms().iter().filter(|(_, c)| *c > 0.0).count()
    }

    pub fn positive_part(&self) -> LinearForm {
        LinearForm {
            constant: self.constant.max(0.0),
            mu: self
                .mu
                .iter()
                .filter(|(_, &c)| c > 0.0)
                .map(|(&i, &c)| (i, c))
                .collect(),
        }
    }

    /// Magnitudes of the negative summands.
    pub fn negative_part(&self) -> LinearForm {
        LinearForm {
            constant: (-self.constant).max(0.0),
            mu: self
                .mu
                .iter()
                .filter(|(_, &c)| c < 0.0)
                .map(|(&i, &c)| (i, -c))
                .collect(),
        }
    }
}

/// Coefficients of the Lagrangian as affine forms in the multipliers, with
/// the Newton geometry used to certify it.
#[derive(Clone, Debug)]
pub struct LagrangianModel {
    pub dim: usize,
    pub num_mu: usize,
    pub f: Polynomial,
    pub constraints: Vec<Polynomial>,
    /// Multiplier index of each bound constraint, keyed by its exponent.
    pub pb_mu: BTreeMap<Exponent, usize>,
    /// Union of the supports of `f` and all `g_i`.
    pub support_union: BTreeSet<Exponent>,
    /// `L(mu)_alpha` for every exponent of the support and for `0`.
    pub coeff: BTreeMap<Exponent, LinearForm>,
    /// Simplex vertices, always containing `0`.
    pub vertices: BTreeSet<Exponent>,
    /// Non-vertex points of the geometry before monomial squares are dropped.
    pub hull_inner: BTreeSet<Exponent>,
    /// Inner terms that need a circuit.
    pub inner: BTreeSet<Exponent>,
    /// Inner terms that are monomial squares for every `mu >= 0`.
    pub dropped: BTreeSet<Exponent>,
    /// Coefficient forms used at `vertices \ {0}`.
    pub vertex_coeff: BTreeMap<Exponent, LinearForm>,
    pub inner_pos: BTreeMap<Exponent, LinearForm>,
    pub inner_neg: BTreeMap<Exponent, LinearForm>,
    pub barycentric: BTreeMap<Exponent, Barycentric>,
    /// `max(g_{i,0}, 0)`.
    pub g0_plus: Vec<f64>,
    pub f0: f64,
    pub structure: Structure,
    pub cover: Option<PbcMatrix>,
}

pub fn build_lagrangian(f: &Polynomial, gs: &[Polynomial]) -> Result<LagrangianModel, RelaxError> {
    LagrangianModel::assemble(f, gs, BTreeMap::new())
}

impl LagrangianModel {
    /// Model over the Newton polytope of the support plus `0`.
    pub fn assemble(
        f: &Polynomial,
        gs: &[Polynomial],
        pb_mu: BTreeMap<Exponent, usize>,
    ) -> Result<Self, RelaxError> {
        let mut model = Self::base(f, gs, pb_mu)?;
        let given: Vec<Exponent> = model.support_union.iter().cloned().collect();
        let given_vertices = hull_vertices(&given);
        let zero = Exponent::zero(model.dim);

        let mut points = given;
        if !model.support_union.contains(&zero) {
            points.push(zero.clone());
        }
        model.vertices = hull_vertices(&points);
        model.hull_inner = points
            .iter()
            .filter(|e| !model.vertices.contains(*e))
            .cloned()
            .collect();
        model.split_inner();

        if let Some(v) = given_vertices.iter().find(|v| !v.is_even()) {
            model.structure = Structure::NonSquareVertex(v.clone());
            return Ok(model);
        }
        let verts: Vec<Exponent> = model.vertices.iter().cloned().collect();
        if !affinely_independent(&verts) {
            model.structure = Structure::AffinelyDependent;
            return Ok(model);
        }
        for beta in model.inner.clone() {
            match barycentric(&verts, &beta) {
                Ok(b) => {
                    model.barycentric.insert(beta, b);
                }
                Err(_) => {
                    model.structure = Structure::AffinelyDependent;
                    return Ok(model);
                }
            }
        }
        for v in model.vertices.iter().filter(|v| !v.is_zero()) {
            model.vertex_coeff.insert(v.clone(), model.coeff[v].clone());
        }
        model.structure = model.vertex_sign_check();
        Ok(model)
    }

    /// Model over the simplex `{0, d_1 e_1, ..., d_n e_n}`; every other term
    /// is inner or dropped. At a cover vertex only the bound constraint's
    /// multiplier counts as a positive term; other positive terms there are
    /// monomial squares and are discarded.
    pub fn with_cover(
        f: &Polynomial,
        gs: &[Polynomial],
        pb_mu: BTreeMap<Exponent, usize>,
        cover: &PbcMatrix,
    ) -> Result<Self, RelaxError> {
        let mut model = Self::base(f, gs, pb_mu)?;
        let zero = Exponent::zero(model.dim);
        model.vertices = cover.exponents().into_iter().collect();
        model.vertices.insert(zero.clone());
        model.hull_inner = model
            .coeff
            .keys()
            .filter(|e| !model.vertices.contains(*e))
            .cloned()
            .collect();
        model.split_inner();
        model.cover = Some(cover.clone());

        for beta in model.inner.clone() {
            match cover_certificate(&beta, cover) {
                Ok(b) => {
                    model.barycentric.insert(beta, b);
                }
                Err(_) => {
                    model.structure = Structure::InvalidCover(beta);
                    return Ok(model);
                }
            }
        }
        for v in model.vertices.iter().filter(|v| !v.is_zero()) {
            let pb = model.pb_mu.get(v).copied();
            let full = model.coeff.get(v).cloned().unwrap_or_default();
            let form = LinearForm {
                constant: full.constant.min(0.0),
                mu: full
                    .mu
                    .into_iter()
                    .filter(|&(i, c)| c < 0.0 || Some(i) == pb)
                    .collect(),
            };
            model.vertex_coeff.insert(v.clone(), form);
        }
        model.structure = model.vertex_sign_check();
        Ok(model)
    }

    fn base(
        f: &Polynomial,
        gs: &[Polynomial],
        pb_mu: BTreeMap<Exponent, usize>,
    ) -> Result<Self, RelaxError> {
        let dim = f.dim();
        for (index, g) in gs.iter().enumerate() {
            if g.dim() != dim {
                return Err(RelaxError::DimensionMismatch {
                    index,
                    expected: dim,
                    got: g.dim(),
                });
            }
        }
        let mut support_union: BTreeSet<Exponent> = f.support().into_iter().collect();
        for g in gs {
            support_union.extend(g.support());
        }
        let zero = Exponent::zero(dim);
        let mut coeff = BTreeMap::new();
        for e in support_union.iter().chain(std::iter::once(&zero)) {
            let mut form = LinearForm::constant(f.coeff(e));
            for (i, g) in gs.iter().enumerate() {
                let c = g.coeff(e);
                if c != 0.0 {
                    form.mu.insert(i, -c);
                }
            }
            coeff.insert(e.clone(), form);
        }
        Ok(LagrangianModel {
            dim,
            num_mu: gs.len(),
            f: f.clone(),
            constraints: gs.to_vec(),
            pb_mu,
            support_union,
            coeff,
            vertices: BTreeSet::new(),
            hull_inner: BTreeSet::new(),
            inner: BTreeSet::new(),
            dropped: BTreeSet::new(),
            vertex_coeff: BTreeMap::new(),
            inner_pos: BTreeMap::new(),
            inner_neg: BTreeMap::new(),
            barycentric: BTreeMap::new(),
            g0_plus: gs.iter().map(|g| g.constant_term().max(0.0)).collect(),
            f0: f.constant_term(),
            structure: Structure::St,
            cover: None,
        })
    }

    fn split_inner(&mut self) {
        for beta in &self.hull_inner {
            let form = &self.coeff[beta];
            if form.is_zero() {
                continue;
            }
            if self.is_lagrangian_square(beta) {
                self.dropped.insert(beta.clone());
            } else {
                self.inner.insert(beta.clone());
                self.inner_pos.insert(beta.clone(), form.positive_part());
                self.inner_neg.insert(beta.clone(), form.negative_part());
            }
        }
    }

    /// Even exponent whose coefficient is nonnegative for all `mu >= 0`.
    pub fn is_lagrangian_square(&self, e: &Exponent) -> bool {
        e.is_even() && self.coeff.get(e).is_some_and(LinearForm::is_nonnegative)
    }

    /// Vertices that some inner circuit draws on.
    pub fn used_vertices(&self) -> BTreeSet<Exponent> {
        self.barycentric
            .values()
            .flat_map(|b| b.support.iter().filter(|e| !e.is_zero()).cloned())
            .collect()
    }

    fn vertex_sign_check(&self) -> Structure {
        let used = self.used_vertices();
        for (v, form) in &self.vertex_coeff {
            let needs = used.contains(v) || !form.negative_part().is_zero();
            if needs && form.num_positive_terms() != 1 {
                return Structure::VertexSign(v.clone());
            }
        }
        Structure::St
    }

    /// Whether every `g_i` appears with one sign per exponent, each vertex
    /// coefficient has a single term, and all `g_{i,0} >= 0`.
    pub fn strict_assumptions_hold(&self) -> bool {
        let one_signed = self
            .inner
            .iter()
            .all(|b| self.inner_pos[b].is_zero() || self.inner_neg[b].is_zero());
        let single_vertex_terms = self.vertex_coeff.values().all(|f| f.terms().len() <= 1);
        let g0_ok = self.constraints.iter().all(|g| g.constant_term() >= 0.0);
        one_signed && single_vertex_terms && g0_ok
    }

    /// `L(x, mu)` as a polynomial.
    pub fn lagrangian_at(&self, mu: &[f64]) -> Polynomial {
        let mut p = self.f.clone();
        for (g, &m) in self.constraints.iter().zip(mu) {
            p = p.sub(&g.scaled(m));
        }
        p
    }
}
