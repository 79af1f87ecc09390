//! Sparse multivariate polynomials over `f64` with exact integer exponents.
//!
//! A [`Polynomial`] is a map from [`Exponent`] vectors to nonzero real
//! coefficients. Geometry of the support (Newton polytope vertices, inner
//! points, barycentric coordinates) lives in [`newton`].

mod lp;
pub mod newton;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use newton::{
    affinely_independent, barycentric, classify_points, classify_support, degenerate_inner_points,
    hull_vertices, in_convex_hull, is_st_polynomial, Barycentric, NewtonInfo, StReason,
};

pub(crate) use lp::convex_cover;

/// Tolerance used for barycentric residuals and weight sums.
pub const BARY_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point {0} is not in the convex hull of the given vertices")]
    NotInHull(Exponent),
    #[error("vertices are affinely dependent")]
    Degenerate,
    #[error("non-finite coefficient {0}")]
    NonFinite(f64),
}

/// Exponent vector of a monomial, `x^e = x_1^e_1 * ... * x_n^e_n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(entries: Vec<u32>) -> Self {
        Exponent(entries)
    }

    pub fn zero(dim: usize) -> Self {
        Exponent(vec![0; dim])
    }

    /// `power * e_i`.
    pub fn axis(dim: usize, i: usize, power: u32) -> Self {
        let mut v = vec![0; dim];
        v[i] = power;
        Exponent(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// All entries even (this includes the zero exponent).
    pub fn is_even(&self) -> bool {
        self.0.iter().all(|&e| e % 2 == 0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn max_entry(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&e| f64::from(e)).collect()
    }

    /// Drops coordinate `i`. Returns `None` if that entry is nonzero.
    pub fn without(&self, i: usize) -> Option<Exponent> {
        if self.0[i] != 0 {
            return None;
        }
        let mut v = self.0.clone();
        v.remove(i);
        Some(Exponent(v))
    }

    /// `x^e` evaluated at `x`, with `0^0 = 1`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Exponent(v)
    }
}

/// Sparse real polynomial in `dim` variables. Stored coefficients are never
/// exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Exponent, f64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Polynomial::zero(dim);
        p.add_term(Exponent::zero(dim), c);
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs. Duplicate
    /// exponents are summed and exact zeros dropped.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Exponent, f64)>,
    {
        let mut p = Polynomial::zero(dim);
        for (e, c) in terms {
            if e.dim() != dim {
                return Err(PolyError::DimensionMismatch {
                    expected: dim,
                    got: e.dim(),
                });
            }
            if !c.is_finite() {
                return Err(PolyError::NonFinite(c));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Convenience constructor from raw exponent vectors; panics on bad input.
    pub fn from_slice(dim: usize, terms: &[(&[u32], f64)]) -> Self {
        Polynomial::from_terms(
            dim,
            terms.iter().map(|(e, c)| (Exponent::new(e.to_vec()), *c)),
        )
        .expect("well-formed terms")
    }

    /// Adds `c * x^e`, removing the term if the result is exactly zero.
    pub fn add_term(&mut self, e: Exponent, c: f64) {
        debug_assert_eq!(e.dim(), self.dim);
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                if c != 0.0 {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = *o.get() + c;
                if sum == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, f64)> + '_ {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coeff(&self, e: &Exponent) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coeff(&Exponent::zero(self.dim))
    }

    pub fn support(&self) -> Vec<Exponent> {
        self.terms.keys().cloned().collect()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Exponent::degree).max().unwrap_or(0)
    }

    /// Largest total degree is at most one and there is at least one
    /// non-constant term.
    pub fn is_linear(&self) -> bool {
        self.degree() <= 1
    }

    /// Highest power of variable `i` among the terms.
    pub fn max_power(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e.get(i)).max().unwrap_or(0)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, PolyError> {
        if x.len() != self.dim {
            return Err(PolyError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(e, &c)| c * e.monomial(x)).sum()
    }

    pub fn scaled(&self, s: f64) -> Polynomial {
        let mut p = Polynomial::zero(self.dim);
        if s != 0.0 {
            for (e, &c) in &self.terms {
                p.add_term(e.clone(), c * s);
            }
        }
        p
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut p = self.clone();
        for (e, &c) in &other.terms {
            p.add_term(e.clone(), c);
        }
        p
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scaled(-1.0))
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut p = Polynomial::zero(self.dim);
        for (e, &c) in &self.terms {
            let k = e.get(i);
            if k > 0 {
                let mut v = e.entries().to_vec();
                v[i] -= 1;
                p.add_term(Exponent::new(v), c * f64::from(k));
            }
        }
        p
    }

    /// Removes variable `i`; fails if any term depends on it.
    pub fn without_variable(&self, i: usize) -> Option<Polynomial> {
        let mut p = Polynomial::zero(self.dim - 1);
        for (e, &c) in &self.terms {
            p.add_term(e.without(i)?, c);
        }
        Some(p)
    }

    /// Whether variable `i` occurs in some term.
    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e.get(i) > 0)
    }

    /// Monomial square: all-even exponent and nonnegative coefficient.
    pub fn is_monomial_square(&self, e: &Exponent) -> bool {
        e.is_even() && self.terms.get(e).is_some_and(|&c| c >= 0.0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &p) in e.entries().iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{p}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn motzkin() -> Polynomial {
        Polynomial::from_slice(
            2,
            &[
                (&[4, 2], 1.0),
                (&[2, 4], 1.0),
                (&[2, 2], -3.0),
                (&[0, 0], 1.0),
            ],
        )
    }

    pub(crate) fn triangle() -> Polynomial {
        Polynomial::from_slice(
            2,
            &[
                (&[6, 4], 1.0),
                (&[3, 3], 1.0),
                (&[2, 6], 1.0),
                (&[2, 5], 1.0),
                (&[2, 2], 1.0),
                (&[0, 0], 1.0),
            ],
        )
    }

    #[test]
    fn motzkin_vanishes_at_ones() {
        assert_eq!(motzkin().evaluate(&[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn triangle_at_origin_is_constant() {
        assert_eq!(triangle().evaluate(&[0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn all_ones_gives_coefficient_sum() {
        let p = triangle().add(&motzkin());
        let sum: f64 = p.terms().map(|(_, c)| c).sum();
        assert!((p.evaluate(&[1.0, 1.0]).unwrap() - sum).abs() < 1e-12);
    }

    #[test]
    fn evaluate_rejects_wrong_dimension() {
        assert_eq!(
            motzkin().evaluate(&[1.0]),
            Err(PolyError::DimensionMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn duplicates_summed_and_zeros_dropped() {
        let p = Polynomial::from_slice(2, &[(&[2, 2], -1.0), (&[2, 2], -2.0), (&[1, 0], 0.0)]);
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&Exponent::new(vec![2, 2])), -3.0);
        let q = Polynomial::from_slice(1, &[(&[1], 2.0), (&[1], -2.0)]);
        assert!(q.is_empty());
    }

    #[test]
    fn derivative_and_variable_removal() {
        let p = Polynomial::from_slice(2, &[(&[3, 0], 2.0), (&[0, 1], 1.0), (&[0, 0], 4.0)]);
        let d = p.derivative(0);
        assert_eq!(d.coeff(&Exponent::new(vec![2, 0])), 6.0);
        assert_eq!(d.len(), 1);
        assert!(p.without_variable(1).is_none());
        let q = Polynomial::from_slice(2, &[(&[3, 0], 2.0), (&[0, 0], 4.0)]);
        let r = q.without_variable(1).unwrap();
        assert_eq!(r.dim(), 1);
        assert_eq!(r.coeff(&Exponent::new(vec![3])), 2.0);
    }

    #[test]
    fn zero_to_the_zero_is_one() {
        let p = Polynomial::from_slice(2, &[(&[0, 3], 1.0), (&[0, 0], 2.0)]);
        assert_eq!(p.evaluate(&[0.0, 0.0]).unwrap(), 2.0);
    }
}
