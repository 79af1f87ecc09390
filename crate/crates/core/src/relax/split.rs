use std::collections::BTreeMap;

use super::RelaxError;
use crate::poly::{classify_support, convex_cover, Exponent, Polynomial};

/// ST pieces plus the monomial squares no piece uses; together they sum to
/// the input.
#[derive(Clone, Debug, PartialEq)]
pub struct StSplit {
    pub pieces: Vec<Polynomial>,
    pub remainder: Polynomial,
}

impl StSplit {
    pub fn total(&self) -> Polynomial {
        self.pieces
            .iter()
            .fold(self.remainder.clone(), |acc, p| acc.add(p))
    }
}

/// One piece per non-monomial-square term: the term plus an affinely
/// independent monomial-square cover found by LP (maximizing the weight of
/// the constant term when present). Shared monomial squares are split
/// evenly between the pieces using them.
pub fn split_into_st(p: &Polynomial) -> Result<StSplit, RelaxError> {
    let info = classify_support(p);
    if let Some(v) = info.vertices.iter().find(|v| !info.mosq.contains(*v)) {
        return Err(RelaxError::NoCover(v.clone()));
    }
    let candidates: Vec<&Exponent> = info.mosq.iter().collect();
    let prefer = candidates.iter().position(|e| e.is_zero());

    let mut covers: Vec<(Exponent, Vec<Exponent>)> = Vec::new();
    let mut uses: BTreeMap<Exponent, usize> = BTreeMap::new();
    for beta in &info.non_mosq {
        let cover = convex_cover(beta, &candidates, prefer)
            .ok_or_else(|| RelaxError::NoCover(beta.clone()))?;
        let used: Vec<Exponent> = cover.iter().map(|&(j, _)| candidates[j].clone()).collect();
        for e in &used {
            *uses.entry(e.clone()).or_default() += 1;
        }
        covers.push((beta.clone(), used));
    }

    let pieces = covers
        .into_iter()
        .map(|(beta, used)| {
            let mut piece = Polynomial::zero(p.dim());
            piece.add_term(beta.clone(), p.coeff(&beta));
            for e in used {
                piece.add_term(e.clone(), p.coeff(&e) / uses[&e] as f64);
            }
            piece
        })
        .collect();
    let mut remainder = Polynomial::zero(p.dim());
    for e in info.mosq.iter().filter(|e| !uses.contains_key(*e)) {
        remainder.add_term(e.clone(), p.coeff(e));
    }
    Ok(StSplit { pieces, remainder })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::is_st_polynomial;
    use crate::poly::tests::motzkin;

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v.to_vec())
    }

    #[test]
    fn circuit_is_a_single_piece() {
        let s = split_into_st(&motzkin()).unwrap();
        assert_eq!(s.pieces, vec![motzkin()]);
        assert!(s.remainder.is_empty());
    }

    #[test]
    fn shared_vertices_are_halved() {
        let p = Polynomial::from_slice(
            2,
            &[
                (&[4, 0], 1.0),
                (&[0, 4], 1.0),
                (&[0, 0], 1.0),
                (&[1, 1], -1.0),
                (&[2, 2], -1.0),
            ],
        );
        let s = split_into_st(&p).unwrap();
        assert_eq!(s.pieces.len(), 2);
        for piece in &s.pieces {
            assert_eq!(piece.coeff(&e(&[4, 0])), 0.5);
            assert_eq!(piece.coeff(&e(&[0, 4])), 0.5);
        }
        // x^2 y^2 sits on the edge, so only the x y piece needs the constant
        let with_one: Vec<_> = s.pieces.iter().map(|q| q.coeff(&e(&[0, 0]))).collect();
        assert_eq!(with_one.iter().sum::<f64>(), 1.0);
        assert_eq!(s.total(), p);
    }

    #[test]
    fn non_simplex_support_splits_into_st_pieces() {
        // square Newton polytope with two inner terms
        let p = Polynomial::from_slice(
            2,
            &[
                (&[0, 0], 1.0),
                (&[4, 0], 1.0),
                (&[0, 4], 1.0),
                (&[4, 4], 1.0),
                (&[3, 1], -0.5),
                (&[1, 3], -0.5),
                (&[2, 2], 0.3),
            ],
        );
        assert!(!is_st_polynomial(&p).0);
        let s = split_into_st(&p).unwrap();
        assert_eq!(s.pieces.len(), 2);
        for piece in &s.pieces {
            assert!(is_st_polynomial(piece).0, "{piece}");
        }
        let total = s.total();
        for (k, c) in p.terms() {
            assert!((total.coeff(k) - c).abs() < 1e-12);
        }
        assert_eq!(total.len(), p.len());
    }

    #[test]
    fn uncovered_term_fails() {
        // x y outside conv{x^2, 1}
        let p = Polynomial::from_slice(2, &[(&[2, 0], 1.0), (&[0, 0], 1.0), (&[1, 1], -1.0)]);
        assert!(matches!(split_into_st(&p), Err(RelaxError::NoCover(_))));
    }
}
