//! Circuit-polynomial nonnegativity and ST-polynomial SONC decompositions.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::poly::{
    affinely_independent, barycentric, classify_support, Barycentric, Exponent, Polynomial,
};

/// Absolute slack accepted on the circuit-number comparison.
pub const CIRCUIT_SLACK: f64 = 1e-9;
/// Relative slack used when checking a decomposition.
pub const DECOMP_SLACK: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertError {
    #[error("vertex coefficient {coeff} at {exponent} is not positive")]
    NonPositiveVertex { exponent: Exponent, coeff: f64 },
    #[error("not a circuit polynomial: {0}")]
    NotCircuit(String),
}

/// Outcome of the circuit-number test for a single circuit polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitCertificate {
    pub theta: f64,
    pub beta: Exponent,
    pub beta_coeff: f64,
    pub beta_even: bool,
    pub nonnegative: bool,
}

impl CircuitCertificate {
    fn new(theta: f64, beta: Exponent, beta_coeff: f64) -> Self {
        let beta_even = beta.is_even();
        let nonnegative = if beta_even {
            beta_coeff >= -theta - CIRCUIT_SLACK
        } else {
            beta_coeff.abs() <= theta + CIRCUIT_SLACK
        };
        CircuitCertificate {
            theta,
            beta,
            beta_coeff,
            beta_even,
            nonnegative,
        }
    }
}

/// `prod_{a in nz(b)} (f_a / l_a)^{l_a}`, evaluated in log space.
pub fn circuit_number(
    vertex_coeffs: &BTreeMap<Exponent, f64>,
    bary: &Barycentric,
) -> Result<f64, CertError> {
    let mut log_theta = 0.0;
    for a in &bary.support {
        let lambda = bary.weight(a);
        let c = vertex_coeffs.get(a).copied().unwrap_or(0.0);
        if c <= 0.0 {
            return Err(CertError::NonPositiveVertex {
                exponent: a.clone(),
                coeff: c,
            });
        }
        log_theta += lambda * (c.ln() - lambda.ln());
    }
    Ok(log_theta.exp())
}

/// Nonnegativity test for a circuit polynomial (simplex of monomial squares
/// plus exactly one inner term).
pub fn circuit_nonneg(p: &Polynomial) -> Result<CircuitCertificate, CertError> {
    let info = classify_support(p);
    if info.inner.len() != 1 {
        return Err(CertError::NotCircuit(format!(
            "expected one inner term, found {}",
            info.inner.len()
        )));
    }
    if let Some(v) = info.vertices.iter().find(|v| !info.mosq.contains(*v)) {
        return Err(CertError::NotCircuit(format!(
            "vertex {v} is not a monomial square"
        )));
    }
    let verts: Vec<Exponent> = info.vertices.iter().cloned().collect();
    if !affinely_independent(&verts) {
        return Err(CertError::NotCircuit(
            "vertices are affinely dependent".into(),
        ));
    }
    let beta = info.inner.iter().next().cloned().expect("one inner term");
    let bary = barycentric(&verts, &beta).map_err(|e| CertError::NotCircuit(e.to_string()))?;
    let coeffs: BTreeMap<Exponent, f64> = verts.iter().map(|v| (v.clone(), p.coeff(v))).collect();
    let theta = circuit_number(&coeffs, &bary)?;
    Ok(CircuitCertificate::new(theta, beta.clone(), p.coeff(&beta)))
}

/// One circuit of a decomposition: weights on the simplex vertices plus the
/// inner term `(beta, f_beta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub vertex_part: BTreeMap<Exponent, f64>,
    pub inner: (Exponent, f64),
}

impl Circuit {
    pub fn to_polynomial(&self) -> Polynomial {
        let dim = self.inner.0.dim();
        let terms = self
            .vertex_part
            .iter()
            .map(|(e, &c)| (e.clone(), c))
            .chain(std::iter::once(self.inner.clone()));
        Polynomial::from_terms(dim, terms).expect("consistent dimensions")
    }
}

/// Weights `a_{beta,alpha}` splitting the vertex coefficients of an
/// ST-polynomial among its inner terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SoncDecomposition {
    pub weights: BTreeMap<(Exponent, Exponent), f64>,
    pub circuits: Vec<Circuit>,
}

impl SoncDecomposition {
    /// Assembles the circuit list for `p` from the weight map.
    pub fn from_weights(p: &Polynomial, weights: BTreeMap<(Exponent, Exponent), f64>) -> Self {
        let mut by_beta: BTreeMap<Exponent, BTreeMap<Exponent, f64>> = BTreeMap::new();
        for ((beta, alpha), &w) in &weights {
            by_beta
                .entry(beta.clone())
                .or_default()
                .insert(alpha.clone(), w);
        }
        let circuits = by_beta
            .into_iter()
            .map(|(beta, vertex_part)| {
                let c = p.coeff(&beta);
                Circuit {
                    vertex_part,
                    inner: (beta, c),
                }
            })
            .collect();
        SoncDecomposition { weights, circuits }
    }

    pub fn weight(&self, beta: &Exponent, alpha: &Exponent) -> f64 {
        self.weights
            .get(&(beta.clone(), alpha.clone()))
            .copied()
            .unwrap_or(0.0)
    }
}

/// Result of checking a decomposition: `ok` plus the violated conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionCheck {
    pub ok: bool,
    pub violations: Vec<String>,
}

/// Checks the two inequalities that make `d` a SONC certificate for the
/// ST-polynomial `p`.
pub fn verify_st_sonc(p: &Polynomial, d: &SoncDecomposition) -> DecompositionCheck {
    let mut violations = Vec::new();
    let info = classify_support(p);
    let verts: Vec<Exponent> = info.vertices.iter().cloned().collect();

    for beta in &info.inner {
        let f_beta = p.coeff(beta);
        let bary = match barycentric(&verts, beta) {
            Ok(b) => b,
            Err(e) => {
                violations.push(format!("inner term {beta}: {e}"));
                continue;
            }
        };
        let mut log_prod = 0.0;
        for a in &bary.support {
            let lambda = bary.weight(a);
            let w = d.weight(beta, a);
            if w <= 0.0 {
                log_prod = f64::NEG_INFINITY;
                break;
            }
            log_prod += lambda * (w.ln() - lambda.ln());
        }
        let prod = log_prod.exp();
        if f_beta.abs() > prod * (1.0 + DECOMP_SLACK) + f64::MIN_POSITIVE {
            violations.push(format!(
                "inner term {beta}: |{f_beta}| exceeds circuit product {prod}"
            ));
        }
    }

    for alpha in &verts {
        let used: f64 = info.inner.iter().map(|b| d.weight(b, alpha)).sum();
        let f_alpha = p.coeff(alpha);
        if used > f_alpha + DECOMP_SLACK * f_alpha.abs().max(1.0) {
            violations.push(format!(
                "vertex {alpha}: weights sum to {used} > coefficient {f_alpha}"
            ));
        }
    }

    DecompositionCheck {
        ok: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v.to_vec())
    }

    fn motzkin() -> Polynomial {
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

    fn motzkin_weights(a: f64) -> BTreeMap<(Exponent, Exponent), f64> {
        [&[4u32, 2][..], &[2, 4], &[0, 0]]
            .iter()
            .map(|v| ((e(&[2, 2]), e(v)), a))
            .collect()
    }

    #[test]
    fn motzkin_circuit_number_is_three() {
        let verts = vec![e(&[4, 2]), e(&[2, 4]), e(&[0, 0])];
        let bary = barycentric(&verts, &e(&[2, 2])).unwrap();
        let coeffs = verts.iter().map(|v| (v.clone(), 1.0)).collect();
        assert!((circuit_number(&coeffs, &bary).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_vertex_theta_is_coefficient() {
        let verts = vec![e(&[4]), e(&[0])];
        let bary = barycentric(&verts, &e(&[4])).unwrap();
        let coeffs = [(e(&[4]), 2.5), (e(&[0]), 1.0)].into_iter().collect();
        assert!((circuit_number(&coeffs, &bary).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn circuit_number_rejects_nonpositive_vertex() {
        let verts = vec![e(&[2]), e(&[0])];
        let bary = barycentric(&verts, &e(&[1])).unwrap();
        let coeffs = [(e(&[2]), 1.0), (e(&[0]), -1.0)].into_iter().collect();
        assert!(matches!(
            circuit_number(&coeffs, &bary),
            Err(CertError::NonPositiveVertex { .. })
        ));
    }

    #[test]
    fn univariate_quadratics() {
        let bad = Polynomial::from_slice(1, &[(&[2], 1.0), (&[1], -4.0), (&[0], 1.0)]);
        let c = circuit_nonneg(&bad).unwrap();
        assert!((c.theta - 2.0).abs() < 1e-12);
        assert!(!c.nonnegative);

        let square = Polynomial::from_slice(1, &[(&[2], 1.0), (&[1], -2.0), (&[0], 1.0)]);
        assert!(circuit_nonneg(&square).unwrap().nonnegative);
    }

    #[test]
    fn motzkin_is_a_nonnegative_circuit() {
        let c = circuit_nonneg(&motzkin()).unwrap();
        assert!((c.theta - 3.0).abs() < 1e-12);
        assert!(c.beta_even);
        assert_eq!(c.beta_coeff, -3.0);
        assert!(c.nonnegative);
    }

    #[test]
    fn non_circuits_are_rejected() {
        let two_inner =
            Polynomial::from_slice(1, &[(&[4], 1.0), (&[2], -1.0), (&[1], 1.0), (&[0], 1.0)]);
        assert!(matches!(
            circuit_nonneg(&two_inner),
            Err(CertError::NotCircuit(_))
        ));
        let odd_vertex = Polynomial::from_slice(1, &[(&[3], 1.0), (&[1], 1.0), (&[0], 1.0)]);
        assert!(matches!(
            circuit_nonneg(&odd_vertex),
            Err(CertError::NotCircuit(_))
        ));
    }

    #[test]
    fn motzkin_decompositions() {
        let m = motzkin();
        let good = SoncDecomposition::from_weights(&m, motzkin_weights(1.0));
        assert!(verify_st_sonc(&m, &good).ok);
        assert_eq!(good.circuits.len(), 1);
        assert!(
            circuit_nonneg(&good.circuits[0].to_polynomial())
                .unwrap()
                .nonnegative
        );

        let half = SoncDecomposition::from_weights(&m, motzkin_weights(0.5));
        let check = verify_st_sonc(&m, &half);
        assert!(!check.ok);
        assert_eq!(check.violations.len(), 1);

        let zero = SoncDecomposition::from_weights(&m, BTreeMap::new());
        assert!(!verify_st_sonc(&m, &zero).ok);
    }

    #[test]
    fn theta_scales_linearly() {
        let verts = vec![e(&[6, 4]), e(&[2, 6]), e(&[0, 0])];
        let bary = barycentric(&verts, &e(&[3, 3])).unwrap();
        let base: BTreeMap<_, _> = verts
            .iter()
            .zip([1.5, 0.7, 2.0])
            .map(|(v, c)| (v.clone(), c))
            .collect();
        let t0 = circuit_number(&base, &bary).unwrap();
        for t in [0.01, 0.5, 3.0, 1e4] {
            let scaled = base.iter().map(|(k, v)| (k.clone(), v * t)).collect();
            let t1 = circuit_number(&scaled, &bary).unwrap();
            assert!((t1 / (t0 * t) - 1.0).abs() < 1e-12);
        }
    }
}
