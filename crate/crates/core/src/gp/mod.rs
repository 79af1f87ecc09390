//! Geometric programs and their log-transformed convex form.
//!
//! A GP minimizes a posynomial subject to posynomial `<= 1` and monomial
//! `= 1` constraints over strictly positive variables. With `y = log x` every
//! posynomial becomes `log sum_k exp(log c_k + a_k . y)`, a smooth convex
//! function, and monomial equalities become affine.

mod solver;

use thiserror::Error;

pub use solver::{GpSolution, GpSolver, GpStatus, KktResiduals};

/// Default lower clamp for GP variables.
pub const DEFAULT_VAR_FLOOR: f64 = 1e-12;
/// Default upper clamp for GP variables.
pub const DEFAULT_VAR_CEILING: f64 = 1e40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error("monomial coefficient must be positive and finite, got {0}")]
    BadCoefficient(f64),
    #[error("exponent for variable {var} must be finite, got {value}")]
    BadExponent { var: usize, value: f64 },
    #[error("variable index {var} out of range for {num_vars} variables")]
    VariableOutOfRange { var: usize, num_vars: usize },
    #[error("variable bounds must satisfy 0 < floor < ceiling")]
    BadBounds,
}

/// `coeff * prod_j x_j^{exps_j}` with sparse real exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub exps: Vec<(usize, f64)>,
}

impl Monomial {
    pub fn new(coeff: f64, exps: Vec<(usize, f64)>) -> Self {
        let mut exps: Vec<(usize, f64)> = exps.into_iter().filter(|&(_, a)| a != 0.0).collect();
        exps.sort_by_key(|&(j, _)| j);
        // merge repeated variables
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(exps.len());
        for (j, a) in exps {
            match merged.last_mut() {
                Some((k, b)) if *k == j => *b += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        Monomial {
            coeff,
            exps: merged,
        }
    }

    pub fn constant(coeff: f64) -> Self {
        Monomial::new(coeff, Vec::new())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.exps
            .iter()
            .fold(self.coeff, |acc, &(j, a)| acc * x[j].powf(a))
    }

    /// `log c + a . y`.
    pub fn log_eval(&self, y: &[f64]) -> f64 {
        self.exps
            .iter()
            .fold(self.coeff.ln(), |acc, &(j, a)| acc + a * y[j])
    }

    fn validate(&self, num_vars: usize) -> Result<(), GpError> {
        if !(self.coeff > 0.0 && self.coeff.is_finite()) {
            return Err(GpError::BadCoefficient(self.coeff));
        }
        for &(var, value) in &self.exps {
            if var >= num_vars {
                return Err(GpError::VariableOutOfRange { var, num_vars });
            }
            if !value.is_finite() {
                return Err(GpError::BadExponent { var, value });
            }
        }
        Ok(())
    }
}

/// Sum of monomials.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Posynomial {
    pub terms: Vec<Monomial>,
}

impl Posynomial {
    pub fn new(terms: Vec<Monomial>) -> Self {
        Posynomial { terms }
    }

    pub fn push(&mut self, m: Monomial) {
        self.terms.push(m);
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|m| m.eval(x)).sum()
    }

    fn validate(&self, num_vars: usize) -> Result<(), GpError> {
        self.terms.iter().try_for_each(|m| m.validate(num_vars))
    }
}

/// `min p0(x)  s.t.  p_i(x) <= 1,  q_j(x) = 1,  floor <= x <= ceiling`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricProgram {
    pub num_vars: usize,
    pub objective: Posynomial,
    pub ineq: Vec<Posynomial>,
    pub mono_eq: Vec<Monomial>,
    pub var_floor: f64,
    pub var_ceiling: f64,
}

impl GeometricProgram {
    pub fn new(num_vars: usize, objective: Posynomial) -> Self {
        GeometricProgram {
            num_vars,
            objective,
            ineq: Vec::new(),
            mono_eq: Vec::new(),
            var_floor: DEFAULT_VAR_FLOOR,
            var_ceiling: DEFAULT_VAR_CEILING,
        }
    }

    pub fn validate(&self) -> Result<(), GpError> {
        if !(self.var_floor > 0.0
            && self.var_floor < self.var_ceiling
            && self.var_ceiling.is_finite())
        {
            return Err(GpError::BadBounds);
        }
        self.objective.validate(self.num_vars)?;
        for p in &self.ineq {
            p.validate(self.num_vars)?;
        }
        for m in &self.mono_eq {
            m.validate(self.num_vars)?;
        }
        Ok(())
    }
}

/// `log sum_k exp(b_k + a_k . y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSumExp {
    pub offsets: Vec<f64>,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl LogSumExp {
    fn from_posynomial(p: &Posynomial) -> Self {
        LogSumExp {
            offsets: p.terms.iter().map(|m| m.coeff.ln()).collect(),
            rows: p.terms.iter().map(|m| m.exps.clone()).collect(),
        }
    }

    fn affine_values(&self, y: &[f64]) -> Vec<f64> {
        self.offsets
            .iter()
            .zip(&self.rows)
            .map(|(&b, row)| row.iter().fold(b, |acc, &(j, a)| acc + a * y[j]))
            .collect()
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        let z = self.affine_values(y);
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + z.iter().map(|&v| (v - m).exp()).sum::<f64>().ln()
    }

    /// Value with gradient and Hessian restricted to the variables the
    /// function depends on.
    pub(crate) fn local_derivs(&self, y: &[f64]) -> LocalDerivs {
        let mut vars: Vec<usize> = self.rows.iter().flatten().map(|&(j, _)| j).collect();
        vars.sort_unstable();
        vars.dedup();
        let k = vars.len();
        let local = |j: usize| vars.binary_search(&j).expect("variable present");
        let mut grad = vec![0.0; k];
        let mut hess = vec![0.0; k * k];
        let z = self.affine_values(y);
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = z.iter().map(|&v| (v - m).exp()).collect();
        let total: f64 = w.iter().sum();
        for (wk, row) in w.iter().zip(&self.rows) {
            let p = wk / total;
            for &(j, a) in row {
                let lj = local(j);
                grad[lj] += p * a;
                for &(l, b) in row {
                    hess[lj * k + local(l)] += p * a * b;
                }
            }
        }
        for j in 0..k {
            for l in 0..k {
                hess[j * k + l] -= grad[j] * grad[l];
            }
        }
        LocalDerivs {
            value: m + total.ln(),
            vars,
            grad,
            hess,
        }
    }
}

/// Derivatives of a function over the subset `vars` of the variables.
#[derive(Clone, Debug)]
pub(crate) struct LocalDerivs {
    pub value: f64,
    pub vars: Vec<usize>,
    pub grad: Vec<f64>,
    /// Row-major `vars.len() x vars.len()`.
    pub hess: Vec<f64>,
}

/// Affine equality `sum_j a_j y_j = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineEq {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// The log-transformed program: minimize `objective(y)` subject to
/// `ineq_k(y) <= 0`, equalities, and `lower <= y <= upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogProgram {
    pub num_vars: usize,
    pub objective: LogSumExp,
    pub ineq: Vec<LogSumExp>,
    pub eq: Vec<AffineEq>,
    pub lower: f64,
    pub upper: f64,
}

pub fn log_transform(gp: &GeometricProgram) -> LogProgram {
    LogProgram {
        num_vars: gp.num_vars,
        objective: LogSumExp::from_posynomial(&gp.objective),
        ineq: gp
            .ineq
            .iter()
            .filter(|p| !p.is_empty())
            .map(LogSumExp::from_posynomial)
            .collect(),
        eq: gp
            .mono_eq
            .iter()
            .map(|m| AffineEq {
                coeffs: m.exps.clone(),
                rhs: -m.coeff.ln(),
            })
            .collect(),
        lower: gp.var_floor.ln(),
        upper: gp.var_ceiling.ln(),
    }
}
