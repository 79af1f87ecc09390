use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{build_lagrangian, FormTerm, LagrangianModel, LinearForm, RelaxError, Structure};
use crate::gp::{GeometricProgram, GpSolution, Monomial, Posynomial};
use crate::poly::{Exponent, Polynomial};

/// Which constrained program was built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    /// `|L(mu)_beta| <= b_beta` with one-signed inner coefficients.
    Strict,
    /// `L(mu)_beta^+ <= b_beta` and `L(mu)_beta^- <= b_beta`.
    Split,
}

/// GP variable indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VarIndex {
    pub mu: Vec<usize>,
    /// `a_{beta, alpha}` keyed by `(beta, alpha)`.
    pub a: BTreeMap<(Exponent, Exponent), usize>,
    pub b: BTreeMap<Exponent, usize>,
}

#[derive(Clone, Debug)]
pub struct SoncGpModel {
    pub gp: GeometricProgram,
    pub vars: VarIndex,
    /// Inner terms whose bound `b_beta` does not depend on `mu`.
    pub b_const: BTreeMap<Exponent, f64>,
    pub f0: f64,
    pub formulation: Formulation,
}

impl SoncGpModel {
    /// `gamma`: the GP objective, zero when the objective is empty.
    pub fn gamma(&self, sol: &GpSolution) -> f64 {
        if self.gp.objective.is_empty() {
            0.0
        } else {
            self.gp.objective.eval(&sol.x)
        }
    }

    /// `f0 - gamma`.
    pub fn bound(&self, sol: &GpSolution) -> f64 {
        self.f0 - self.gamma(sol)
    }

    pub fn mu(&self, sol: &GpSolution) -> Vec<f64> {
        self.vars.mu.iter().map(|&j| sol.x[j]).collect()
    }

    /// Circuit weights `a_{beta, alpha}` at the solution, excluding the
    /// constant vertex.
    pub fn weights(&self, sol: &GpSolution) -> BTreeMap<(Exponent, Exponent), f64> {
        self.vars
            .a
            .iter()
            .map(|(k, &j)| (k.clone(), sol.x[j]))
            .collect()
    }
}

/// Geometric program for an ST polynomial without constraints.
pub fn build_unconstrained_gp(p: &Polynomial) -> Result<SoncGpModel, RelaxError> {
    let model = build_lagrangian(p, &[])?;
    if model.structure != Structure::St {
        return Err(RelaxError::NotSt(model.structure));
    }
    build_constrained_gp(&model)
}

/// Builds the strict program when its assumptions hold, the split one
/// otherwise.
pub fn build_constrained_gp(model: &LagrangianModel) -> Result<SoncGpModel, RelaxError> {
    let formulation = if model.strict_assumptions_hold() {
        Formulation::Strict
    } else {
        Formulation::Split
    };
    build_constrained_gp_with(model, formulation)
}

pub fn build_constrained_gp_with(
    model: &LagrangianModel,
    formulation: Formulation,
) -> Result<SoncGpModel, RelaxError> {
    if model.structure != Structure::St {
        return Err(RelaxError::StructureViolation(model.structure.clone()));
    }
    if formulation == Formulation::Strict && !model.strict_assumptions_hold() {
        return Err(RelaxError::StructureViolation(model.structure.clone()));
    }
    Builder::new(model).build(formulation)
}

struct Builder<'a> {
    model: &'a LagrangianModel,
    num_vars: usize,
    vars: VarIndex,
    b_const: BTreeMap<Exponent, f64>,
    objective: Posynomial,
    ineq: Vec<Posynomial>,
}

impl<'a> Builder<'a> {
    fn new(model: &'a LagrangianModel) -> Self {
        Builder {
            model,
            num_vars: model.num_mu,
            vars: VarIndex {
                mu: (0..model.num_mu).collect(),
                ..VarIndex::default()
            },
            b_const: BTreeMap::new(),
            objective: Posynomial::default(),
            ineq: Vec::new(),
        }
    }

    fn fresh(&mut self) -> usize {
        self.num_vars += 1;
        self.num_vars - 1
    }

    /// `term * extra` as a monomial, where `term` is a form summand.
    fn form_monomial(
        &self,
        (mu, c): FormTerm,
        scale: f64,
        mut extra: Vec<(usize, f64)>,
    ) -> Monomial {
        if let Some(i) = mu {
            extra.push((self.vars.mu[i], 1.0));
        }
        Monomial::new(c * scale, extra)
    }

    fn build(mut self, formulation: Formulation) -> Result<SoncGpModel, RelaxError> {
        let model = self.model;
        for (i, &g0) in model.g0_plus.iter().enumerate() {
            if g0 > 0.0 {
                self.objective
                    .push(Monomial::new(g0, vec![(self.vars.mu[i], 1.0)]));
            }
        }

        for beta in &model.inner {
            let pos = &model.inner_pos[beta];
            let neg = &model.inner_neg[beta];
            let bary = &model.barycentric[beta];
            // b_beta as either a fixed value or a variable
            let b_var = if pos.is_constant() && neg.is_constant() {
                let v = pos.constant.max(neg.constant);
                if v == 0.0 {
                    continue;
                }
                self.b_const.insert(beta.clone(), v);
                None
            } else {
                let j = self.fresh();
                self.vars.b.insert(beta.clone(), j);
                for side in [pos, neg] {
                    if side.is_zero() {
                        continue;
                    }
                    let terms = side
                        .terms()
                        .into_iter()
                        .map(|t| self.form_monomial(t, 1.0, vec![(j, -1.0)]))
                        .collect();
                    self.ineq.push(Posynomial::new(terms));
                }
                Some(j)
            };

            let nz: Vec<(Exponent, f64)> = bary
                .support
                .iter()
                .filter(|e| !e.is_zero())
                .map(|e| (e.clone(), bary.weight(e)))
                .collect();
            let mut a_vars = Vec::with_capacity(nz.len());
            for (alpha, lam) in &nz {
                let j = self.fresh();
                self.vars.a.insert((beta.clone(), alpha.clone()), j);
                a_vars.push((j, *lam));
            }

            let lam0 = bary.zero_weight();
            let log_b = self.b_const.get(beta).map_or(0.0, |v| v.ln());
            if lam0 > 0.0 {
                // lam0 * b^{1/lam0} * prod (lam_a / a)^{lam_a / lam0}
                let mut log_c = lam0.ln() + log_b / lam0;
                let mut exps = Vec::with_capacity(a_vars.len() + 1);
                for &(j, lam) in &a_vars {
                    log_c += lam / lam0 * lam.ln();
                    exps.push((j, -lam / lam0));
                }
                if let Some(j) = b_var {
                    exps.push((j, 1.0 / lam0));
                }
                let c = log_c.exp();
                if !(c.is_finite() && c > 0.0) {
                    return Err(RelaxError::Overflow(beta.clone()));
                }
                self.objective.push(Monomial::new(c, exps));
            } else {
                // b * prod (lam_a / a)^{lam_a} <= 1
                let mut log_c = log_b;
                let mut exps = Vec::with_capacity(a_vars.len() + 1);
                for &(j, lam) in &a_vars {
                    log_c += lam * lam.ln();
                    exps.push((j, -lam));
                }
                if let Some(j) = b_var {
                    exps.push((j, 1.0));
                }
                let c = log_c.exp();
                if !(c.is_finite() && c > 0.0) {
                    return Err(RelaxError::Overflow(beta.clone()));
                }
                self.ineq
                    .push(Posynomial::new(vec![Monomial::new(c, exps)]));
            }
        }

        for (alpha, form) in &model.vertex_coeff {
            self.vertex_constraint(alpha, form);
        }

        let mut gp = GeometricProgram::new(self.num_vars, self.objective);
        gp.ineq = self.ineq;
        Ok(SoncGpModel {
            gp,
            vars: self.vars,
            b_const: self.b_const,
            f0: model.f0,
            formulation,
        })
    }

    /// `(sum_beta a_{beta,alpha} + L_alpha^-) / L_alpha^+ <= 1` with a single
    /// positive summand.
    fn vertex_constraint(&mut self, alpha: &Exponent, form: &LinearForm) {
        let users: Vec<usize> = self
            .vars
            .a
            .iter()
            .filter(|((_, a), _)| a == alpha)
            .map(|(_, &j)| j)
            .collect();
        let neg = form.negative_part();
        if users.is_empty() && neg.is_zero() {
            return;
        }
        let pos = form.positive_part().terms();
        debug_assert_eq!(pos.len(), 1, "checked by the structure test");
        let (pos_mu, pos_c) = pos[0];
        let inv: Vec<(usize, f64)> = pos_mu
            .map(|i| vec![(self.vars.mu[i], -1.0)])
            .unwrap_or_default();

        let mut terms: Vec<Monomial> = users
            .into_iter()
            .map(|j| {
                let mut e = inv.clone();
                e.push((j, 1.0));
                Monomial::new(1.0 / pos_c, e)
            })
            .collect();
        for t in neg.terms() {
            terms.push(self.form_monomial(t, 1.0 / pos_c, inv.clone()));
        }
        if terms.iter().all(|m| m.exps.is_empty())
            && terms.iter().map(|m| m.coeff).sum::<f64>() <= 1.0
        {
            return;
        }
        self.ineq.push(Posynomial::new(terms));
    }
}
