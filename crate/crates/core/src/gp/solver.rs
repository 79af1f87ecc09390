//! Phase-1 / phase-2 log-barrier interior-point method for log-transformed
//! geometric programs.
//!
//! Box bounds `log floor <= y_j <= log ceiling` are handled as affine
//! inequalities, equalities by restricting to `y = y_p + N z` with `N` a
//! nullspace basis. Each barrier stage is centered with damped Newton steps
//! and a backtracking line search; the barrier weight grows by 10 per stage.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{log_transform, GeometricProgram, GpError, LogProgram};

/// Newton-decrement threshold for a centered point.
const CENTER_EPS: f64 = 1e-11;
/// Decrement below which repeated non-convergence counts as centered.
const STALL_EPS: f64 = 1e-7;
const STALL_ROUNDS: usize = 5;
/// Phase-1 optimum above this means infeasible.
const INFEASIBLE_MARGIN: f64 = 1e-6;
/// Hard cap on barrier stages.
const MAX_STAGES: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NumericalError,
    /// Stopped by the wall-clock limit.
    Interrupted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KktResiduals {
    /// `|| grad f0 + sum_k lambda_k grad c_k ||_inf` in the reduced space.
    pub stationarity: f64,
    /// `sum_k lambda_k (-c_k)`, equal to the barrier duality gap.
    pub complementarity: f64,
    /// `max(0, max_k c_k)` in log space.
    pub primal_infeasibility: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GpSolution {
    pub status: GpStatus,
    /// Posynomial objective at `x` (not its logarithm).
    pub objective_value: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residuals: KktResiduals,
    /// Final phase-1 value when phase 1 ran.
    pub phase1_value: Option<f64>,
}

impl GpSolution {
    fn terminal(status: GpStatus, x: Vec<f64>, iterations: usize) -> Self {
        GpSolution {
            status,
            objective_value: f64::NAN,
            x,
            iterations,
            residuals: KktResiduals::default(),
            phase1_value: None,
        }
    }
}

/// Interior-point settings. One `solve` call owns all mutable state, so a
/// solver value can be shared between threads.
#[derive(Clone, Debug)]
pub struct GpSolver {
    pub tol: f64,
    /// Newton steps allowed per barrier stage.
    pub max_iter: usize,
    pub time_limit: Option<Duration>,
    /// Log-objective below which the program is reported unbounded.
    pub unbounded_log_threshold: f64,
}

impl Default for GpSolver {
    fn default() -> Self {
        GpSolver {
            tol: 1e-8,
            max_iter: 200,
            time_limit: None,
            unbounded_log_threshold: -30.0,
        }
    }
}

impl GpSolver {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_time_limit(mut self, limit: Option<Duration>) -> Self {
        self.time_limit = limit;
        self
    }

    pub fn solve(&self, gp: &GeometricProgram) -> Result<GpSolution, GpError> {
        gp.validate()?;
        assert!(self.tol > 0.0, "tolerance must be positive");
        let prog = log_transform(gp);
        let mut run = Run::new(self, &prog);
        let mut sol = run.solve();
        if sol.x.len() == gp.num_vars && !gp.objective.is_empty() {
            sol.objective_value = gp.objective.eval(&sol.x);
        }
        Ok(sol)
    }
}

enum Stop {
    Centered,
    /// Phase 1 reached a strictly feasible point.
    Feasible,
    Unbounded,
    IterLimit,
    Interrupted,
    Numerical,
}

struct Run<'a> {
    cfg: &'a GpSolver,
    prog: &'a LogProgram,
    start: Instant,
    y_p: DVector<f64>,
    /// Nullspace basis of the equality system; `None` means identity.
    basis: Option<DMatrix<f64>>,
    iterations: usize,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a GpSolver, prog: &'a LogProgram) -> Self {
        Run {
            cfg,
            prog,
            start: Instant::now(),
            y_p: DVector::zeros(prog.num_vars),
            basis: None,
            iterations: 0,
        }
    }

    fn n(&self) -> usize {
        self.prog.num_vars
    }

    fn reduced_dim(&self) -> usize {
        self.basis.as_ref().map_or(self.n(), |b| b.ncols())
    }

    /// Number of barrier terms (inequalities plus two bounds per variable).
    fn num_barrier_terms(&self) -> usize {
        self.prog.ineq.len() + 2 * self.n()
    }

    fn y_of(&self, z: &[f64]) -> Vec<f64> {
        match &self.basis {
            None => z.to_vec(),
            Some(b) => {
                let zv = DVector::from_column_slice(z);
                (&self.y_p + b * zv).as_slice().to_vec()
            }
        }
    }

    fn to_x(&self, z: &[f64]) -> Vec<f64> {
        self.y_of(z).iter().map(|v| v.exp()).collect()
    }

    fn constraint_values(&self, y: &[f64]) -> Vec<f64> {
        let mut c: Vec<f64> = self.prog.ineq.iter().map(|f| f.value(y)).collect();
        for &yj in y {
            c.push(self.prog.lower - yj);
            c.push(yj - self.prog.upper);
        }
        c
    }

    fn timed_out(&self) -> bool {
        self.cfg
            .time_limit
            .is_some_and(|lim| self.start.elapsed() > lim)
    }

    fn setup_equalities(&mut self) -> Result<(), GpStatus> {
        let eq = &self.prog.eq;
        if eq.is_empty() {
            return Ok(());
        }
        let n = self.n();
        let mut e = DMatrix::zeros(eq.len(), n);
        let mut d = DVector::zeros(eq.len());
        for (r, row) in eq.iter().enumerate() {
            for &(j, a) in &row.coeffs {
                e[(r, j)] += a;
            }
            d[r] = row.rhs;
        }
        let svd = e.clone().svd(true, true);
        let y_p = svd.solve(&d, 1e-12).map_err(|_| GpStatus::NumericalError)?;
        let resid = (&e * &y_p - &d).amax();
        if resid > 1e-9 * (1.0 + d.amax()) {
            return Err(GpStatus::Infeasible);
        }
        let gram = e.transpose() * &e;
        let eig = SymmetricEigen::new(gram);
        let scale = eig.eigenvalues.amax().max(1.0);
        let cols: Vec<DVector<f64>> = (0..n)
            .filter(|&k| eig.eigenvalues[k].abs() <= 1e-10 * scale)
            .map(|k| eig.eigenvectors.column(k).into_owned())
            .collect();
        self.y_p = y_p;
        self.basis = Some(if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&cols)
        });
        Ok(())
    }

    fn solve(&mut self) -> GpSolution {
        if let Err(status) = self.setup_equalities() {
            return GpSolution::terminal(status, Vec::new(), 0);
        }
        let k = self.reduced_dim();
        let mut z = vec![0.0; k];
        if self.basis.is_none() {
            // start at x = 1, clipped into the box
            let mid = 0.5 * (self.prog.lower + self.prog.upper);
            if !(self.prog.lower < 0.0 && 0.0 < self.prog.upper) {
                z.iter_mut().for_each(|v| *v = mid);
            }
        }

        let mut phase1_value = None;
        let c0 = self.constraint_values(&self.y_of(&z));
        let worst = c0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !worst.is_finite() && worst != f64::NEG_INFINITY {
            return GpSolution::terminal(GpStatus::NumericalError, self.to_x(&z), 0);
        }
        if worst >= 0.0 {
            match self.phase1(&mut z, worst) {
                Ok(s) => phase1_value = Some(s),
                Err((status, s)) => {
                    let mut sol = GpSolution::terminal(status, self.to_x(&z), self.iterations);
                    sol.phase1_value = s;
                    return sol;
                }
            }
        }

        let mut sol = if self.prog.objective.rows.is_empty() {
            // zero objective: any feasible point is optimal
            let y = self.y_of(&z);
            let worst = self
                .constraint_values(&y)
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            GpSolution {
                status: GpStatus::Optimal,
                objective_value: 0.0,
                x: self.to_x(&z),
                iterations: self.iterations,
                residuals: KktResiduals {
                    stationarity: 0.0,
                    complementarity: 0.0,
                    primal_infeasibility: worst.max(0.0),
                },
                phase1_value: None,
            }
        } else {
            self.phase2(&mut z)
        };
        sol.phase1_value = phase1_value;
        sol
    }

    fn phase1(&mut self, z: &mut [f64], worst: f64) -> Result<f64, (GpStatus, Option<f64>)> {
        let k = self.reduced_dim();
        let mut v = z.to_vec();
        v.push(worst + 1.0);
        let m = self.num_barrier_terms() as f64;
        let mut t = 1.0;
        for _ in 0..MAX_STAGES {
            let stop = self.center(&mut v, t, true);
            let s = v[k];
            match stop {
                Stop::Feasible => {
                    z.copy_from_slice(&v[..k]);
                    return Ok(s);
                }
                Stop::Centered => {
                    let y = self.y_of(&v[..k]);
                    let max_c = self
                        .constraint_values(&y)
                        .into_iter()
                        .fold(f64::NEG_INFINITY, f64::max);
                    if max_c < 0.0 {
                        z.copy_from_slice(&v[..k]);
                        return Ok(s);
                    }
                    if s - m / t > INFEASIBLE_MARGIN {
                        z.copy_from_slice(&v[..k]);
                        return Err((GpStatus::Infeasible, Some(s)));
                    }
                    if m / t < 1e-12 {
                        z.copy_from_slice(&v[..k]);
                        return Err((GpStatus::NumericalError, Some(s)));
                    }
                }
                Stop::IterLimit => return Err((GpStatus::IterationLimit, Some(s))),
                Stop::Interrupted => return Err((GpStatus::Interrupted, Some(s))),
                Stop::Numerical | Stop::Unbounded => {
                    return Err((GpStatus::NumericalError, Some(s)))
                }
            }
            t *= 10.0;
        }
        Err((GpStatus::IterationLimit, Some(v[k])))
    }

    fn phase2(&mut self, z: &mut Vec<f64>) -> GpSolution {
        let m = self.num_barrier_terms() as f64;
        let mut t = 1.0;
        let mut status = GpStatus::IterationLimit;
        for _ in 0..MAX_STAGES {
            match self.center(z, t, false) {
                Stop::Centered | Stop::Feasible => {
                    if m / t <= self.cfg.tol {
                        status = GpStatus::Optimal;
                        break;
                    }
                }
                Stop::Unbounded => {
                    status = GpStatus::Unbounded;
                    break;
                }
                Stop::IterLimit => {
                    status = GpStatus::IterationLimit;
                    break;
                }
                Stop::Interrupted => {
                    status = GpStatus::Interrupted;
                    break;
                }
                Stop::Numerical => {
                    status = GpStatus::NumericalError;
                    break;
                }
            }
            t *= 10.0;
        }
        let residuals = self.residuals(z, t);
        GpSolution {
            status,
            objective_value: f64::NAN,
            x: self.to_x(z),
            iterations: self.iterations,
            residuals,
            phase1_value: None,
        }
    }

    /// KKT residuals with barrier multipliers `1 / (t (-c_k))`, refined by a
    /// least-squares fit on the near-active constraints when that is smaller.
    fn residuals(&self, z: &[f64], t: f64) -> KktResiduals {
        let n = self.n();
        let y = self.y_of(z);
        let c = self.constraint_values(&y);
        let worst = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let reduce = |g: DVector<f64>| match &self.basis {
            None => g,
            Some(b) => b.transpose() * g,
        };
        let dense = |d: super::LocalDerivs| {
            let mut g = DVector::zeros(n);
            for (a, &j) in d.vars.iter().enumerate() {
                g[j] = d.grad[a];
            }
            reduce(g)
        };
        let g0 = dense(self.prog.objective.local_derivs(&y));
        let mut grads: Vec<DVector<f64>> = self
            .prog
            .ineq
            .iter()
            .map(|f| dense(f.local_derivs(&y)))
            .collect();
        for j in 0..n {
            for sign in [-1.0, 1.0] {
                let mut g = DVector::zeros(n);
                g[j] = sign;
                grads.push(reduce(g));
            }
        }
        let lam: Vec<f64> = c.iter().map(|&ck| 1.0 / (t * -ck)).collect();

        let combine = |lam: &[f64]| {
            let mut r = g0.clone();
            for (g, &l) in grads.iter().zip(lam) {
                r += g * l;
            }
            let comp: f64 = lam.iter().zip(&c).map(|(l, ck)| l * ck.abs()).sum();
            (r.amax(), comp)
        };
        let mut best = combine(&lam);

        let active: Vec<usize> = (0..c.len()).filter(|&k| -c[k] <= 1e-6).collect();
        if !active.is_empty() && !g0.is_empty() {
            let mut rhs = -g0.clone();
            for (k, g) in grads.iter().enumerate() {
                if !active.contains(&k) {
                    rhs -= g * lam[k];
                }
            }
            let cols: Vec<DVector<f64>> = active.iter().map(|&k| grads[k].clone()).collect();
            let a = DMatrix::from_columns(&cols);
            if let Ok(fit) = a.svd(true, true).solve(&rhs, 1e-14) {
                let mut refined = lam.clone();
                for (&k, &l) in active.iter().zip(fit.iter()) {
                    refined[k] = l.max(0.0);
                }
                let cand = combine(&refined);
                if cand.0.max(cand.1) < best.0.max(best.1) {
                    best = cand;
                }
            }
        }
        KktResiduals {
            stationarity: best.0,
            complementarity: best.1,
            primal_infeasibility: worst.max(0.0),
        }
    }

    /// Barrier value, and optionally its reduced gradient and Hessian.
    ///
    /// Phase 2: `t f0(y) - sum log(-c_k(y))`.
    /// Phase 1 (`v = (z, s)`): `t s - sum log(s - c_k(y))`.
    #[allow(clippy::type_complexity)]
    fn barrier(
        &self,
        v: &[f64],
        t: f64,
        phase1: bool,
        derivs: bool,
    ) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
        let n = self.n();
        let k = self.reduced_dim();
        let (z, s) = if phase1 { (&v[..k], v[k]) } else { (v, 0.0) };
        let y = self.y_of(z);
        // y-space accumulators; index n is the phase-1 slack
        let dim = if phase1 { n + 1 } else { n };
        let mut g = vec![0.0; if derivs { dim } else { 0 }];
        let mut h = vec![0.0; if derivs { dim * dim } else { 0 }];
        let mut value = 0.0;

        if phase1 {
            value += t * s;
            if derivs {
                g[n] += t;
            }
        } else if derivs {
            let d = self.prog.objective.local_derivs(&y);
            if !d.value.is_finite() {
                return None;
            }
            value += t * d.value;
            let k = d.vars.len();
            for (a, &j) in d.vars.iter().enumerate() {
                g[j] += t * d.grad[a];
                for (b, &l) in d.vars.iter().enumerate() {
                    h[j * dim + l] += t * d.hess[a * k + b];
                }
            }
        } else {
            let f0 = self.prog.objective.value(&y);
            if !f0.is_finite() {
                return None;
            }
            value += t * f0;
        }

        for f in &self.prog.ineq {
            if !derivs {
                let r = s - f.value(&y);
                if r.is_nan() || r <= 0.0 || r.is_infinite() {
                    return None;
                }
                value -= r.ln();
                continue;
            }
            let d = f.local_derivs(&y);
            let r = s - d.value;
            if r.is_nan() || r <= 0.0 || r.is_infinite() {
                return None;
            }
            value -= r.ln();
            let inv = 1.0 / r;
            let inv2 = inv * inv;
            let k = d.vars.len();
            for (a, &j) in d.vars.iter().enumerate() {
                g[j] += d.grad[a] * inv;
                for (b, &l) in d.vars.iter().enumerate() {
                    h[j * dim + l] += d.hess[a * k + b] * inv + d.grad[a] * d.grad[b] * inv2;
                }
            }
            if phase1 {
                g[n] -= inv;
                h[n * dim + n] += inv2;
                for (a, &j) in d.vars.iter().enumerate() {
                    h[j * dim + n] -= d.grad[a] * inv2;
                    h[n * dim + j] -= d.grad[a] * inv2;
                }
            }
        }

        for (j, &yj) in y.iter().enumerate() {
            // lower - y_j <= s  and  y_j - upper <= s
            for (c, dc) in [(self.prog.lower - yj, -1.0), (yj - self.prog.upper, 1.0)] {
                let r = s - c;
                if r.is_nan() || r <= 0.0 {
                    return None;
                }
                value -= r.ln();
                if derivs {
                    let inv = 1.0 / r;
                    let inv2 = inv * inv;
                    g[j] += dc * inv;
                    h[j * dim + j] += inv2;
                    if phase1 {
                        g[n] -= inv;
                        h[n * dim + n] += inv2;
                        h[j * dim + n] -= dc * inv2;
                        h[n * dim + j] -= dc * inv2;
                    }
                }
            }
        }

        if !value.is_finite() {
            return None;
        }
        if !derivs {
            return Some((value, DVector::zeros(0), DMatrix::zeros(0, 0)));
        }

        let gy = DVector::from_vec(g);
        let hy = DMatrix::from_row_slice(dim, dim, &h);
        let (gr, hr) = match &self.basis {
            None => (gy, hy),
            Some(b) => {
                // lift N to include the slack coordinate when present
                let rows = dim;
                let cols = if phase1 { k + 1 } else { k };
                let mut nb = DMatrix::zeros(rows, cols);
                nb.view_mut((0, 0), (n, k)).copy_from(b);
                if phase1 {
                    nb[(n, k)] = 1.0;
                }
                (nb.transpose() * gy, nb.transpose() * hy * &nb)
            }
        };
        Some((value, gr, hr))
    }

    fn newton_direction(g: &DVector<f64>, h: &DMatrix<f64>) -> Option<DVector<f64>> {
        let diag_max = h.diagonal().amax().max(1.0);
        let mut reg = 0.0;
        for _ in 0..12 {
            let mut hm = h.clone();
            if reg > 0.0 {
                for i in 0..hm.nrows() {
                    hm[(i, i)] += reg;
                }
            }
            if let Some(ch) = hm.cholesky() {
                let d = ch.solve(&(-g));
                if d.iter().all(|x| x.is_finite()) {
                    return Some(d);
                }
            }
            reg = if reg == 0.0 {
                1e-14 * diag_max
            } else {
                reg * 100.0
            };
        }
        None
    }

    fn center(&mut self, v: &mut Vec<f64>, t: f64, phase1: bool) -> Stop {
        let k = self.reduced_dim();
        if v.is_empty() {
            return Stop::Centered;
        }
        let mut stalled = 0;
        for _ in 0..self.cfg.max_iter {
            if self.timed_out() {
                return Stop::Interrupted;
            }
            let Some((val, g, h)) = self.barrier(v, t, phase1, true) else {
                return Stop::Numerical;
            };
            let Some(dv) = Self::newton_direction(&g, &h) else {
                return Stop::Numerical;
            };
            let slope = g.dot(&dv);
            let decrement = -slope;
            if decrement / 2.0 <= CENTER_EPS {
                return Stop::Centered;
            }
            // rounding noise can keep the decrement above CENTER_EPS
            if decrement / 2.0 <= STALL_EPS {
                stalled += 1;
                if stalled >= STALL_ROUNDS {
                    return Stop::Centered;
                }
            } else {
                stalled = 0;
            }
            self.iterations += 1;

            let mut step = 1.0;
            let mut accepted = false;
            while step > 1e-16 {
                let cand: Vec<f64> = v.iter().zip(dv.iter()).map(|(a, d)| a + step * d).collect();
                if let Some((cv, _, _)) = self.barrier(&cand, t, phase1, false) {
                    if cv <= val + 0.01 * step * slope {
                        *v = cand;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                // no representable decrease left at this barrier weight
                return Stop::Centered;
            }

            let y = self.y_of(&v[..k]);
            if phase1 {
                let max_c = self
                    .constraint_values(&y)
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max);
                if max_c < -1.0 {
                    return Stop::Feasible;
                }
            } else if self.prog.objective.value(&y) < self.cfg.unbounded_log_threshold {
                return Stop::Unbounded;
            }
        }
        Stop::IterLimit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{Monomial, Posynomial};

    fn assert_kkt(sol: &GpSolution) {
        let r = sol.residuals;
        assert!(r.stationarity <= 1e-8, "{r:?}");
        assert!(r.complementarity <= 1e-8, "{r:?}");
        assert_eq!(r.primal_infeasibility, 0.0);
    }

    fn mono(c: f64, e: &[(usize, f64)]) -> Monomial {
        Monomial::new(c, e.to_vec())
    }

    #[test]
    fn x_plus_one_over_x() {
        let gp = GeometricProgram::new(
            1,
            Posynomial::new(vec![mono(1.0, &[(0, 1.0)]), mono(1.0, &[(0, -1.0)])]),
        );
        let sol = GpSolver::default().solve(&gp).unwrap();
        assert_eq!(sol.status, GpStatus::Optimal);
        assert!((sol.objective_value - 2.0).abs() < 1e-6);
        assert!((sol.x[0] - 1.0).abs() < 1e-3);
        assert_kkt(&sol);
    }

    #[test]
    fn active_lower_bound() {
        let mut gp = GeometricProgram::new(1, Posynomial::new(vec![mono(1.0, &[(0, 1.0)])]));
        gp.ineq.push(Posynomial::new(vec![mono(2.0, &[(0, -1.0)])]));
        let sol = GpSolver::default().solve(&gp).unwrap();
        assert_eq!(sol.status, GpStatus::Optimal);
        assert!((sol.objective_value - 2.0).abs() < 1e-6);
        assert!((sol.x[0] - 2.0).abs() < 1e-6);
        assert_kkt(&sol);
    }

    #[test]
    fn product_constraint() {
        let mut gp = GeometricProgram::new(
            2,
            Posynomial::new(vec![mono(1.0, &[(0, 1.0)]), mono(1.0, &[(1, 1.0)])]),
        );
        gp.ineq
            .push(Posynomial::new(vec![mono(1.0, &[(0, -1.0), (1, -1.0)])]));
        let sol = GpSolver::default().solve(&gp).unwrap();
        assert_eq!(sol.status, GpStatus::Optimal);
        assert!((sol.objective_value - 2.0).abs() < 1e-6);
        assert!((sol.x[0] - 1.0).abs() < 1e-4 && (sol.x[1] - 1.0).abs() < 1e-4);
        assert_kkt(&sol);
    }

    #[test]
    fn infeasible_program() {
        // x <= 1/2 and 1/x <= 1
        let mut gp = GeometricProgram::new(1, Posynomial::new(vec![mono(1.0, &[(0, 1.0)])]));
        gp.ineq.push(Posynomial::new(vec![mono(2.0, &[(0, 1.0)])]));
        gp.ineq.push(Posynomial::new(vec![mono(1.0, &[(0, -1.0)])]));
        let sol = GpSolver::default().solve(&gp).unwrap();
        assert_eq!(sol.status, GpStatus::Infeasible);
        assert!(sol.phase1_value.unwrap() > 1e-6);
    }

    #[test]
    fn unbounded_program() {
        // minimize 1/x with x free above
        let gp = GeometricProgram::new(1, Posynomial::new(vec![mono(1.0, &[(0, -1.0)])]));
        let sol = GpSolver::default().solve(&gp).unwrap();
        assert_eq!(sol.status, GpStatus::Unbounded);
        assert!(sol.objective_value < (-30f64).exp());
    }

    #[test]
    fn monomial_equality() {
        // minimize x + y subject to x y = 4 -> 4 at x = y = 2
        let mut gp = GeometricProgram::new(
            2,
            Posynomial::new(vec![mono(1.0, &[(0, 1.0)]), mono(1.0, &[(1, 1.0)])]),
        );
        gp.mono_eq.push(mono(0.25, &[(0, 1.0), (1, 1.0)]));
        let sol = GpSolver::default().solve(&gp).unwrap();
        assert_eq!(sol.status, GpStatus::Optimal);
        assert!((sol.objective_value - 4.0).abs() < 1e-6);
        assert!((sol.x[0] * sol.x[1] - 4.0).abs() < 1e-6);
    }

    #[test]
    fn empty_objective_checks_feasibility() {
        let mut gp = GeometricProgram::new(1, Posynomial::default());
        gp.ineq.push(Posynomial::new(vec![mono(5.0, &[(0, -1.0)])]));
        let sol = GpSolver::default().solve(&gp).unwrap();
        assert_eq!(sol.status, GpStatus::Optimal);
        assert_eq!(sol.objective_value, 0.0);
        assert!(5.0 / sol.x[0] <= 1.0);
    }

    #[test]
    fn zero_time_limit_interrupts() {
        let mut gp = GeometricProgram::new(
            1,
            Posynomial::new(vec![mono(1.0, &[(0, 1.0)]), mono(1.0, &[(0, -1.0)])]),
        );
        gp.ineq.push(Posynomial::new(vec![mono(0.5, &[(0, 1.0)])]));
        let solver = GpSolver::default().with_time_limit(Some(Duration::ZERO));
        assert_eq!(solver.solve(&gp).unwrap().status, GpStatus::Interrupted);
    }

    #[test]
    fn solves_are_deterministic() {
        let mut gp = GeometricProgram::new(
            2,
            Posynomial::new(vec![mono(1.0, &[(0, 1.0)]), mono(1.0, &[(1, 1.0)])]),
        );
        gp.ineq
            .push(Posynomial::new(vec![mono(1.0, &[(0, -1.0), (1, -1.0)])]));
        let a = GpSolver::default().solve(&gp).unwrap();
        let b = GpSolver::default().solve(&gp).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.objective_value.to_bits(), b.objective_value.to_bits());
        assert_eq!(a.x, b.x);
    }
}
