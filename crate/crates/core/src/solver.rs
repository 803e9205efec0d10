//! Non-parametric smoothing Newton method.
//!
//! The unknown is `X = (y, z, r)` with `x = y - z`. The method drives
//!
//! ```text
//! H(X) = [ y + z - F(y - z) + b                 ]   d rows
//!        [ G_r(yⁱ, zⁱ)                           ]   d rows
//!        [ ½‖y⁻‖² + ½‖z⁻‖² + r² + εr            ]   1 row
//! ```
//!
//! to zero with full Newton directions and Armijo backtracking on
//! `Θ = ½‖H‖²`. The smoothing parameter `r` is an unknown, so no outer
//! schedule is needed: the last row pulls it to zero.

use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::error::{NaveError, Result};
use crate::linalg::{dot, norm2, DenseMatrix};
use crate::nave::{ensure_finite, nave_error, NaveProblem};
use crate::smoothing::{SmoothingFamily, Theta1};

/// Iterate `(y, z, r)` of the augmented system.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub r: f64,
}

impl AugmentedState {
    pub fn dim(&self) -> usize {
        self.y.len()
    }

    pub fn x(&self) -> Vec<f64> {
        self.y.iter().zip(&self.z).map(|(y, z)| y - z).collect()
    }

    /// Flattened `(y, z, r)`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 * self.dim() + 1);
        v.extend_from_slice(&self.y);
        v.extend_from_slice(&self.z);
        v.push(self.r);
        v
    }

    pub fn from_slice(v: &[f64]) -> Self {
        let d = (v.len() - 1) / 2;
        AugmentedState {
            y: v[..d].to_vec(),
            z: v[d..2 * d].to_vec(),
            r: v[2 * d],
        }
    }

    fn step(&self, dir: &[f64], zeta: f64) -> Self {
        let d = self.dim();
        AugmentedState {
            y: (0..d).map(|i| self.y[i] + zeta * dir[i]).collect(),
            z: (0..d).map(|i| self.z[i] + zeta * dir[d + i]).collect(),
            r: self.r + zeta * dir[2 * d],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialPoint {
    /// `y⁰ = z⁰ = (1, …, 1)`, hence `r⁰ = 1`.
    Ones,
    Given { y0: Vec<f64>, z0: Vec<f64> },
}

impl InitialPoint {
    /// Interior starting state with `r⁰ = ⟨y⁰, z⁰⟩ / d`.
    pub fn state(&self, d: usize) -> Result<AugmentedState> {
        let (y, z) = match self {
            InitialPoint::Ones => (vec![1.0; d], vec![1.0; d]),
            InitialPoint::Given { y0, z0 } => {
                if y0.len() != d || z0.len() != d {
                    return Err(NaveError::InvalidInput(format!(
                        "initial point has dimensions ({}, {}), problem has {d}",
                        y0.len(),
                        z0.len()
                    )));
                }
                ensure_finite(y0, "y0")?;
                ensure_finite(z0, "z0")?;
                if y0.iter().chain(z0).any(|&v| v <= 0.0) {
                    return Err(NaveError::InvalidInput(
                        "initial y0, z0 must be componentwise positive".into(),
                    ));
                }
                (y0.clone(), z0.clone())
            }
        };
        let r = dot(&y, &z) / d as f64;
        Ok(AugmentedState { y, z, r })
    }
}

#[derive(Clone)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Armijo sufficient-decrease constant, in `(0, 1/2)`.
    pub tau: f64,
    /// Backtracking factor, in `(0, 1)`.
    pub rho: f64,
    /// Coefficient of the linear term in the `r` row.
    pub epsilon: f64,
    pub init: InitialPoint,
    pub max_backtracks: usize,
    /// Retry with a Levenberg-Marquardt direction when the Newton direction
    /// is unavailable or admits no Armijo step.
    pub lm_fallback: bool,
    pub family: Arc<dyn SmoothingFamily>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-10,
            max_iter: 2000,
            tau: 1e-4,
            rho: 0.5,
            epsilon: 10.0,
            init: InitialPoint::Ones,
            max_backtracks: 60,
            lm_fallback: true,
            family: Arc::new(Theta1),
        }
    }
}

impl std::fmt::Debug for SolverConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolverConfig")
            .field("tol", &self.tol)
            .field("max_iter", &self.max_iter)
            .field("tau", &self.tau)
            .field("rho", &self.rho)
            .field("epsilon", &self.epsilon)
            .field("init", &self.init)
            .field("max_backtracks", &self.max_backtracks)
            .field("lm_fallback", &self.lm_fallback)
            .field("family", &self.family.label())
            .finish()
    }
}

impl SolverConfig {
    pub fn with_family(family: Arc<dyn SmoothingFamily>) -> Self {
        SolverConfig {
            family,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau < 0.5) {
            return Err(NaveError::ConfigError(format!("tau must lie in (0, 1/2), got {}", self.tau)));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(NaveError::ConfigError(format!("rho must lie in (0, 1), got {}", self.rho)));
        }
        if !(self.tol > 0.0) {
            return Err(NaveError::ConfigError(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.epsilon > 0.0) {
            return Err(NaveError::ConfigError(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    LineSearchStalled,
    SingularJacobian,
    DomainBreakdown,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max_iterations",
            SolveStatus::LineSearchStalled => "line_search_stalled",
            SolveStatus::SingularJacobian => "singular_jacobian",
            SolveStatus::DomainBreakdown => "domain_breakdown",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "converged" => SolveStatus::Converged,
            "max_iterations" => SolveStatus::MaxIterations,
            "line_search_stalled" => SolveStatus::LineSearchStalled,
            "singular_jacobian" => SolveStatus::SingularJacobian,
            "domain_breakdown" => SolveStatus::DomainBreakdown,
            _ => return None,
        })
    }
}

/// Outcome of one solve, shared by every method in the crate.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: String,
    pub status: SolveStatus,
    pub x_final: Vec<f64>,
    pub state_final: AugmentedState,
    /// Norm of the method's own residual at each iterate, starting with the
    /// initial point.
    pub residual_history: Vec<f64>,
    pub merit_history: Vec<f64>,
    /// Step length that produced each iterate (0 for the initial point).
    pub step_history: Vec<f64>,
    pub r_history: Vec<f64>,
    /// `‖F(x) - |x| - b‖₂` at `x_final`.
    pub error: f64,
    pub iterations: usize,
    pub wall_time: Duration,
    pub backtrack_total: usize,
    /// Iteration at which the method broke down, if it did.
    pub failed_at: Option<usize>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    /// One line per iterate: `k, ||H||, Theta, step, r`.
    pub fn trace_lines(&self) -> Vec<String> {
        (0..self.residual_history.len())
            .map(|k| {
                format!(
                    "{}, {:e}, {:e}, {:e}, {:e}",
                    k,
                    self.residual_history[k],
                    self.merit_history[k],
                    self.step_history[k],
                    self.r_history[k]
                )
            })
            .collect()
    }
}

/// `H(X)`, length `2d + 1`.
pub fn assemble_residual(p: &NaveProblem, cfg: &SolverConfig, st: &AugmentedState) -> Result<Vec<f64>> {
    let d = p.dim();
    check_state(d, st)?;
    let x = st.x();
    let fx = p.eval(&x)?;
    let b = p.rhs();
    let mut h = Vec::with_capacity(2 * d + 1);
    for i in 0..d {
        h.push(st.y[i] + st.z[i] - fx[i] + b[i]);
    }
    for i in 0..d {
        h.push(cfg.family.smoothed(st.y[i], st.z[i], st.r)?);
    }
    let neg = |v: f64| (-v).max(0.0);
    let penalty: f64 = st.y.iter().chain(&st.z).map(|&v| neg(v) * neg(v)).sum();
    h.push(0.5 * penalty + st.r * st.r + cfg.epsilon * st.r);
    Ok(h)
}

/// `∇H(X)`, `(2d + 1) × (2d + 1)`.
pub fn assemble_jacobian(p: &NaveProblem, cfg: &SolverConfig, st: &AugmentedState) -> Result<DenseMatrix> {
    let d = p.dim();
    check_state(d, st)?;
    let jf = p.jacobian(&st.x())?;
    let n = 2 * d + 1;
    let mut j = DenseMatrix::zeros(n, n);
    for i in 0..d {
        for k in 0..d {
            let e = if i == k { 1.0 } else { 0.0 };
            j[(i, k)] = e - jf[(i, k)];
            j[(i, d + k)] = e + jf[(i, k)];
        }
    }
    for i in 0..d {
        let (gy, gz, gr) = cfg.family.smoothed_partials(st.y[i], st.z[i], st.r)?;
        j[(d + i, i)] = gy;
        j[(d + i, d + i)] = gz;
        j[(d + i, 2 * d)] = gr;
    }
    for i in 0..d {
        j[(2 * d, i)] = -(-st.y[i]).max(0.0);
        j[(2 * d, d + i)] = -(-st.z[i]).max(0.0);
    }
    j[(2 * d, 2 * d)] = 2.0 * st.r + cfg.epsilon;
    Ok(j)
}

/// `Θ(X) = ½‖H(X)‖²`.
pub fn merit(p: &NaveProblem, cfg: &SolverConfig, st: &AugmentedState) -> Result<f64> {
    let h = assemble_residual(p, cfg, st)?;
    Ok(0.5 * dot(&h, &h))
}

/// `∇Θ(X) = ∇H(X)ᵀ H(X)`.
pub fn merit_gradient(p: &NaveProblem, cfg: &SolverConfig, st: &AugmentedState) -> Result<Vec<f64>> {
    let h = assemble_residual(p, cfg, st)?;
    Ok(assemble_jacobian(p, cfg, st)?.tr_matvec(&h))
}

fn check_state(d: usize, st: &AugmentedState) -> Result<()> {
    if st.y.len() != d || st.z.len() != d {
        return Err(NaveError::InvalidInput(format!(
            "state has dimensions ({}, {}), problem has {d}",
            st.y.len(),
            st.z.len()
        )));
    }
    if !(st.r > 0.0) {
        return Err(NaveError::DomainError(format!("r must be positive, got {}", st.r)));
    }
    Ok(())
}

/// Solves `J d = -H`. When the matrix is singular or the result is not a
/// descent direction for `Θ`, retries once with `J + μI`, `μ = 1e-8‖H‖`.
pub(crate) fn descent_direction(jac: &DenseMatrix, h: &[f64]) -> Option<(Vec<f64>, f64)> {
    let grad = jac.tr_matvec(h);
    let neg_h: Vec<f64> = h.iter().map(|v| -v).collect();
    let attempt = |m: &DenseMatrix| -> Option<(Vec<f64>, f64)> {
        let dir = m.solve(&neg_h).ok()?;
        let slope = dot(&grad, &dir);
        (dir.iter().all(|v| v.is_finite()) && slope < 0.0).then_some((dir, slope))
    };
    attempt(jac).or_else(|| {
        let mut reg = jac.clone();
        reg.add_diag(1e-8 * norm2(h));
        attempt(&reg)
    })
}

/// Levenberg-Marquardt direction `(JᵀJ + ‖H‖I) d = -JᵀH`.
fn lm_direction(jac: &DenseMatrix, h: &[f64]) -> Option<(Vec<f64>, f64)> {
    let grad = jac.tr_matvec(h);
    let mut normal = jac.transpose().matmul(jac);
    normal.add_diag(norm2(h));
    let neg: Vec<f64> = grad.iter().map(|v| -v).collect();
    let dir = normal.solve(&neg).ok()?;
    let slope = dot(&grad, &dir);
    (dir.iter().all(|v| v.is_finite()) && slope < 0.0).then_some((dir, slope))
}

/// Backtracks `ζ = ρʲ` until the Armijo condition holds at a point with
/// `r > 0`. Returns the trial state, its residual, the residual norm and `ζ`.
fn armijo(
    p: &NaveProblem,
    cfg: &SolverConfig,
    state: &AugmentedState,
    dir: &[f64],
    slope: f64,
    theta: f64,
    backtracks: &mut usize,
) -> Option<(AugmentedState, Vec<f64>, f64, f64)> {
    let mut zeta = 1.0;
    for j in 0..=cfg.max_backtracks {
        if j > 0 {
            zeta *= cfg.rho;
            *backtracks += 1;
        }
        let trial = state.step(dir, zeta);
        if !(trial.r > 0.0) {
            continue;
        }
        let Ok(ht) = assemble_residual(p, cfg, &trial) else {
            continue;
        };
        let nt = norm2(&ht);
        if nt.is_finite() && 0.5 * nt * nt - theta <= cfg.tau * zeta * slope {
            return Some((trial, ht, nt, zeta));
        }
    }
    None
}

pub(crate) struct Trace {
    pub residual: Vec<f64>,
    pub merit: Vec<f64>,
    pub step: Vec<f64>,
    pub r: Vec<f64>,
}

impl Trace {
    pub fn new() -> Self {
        Trace {
            residual: Vec::new(),
            merit: Vec::new(),
            step: Vec::new(),
            r: Vec::new(),
        }
    }

    pub fn push(&mut self, residual: f64, step: f64, r: f64) {
        self.residual.push(residual);
        self.merit.push(0.5 * residual * residual);
        self.step.push(step);
        self.r.push(r);
    }
}

pub(crate) struct Outcome {
    pub status: SolveStatus,
    pub state: AugmentedState,
    pub trace: Trace,
    pub iterations: usize,
    pub backtracks: usize,
    pub failed_at: Option<usize>,
}

pub(crate) fn finish(p: &NaveProblem, method: &str, o: Outcome, started: Instant) -> SolveReport {
    let x_final = o.state.x();
    SolveReport {
        method: method.to_string(),
        status: o.status,
        error: nave_error(p, &x_final),
        x_final,
        state_final: o.state,
        residual_history: o.trace.residual,
        merit_history: o.trace.merit,
        step_history: o.trace.step,
        r_history: o.trace.r,
        iterations: o.iterations,
        wall_time: started.elapsed(),
        backtrack_total: o.backtracks,
        failed_at: o.failed_at,
    }
}

/// Newton iteration on `H(X) = 0` with Armijo backtracking on `Θ`.
///
/// A trial point is accepted only when it keeps `r > 0` and satisfies
/// `Θ(X + ζd) - Θ(X) ≤ τ ζ ∇Θᵀd`. Iteration stops once both `‖H‖` and
/// `‖F(x) - |x| - b‖` are at most `tol`.
pub fn newton_armijo_solve(p: &NaveProblem, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let started = Instant::now();
    let method = cfg.family.label().to_string();
    let mut state = cfg.init.state(p.dim())?;
    let mut trace = Trace::new();
    let mut backtracks = 0;

    let mut h = match assemble_residual(p, cfg, &state) {
        Ok(h) => h,
        Err(_) => {
            trace.push(f64::NAN, 0.0, state.r);
            let o = Outcome {
                status: SolveStatus::DomainBreakdown,
                state,
                trace,
                iterations: 0,
                backtracks,
                failed_at: Some(0),
            };
            return Ok(finish(p, &method, o, started));
        }
    };
    let mut norm_h = norm2(&h);
    trace.push(norm_h, 0.0, state.r);

    let mut k = 0;
    let (status, failed_at) = loop {
        if norm_h <= cfg.tol && nave_error(p, &state.x()) <= cfg.tol {
            break (SolveStatus::Converged, None);
        }
        if k >= cfg.max_iter {
            break (SolveStatus::MaxIterations, None);
        }
        let jac = match assemble_jacobian(p, cfg, &state) {
            Ok(j) => j,
            Err(NaveError::DegenerateDerivative(_)) => break (SolveStatus::SingularJacobian, Some(k)),
            Err(_) => break (SolveStatus::DomainBreakdown, Some(k)),
        };
        let theta = 0.5 * norm_h * norm_h;
        let mut have_direction = false;
        let mut accepted = None;
        if let Some((dir, slope)) = descent_direction(&jac, &h) {
            have_direction = true;
            accepted = armijo(p, cfg, &state, &dir, slope, theta, &mut backtracks);
        }
        if accepted.is_none() && cfg.lm_fallback {
            if let Some((dir, slope)) = lm_direction(&jac, &h) {
                have_direction = true;
                accepted = armijo(p, cfg, &state, &dir, slope, theta, &mut backtracks);
            }
        }
        let Some((trial, ht, nt, zeta)) = accepted else {
            let status = if have_direction {
                SolveStatus::LineSearchStalled
            } else {
                SolveStatus::SingularJacobian
            };
            break (status, Some(k));
        };
        state = trial;
        h = ht;
        norm_h = nt;
        k += 1;
        trace.push(norm_h, zeta, state.r);
    };

    let o = Outcome {
        status,
        state,
        trace,
        iterations: k,
        backtracks,
        failed_at,
    };
    Ok(finish(p, &method, o, started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smoothing::{Theta1, Theta2};
    use approx::assert_relative_eq;

    fn cfg(fam: Arc<dyn SmoothingFamily>) -> SolverConfig {
        SolverConfig {
            epsilon: 1.0,
            ..SolverConfig::with_family(fam)
        }
    }

    fn scalar_linear(a: f64) -> NaveProblem {
        NaveProblem::linear("lin", DenseMatrix::from_rows(&[vec![a]]).unwrap())
    }

    #[test]
    fn residual_example_linear_theta2() {
        let p = scalar_linear(3.0);
        let st = AugmentedState {
            y: vec![1.0],
            z: vec![2.0],
            r: 1.0,
        };
        let h = assemble_residual(&p, &cfg(Arc::new(Theta2)), &st).unwrap();
        assert_eq!(h[0], 6.0);
        let expected = -((-1f64).exp() + (-2f64).exp()).ln();
        assert_relative_eq!(h[1], expected, epsilon = 1e-15);
        assert_relative_eq!(h[1], 0.68673, epsilon = 1e-5);
        assert_eq!(h[2], 2.0);
    }

    #[test]
    fn residual_example_zero_state_theta1() {
        let p = NaveProblem::new("zero", 3, |_| vec![0.0; 3]);
        let st = AugmentedState {
            y: vec![0.0; 3],
            z: vec![0.0; 3],
            r: 0.5,
        };
        let h = assemble_residual(&p, &cfg(Arc::new(Theta1)), &st).unwrap();
        assert_eq!(&h[3..6], &[-0.5, -0.5, -0.5]);
        assert_eq!(h[6], 0.75);
    }

    #[test]
    fn residual_vanishes_at_complementary_solution() {
        // F(x) = 3x - 2 has the solution x = 1 (3x - 2 = |x|)
        let p = NaveProblem::new("aff", 1, |x| vec![3.0 * x[0] - 2.0]).with_jacobian(|_| {
            DenseMatrix::from_rows(&[vec![3.0]]).unwrap()
        });
        let st = AugmentedState {
            y: vec![1.0],
            z: vec![0.0],
            r: 1e-12,
        };
        for fam in [Arc::new(Theta1) as Arc<dyn SmoothingFamily>, Arc::new(Theta2)] {
            let h = assemble_residual(&p, &cfg(fam), &st).unwrap();
            assert!(norm2(&h) <= 1e-8);
        }
    }

    #[test]
    fn residual_rejects_nonpositive_r() {
        let p = scalar_linear(3.0);
        let st = AugmentedState {
            y: vec![1.0],
            z: vec![1.0],
            r: 0.0,
        };
        assert!(matches!(
            assemble_residual(&p, &SolverConfig::default(), &st),
            Err(NaveError::DomainError(_))
        ));
    }

    #[test]
    fn jacobian_linear_entries() {
        let p = scalar_linear(3.0);
        let st = AugmentedState {
            y: vec![1.0],
            z: vec![2.0],
            r: 1.0,
        };
        let j = assemble_jacobian(&p, &cfg(Arc::new(Theta2)), &st).unwrap();
        assert_eq!(j[(0, 0)], -2.0);
        assert_eq!(j[(0, 1)], 4.0);
        assert_eq!(j[(0, 2)], 0.0);
        assert_eq!(j.row(2), &[0.0, 0.0, 3.0]);
    }

    #[test]
    fn newton_direction_slope_identity() {
        let p = scalar_linear(3.0);
        let c = cfg(Arc::new(Theta1));
        let st = AugmentedState {
            y: vec![0.7],
            z: vec![1.9],
            r: 0.4,
        };
        let h = assemble_residual(&p, &c, &st).unwrap();
        let j = assemble_jacobian(&p, &c, &st).unwrap();
        let (_, slope) = descent_direction(&j, &h).unwrap();
        assert_relative_eq!(slope, -dot(&h, &h), max_relative = 1e-12);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let p = scalar_linear(3.0);
        let mut c = SolverConfig::default();
        c.tau = 0.5;
        assert!(newton_armijo_solve(&p, &c).is_err());
        let mut c = SolverConfig::default();
        c.rho = 1.0;
        assert!(c.validate().is_err());
        let mut c = SolverConfig::default();
        c.init = InitialPoint::Given {
            y0: vec![0.0],
            z0: vec![1.0],
        };
        assert!(newton_armijo_solve(&p, &c).is_err());
    }

    #[test]
    fn solves_scalar_problem_with_both_kernels() {
        // 3x - 2 = |x| has the unique solution x = 1
        let p = NaveProblem::new("aff", 1, |x| vec![3.0 * x[0]]).with_rhs(vec![2.0]).unwrap();
        for fam in [Arc::new(Theta1) as Arc<dyn SmoothingFamily>, Arc::new(Theta2)] {
            let rep = newton_armijo_solve(&p, &cfg(fam)).unwrap();
            assert!(rep.converged(), "{rep:?}");
            assert!((rep.x_final[0] - 1.0).abs() < 1e-9);
            assert!(*rep.residual_history.last().unwrap() <= 1e-10);
            assert!(rep.state_final.r > 0.0);
            for w in rep.merit_history.windows(2) {
                assert!(w[1] < w[0]);
            }
            assert_eq!(rep.trace_lines().len(), rep.iterations + 1);
        }
    }

    #[test]
    fn max_iterations_status() {
        let p = NaveProblem::new("aff", 1, |x| vec![3.0 * x[0]]).with_rhs(vec![2.0]).unwrap();
        let mut c = SolverConfig::default();
        c.max_iter = 1;
        let rep = newton_armijo_solve(&p, &c).unwrap();
        assert_eq!(rep.status, SolveStatus::MaxIterations);
        assert_eq!(rep.iterations, 1);
    }
}
