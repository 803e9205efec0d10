//! Comparison solvers: soft-max smoothing with a decreasing parameter
//! schedule, and a primal-dual interior-point method.
//!
//! Both work on the split unknown `(y, z)` and return the same
//! [`SolveReport`] as the smoothing Newton solver.

use std::time::Instant;

use crate::error::{NaveError, Result};
use crate::linalg::{norm2, DenseMatrix};
use crate::nave::{nave_error, NaveProblem};
use crate::solver::{finish, AugmentedState, InitialPoint, Outcome, SolveReport, SolveStatus, Trace};

/// Smoothed `min(a, b) ≈ -r log(e^{-a/r} + e^{-b/r})`, evaluated with the
/// exponent shifted by the minimum so it never overflows.
pub fn softmax_min(a: f64, b: f64, r: f64) -> f64 {
    let m = a.min(b);
    let gap = (a - b).abs();
    m - r * (-gap / r).exp().ln_1p()
}

/// Partial derivatives of [`softmax_min`] in `a` and `b`. They are the
/// soft-max weights and sum to one.
pub fn softmax_min_partials(a: f64, b: f64, r: f64) -> (f64, f64) {
    let w = 1.0 / (1.0 + (-(a - b).abs() / r).exp());
    if a <= b {
        (w, 1.0 - w)
    } else {
        (1.0 - w, w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub r_init: f64,
    pub shrink: f64,
    pub r_min: f64,
    /// Centering parameter of the interior-point method.
    pub sigma: f64,
    pub frac_to_boundary: f64,
    pub init: InitialPoint,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            tol: 1e-10,
            max_iter: 2000,
            r_init: 1.0,
            shrink: 0.2,
            r_min: 1e-12,
            sigma: 0.3,
            frac_to_boundary: 0.9995,
            init: InitialPoint::Ones,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(NaveError::ConfigError(msg));
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad(format!("shrink must lie in (0, 1), got {}", self.shrink));
        }
        if !(self.r_min > 0.0 && self.r_init >= self.r_min) {
            return bad(format!(
                "need 0 < r_min <= r_init, got r_min = {}, r_init = {}",
                self.r_min, self.r_init
            ));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad(format!("sigma must lie in (0, 1), got {}", self.sigma));
        }
        if !(self.frac_to_boundary > 0.0 && self.frac_to_boundary < 1.0) {
            return bad(format!(
                "frac_to_boundary must lie in (0, 1), got {}",
                self.frac_to_boundary
            ));
        }
        Ok(())
    }
}

/// A square system `Φ(y, z) = 0` to be paired with `y, z ≥ 0`, `yⁱzⁱ = 0`.
trait Complementarity {
    fn dim(&self) -> usize;
    /// `Φ(y, z)` with its partial Jacobians in `y` and `z`.
    fn eval(&self, y: &[f64], z: &[f64]) -> Result<(Vec<f64>, DenseMatrix, DenseMatrix)>;
    fn residual(&self, y: &[f64], z: &[f64]) -> Result<Vec<f64>>;
    /// Error reported to the user at `(y, z)`.
    fn error(&self, y: &[f64], z: &[f64]) -> f64;
}

/// `Φ = y + z - F(y - z) + b`; error is the NAVE residual at `x = y - z`.
struct NaveSystem<'a>(&'a NaveProblem);

impl Complementarity for NaveSystem<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, y: &[f64], z: &[f64]) -> Result<(Vec<f64>, DenseMatrix, DenseMatrix)> {
        let x = diff(y, z);
        let res = self.residual(y, z)?;
        let jf = self.0.jacobian(&x)?;
        let d = self.dim();
        let jy = DenseMatrix::identity(d).add_scaled(-1.0, &jf);
        let jz = DenseMatrix::identity(d).add_scaled(1.0, &jf);
        Ok((res, jy, jz))
    }

    fn residual(&self, y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        let fx = self.0.eval(&diff(y, z))?;
        let b = self.0.rhs();
        Ok((0..self.dim()).map(|i| y[i] + z[i] - fx[i] + b[i]).collect())
    }

    fn error(&self, y: &[f64], z: &[f64]) -> f64 {
        nave_error(self.0, &diff(y, z))
    }
}

/// Linear complementarity `z = M y + q`; error combines the equation
/// residual with `min(y, z)`.
struct LcpSystem<'a> {
    m: &'a DenseMatrix,
    q: &'a [f64],
}

impl Complementarity for LcpSystem<'_> {
    fn dim(&self) -> usize {
        self.q.len()
    }

    fn eval(&self, y: &[f64], z: &[f64]) -> Result<(Vec<f64>, DenseMatrix, DenseMatrix)> {
        let d = self.dim();
        Ok((
            self.residual(y, z)?,
            self.m.scaled(-1.0),
            DenseMatrix::identity(d),
        ))
    }

    fn residual(&self, y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        let my = self.m.matvec(y);
        Ok((0..self.dim()).map(|i| z[i] - my[i] - self.q[i]).collect())
    }

    fn error(&self, y: &[f64], z: &[f64]) -> f64 {
        let Ok(res) = self.residual(y, z) else {
            return f64::NAN;
        };
        let mins: Vec<f64> = y.iter().zip(z).map(|(a, b)| a.min(*b)).collect();
        norm2(&res).hypot(norm2(&mins))
    }
}

fn diff(y: &[f64], z: &[f64]) -> Vec<f64> {
    y.iter().zip(z).map(|(a, b)| a - b).collect()
}

/// `[Jy Jz; Dy Dz]` with diagonal lower blocks.
fn block_matrix(jy: &DenseMatrix, jz: &DenseMatrix, dy: &[f64], dz: &[f64]) -> DenseMatrix {
    let d = dy.len();
    let mut m = DenseMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for k in 0..d {
            m[(i, k)] = jy[(i, k)];
            m[(i, d + k)] = jz[(i, k)];
        }
        m[(d + i, i)] = dy[i];
        m[(d + i, d + i)] = dz[i];
    }
    m
}

fn state(y: &[f64], z: &[f64], r: f64) -> AugmentedState {
    AugmentedState {
        y: y.to_vec(),
        z: z.to_vec(),
        r,
    }
}

/// Soft-max smoothing: for each `r` of the schedule, Newton iterations on
/// `{Φ(y, z) = 0, softmax_min(yⁱ, zⁱ, r) = 0}` warm-started from the previous
/// level, moving on once the smoothed residual is below `max(tol, r/10)`.
///
/// Iterations count Newton steps summed over the schedule.
pub fn solve_softmax(p: &NaveProblem, cfg: &BaselineConfig) -> Result<SolveReport> {
    let rep = softmax_core(&NaveSystem(p), cfg)?;
    Ok(finish(p, "softmax", rep.0, rep.1))
}

fn softmax_core(sys: &dyn Complementarity, cfg: &BaselineConfig) -> Result<(Outcome, Instant)> {
    cfg.validate()?;
    let started = Instant::now();
    let d = sys.dim();
    let init = cfg.init.state(d)?;
    let (mut y, mut z) = (init.y, init.z);
    let mut r = cfg.r_init;
    let mut trace = Trace::new();
    let mut k = 0;

    let smoothed = |y: &[f64], z: &[f64], r: f64| -> Result<Vec<f64>> {
        let mut s = sys.residual(y, z)?;
        s.extend((0..d).map(|i| softmax_min(y[i], z[i], r)));
        if s.iter().all(|v| v.is_finite()) {
            Ok(s)
        } else {
            Err(NaveError::NumericalFailure("non-finite soft-max residual".into()))
        }
    };

    let (status, failed_at) = 'outer: loop {
        let s = match smoothed(&y, &z, r) {
            Ok(s) => s,
            Err(_) => break (SolveStatus::DomainBreakdown, Some(k)),
        };
        let ns = norm2(&s);
        if k == 0 && trace.residual.is_empty() {
            trace.push(ns, 0.0, r);
        }
        let err = sys.error(&y, &z);
        if !err.is_finite() {
            break (SolveStatus::DomainBreakdown, Some(k));
        }
        if err <= cfg.tol {
            break (SolveStatus::Converged, None);
        }
        if ns <= cfg.tol.max(0.1 * r) && r > cfg.r_min {
            r = (r * cfg.shrink).max(cfg.r_min);
            continue 'outer;
        }
        if k >= cfg.max_iter {
            break (SolveStatus::MaxIterations, None);
        }
        let Ok((_, jy, jz)) = sys.eval(&y, &z) else {
            break (SolveStatus::DomainBreakdown, Some(k));
        };
        let (wy, wz): (Vec<f64>, Vec<f64>) =
            (0..d).map(|i| softmax_min_partials(y[i], z[i], r)).unzip();
        let jac = block_matrix(&jy, &jz, &wy, &wz);
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let Ok(step) = jac.solve(&neg) else {
            break (SolveStatus::SingularJacobian, Some(k));
        };
        for i in 0..d {
            y[i] += step[i];
            z[i] += step[d + i];
        }
        k += 1;
        let ns = smoothed(&y, &z, r).map(|s| norm2(&s)).unwrap_or(f64::NAN);
        trace.push(ns, 1.0, r);
    };

    Ok((
        Outcome {
            status,
            state: state(&y, &z, r),
            trace,
            iterations: k,
            backtracks: 0,
            failed_at,
        },
        started,
    ))
}

/// Primal-dual path following on `{Φ(y, z) = 0, YZe = σμe}` with
/// `μ = ⟨y, z⟩/d`, keeping `y, z > 0` by a fraction-to-boundary cap.
///
/// The reported point is the best iterate seen, not the last one.
pub fn solve_interior_point(p: &NaveProblem, cfg: &BaselineConfig) -> Result<SolveReport> {
    let rep = interior_point_core(&NaveSystem(p), cfg)?;
    Ok(finish(p, "ip", rep.0, rep.1))
}

/// Interior point on the LCP `z = My + q`, `y, z ≥ 0`, `yᵀz = 0`.
///
/// `error` in the returned report is the NAVE-independent LCP error
/// `‖(z - My - q, min(y, z))‖₂`.
pub fn solve_lcp_interior_point(
    m: &DenseMatrix,
    q: &[f64],
    cfg: &BaselineConfig,
) -> Result<SolveReport> {
    if !m.is_square() || m.rows() != q.len() {
        return Err(NaveError::InvalidInput(format!(
            "LCP matrix is {}x{}, q has length {}",
            m.rows(),
            m.cols(),
            q.len()
        )));
    }
    let sys = LcpSystem { m, q };
    let (o, started) = interior_point_core(&sys, cfg)?;
    let error = sys.error(&o.state.y, &o.state.z);
    let x_final = o.state.x();
    Ok(SolveReport {
        method: "ip".into(),
        status: o.status,
        x_final,
        state_final: o.state,
        residual_history: o.trace.residual,
        merit_history: o.trace.merit,
        step_history: o.trace.step,
        r_history: o.trace.r,
        error,
        iterations: o.iterations,
        wall_time: started.elapsed(),
        backtrack_total: 0,
        failed_at: o.failed_at,
    })
}

fn interior_point_core(sys: &dyn Complementarity, cfg: &BaselineConfig) -> Result<(Outcome, Instant)> {
    cfg.validate()?;
    let started = Instant::now();
    let d = sys.dim();
    let init = cfg.init.state(d)?;
    let (mut y, mut z) = (init.y, init.z);
    let mut trace = Trace::new();
    let mu_of = |y: &[f64], z: &[f64]| y.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() / d as f64;

    let mut best = (sys.error(&y, &z), y.clone(), z.clone(), mu_of(&y, &z));
    trace.push(best.0, 0.0, best.3);
    let mut k = 0;

    let (status, failed_at) = loop {
        if best.0 <= cfg.tol {
            break (SolveStatus::Converged, None);
        }
        if k >= cfg.max_iter {
            break (SolveStatus::MaxIterations, None);
        }
        let Ok((res, jy, jz)) = sys.eval(&y, &z) else {
            break (SolveStatus::DomainBreakdown, Some(k));
        };
        let target = cfg.sigma * mu_of(&y, &z);
        let jac = block_matrix(&jy, &jz, &z, &y);
        let mut rhs: Vec<f64> = res.iter().map(|v| -v).collect();
        rhs.extend((0..d).map(|i| target - y[i] * z[i]));
        let Ok(step) = jac.solve(&rhs) else {
            break (SolveStatus::SingularJacobian, Some(k));
        };
        let mut alpha: f64 = 1.0;
        for i in 0..d {
            for (v, dv) in [(y[i], step[i]), (z[i], step[d + i])] {
                if dv < 0.0 {
                    alpha = alpha.min(-cfg.frac_to_boundary * v / dv);
                }
            }
        }
        for i in 0..d {
            y[i] += alpha * step[i];
            z[i] += alpha * step[d + i];
        }
        k += 1;
        let err = sys.error(&y, &z);
        let mu = mu_of(&y, &z);
        if !err.is_finite() {
            break (SolveStatus::DomainBreakdown, Some(k));
        }
        trace.push(err, alpha, mu);
        if err < best.0 {
            best = (err, y.clone(), z.clone(), mu);
        }
    };

    Ok((
        Outcome {
            status,
            state: state(&best.1, &best.2, best.3),
            trace,
            iterations: k,
            backtracks: 0,
            failed_at,
        },
        started,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn softmax_min_examples() {
        assert_relative_eq!(softmax_min(1.0, 2.0, 0.1), 1.0 - 0.1 * (-10f64).exp().ln_1p(), epsilon = 1e-15);
        assert!((softmax_min(1.0, 2.0, 0.1) - 0.9999955).abs() < 1e-7);
        for t in [-3.0, 0.0, 2.5] {
            assert_relative_eq!(softmax_min(t, t, 0.7), t - 0.7 * 2f64.ln(), epsilon = 1e-14);
        }
        assert!(softmax_min(0.0, 1e6, 0.01).abs() <= 1e-12);
        assert!(softmax_min(1e300, -1e300, 1e-300).is_finite());
    }

    #[test]
    fn softmax_partials_match_differences() {
        for (a, b, r) in [(1.0, 2.0, 0.5), (-0.3, 0.4, 0.1), (3.0, 3.0, 1.0)] {
            let (pa, pb) = softmax_min_partials(a, b, r);
            let h = 1e-6;
            let fa = (softmax_min(a + h, b, r) - softmax_min(a - h, b, r)) / (2.0 * h);
            let fb = (softmax_min(a, b + h, r) - softmax_min(a, b - h, r)) / (2.0 * h);
            assert!((pa - fa).abs() < 1e-7);
            assert!((pb - fb).abs() < 1e-7);
            assert_relative_eq!(pa + pb, 1.0);
        }
    }

    proptest! {
        #[test]
        fn softmax_error_bound(a in -1e3f64..1e3, b in -1e3f64..1e3, r in 1e-6f64..10.0) {
            let err = (softmax_min(a, b, r) - a.min(b)).abs();
            prop_assert!(err <= r * 2f64.ln() * (1.0 + 1e-12) + 1e-12 * a.abs().max(b.abs()));
        }
    }

    #[test]
    fn config_validation() {
        let mut c = BaselineConfig::default();
        assert!(c.validate().is_ok());
        c.shrink = 1.0;
        assert!(c.validate().is_err());
        let c = BaselineConfig {
            sigma: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = BaselineConfig {
            r_min: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn ip_on_strictly_complementary_lcp() {
        let m = DenseMatrix::identity(2);
        let rep = solve_lcp_interior_point(&m, &[-1.0, -1.0], &BaselineConfig::default()).unwrap();
        assert_eq!(rep.status, SolveStatus::Converged);
        assert!(rep.iterations <= 50);
        for i in 0..2 {
            assert!((rep.state_final.y[i] - 1.0).abs() < 1e-9);
            assert!(rep.state_final.z[i].abs() < 1e-9);
        }
        // from y = z = e the first target is σ⟨e, e⟩/d = σ
        assert_eq!(rep.r_history[0], 1.0);
    }

    #[test]
    fn ip_iterates_stay_interior() {
        let m = DenseMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        let cfg = BaselineConfig {
            max_iter: 30,
            ..Default::default()
        };
        let rep = solve_lcp_interior_point(&m, &[-1.0, 1.0], &cfg).unwrap();
        assert!(rep.state_final.y.iter().chain(&rep.state_final.z).all(|&v| v > 0.0));
        assert!(rep.r_history.iter().all(|&mu| mu > 0.0));
    }

    #[test]
    fn softmax_solves_scalar_nave() {
        let p = NaveProblem::new("aff", 1, |x| vec![3.0 * x[0]]).with_rhs(vec![2.0]).unwrap();
        let rep = solve_softmax(&p, &BaselineConfig::default()).unwrap();
        assert_eq!(rep.status, SolveStatus::Converged);
        assert!((rep.x_final[0] - 1.0).abs() < 1e-10);
        assert_eq!(rep.method, "softmax");
    }
}
