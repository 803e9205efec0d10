//! Smoothing kernels `θ` (with `ψ = 1 - θ`), the smoothed complementarity
//! component `G_r(y, z) = r ψ⁻¹(ψ(y/r) + ψ(z/r))`, and numerical checks of the
//! asymptotic conditions that make a kernel usable.
//!
//! The generic composition through `ψ` and `ψ⁻¹` underflows once `y/r` gets
//! large, which is exactly the regime a solver ends in. [`Theta1`] and
//! [`Theta2`] therefore override [`SmoothingFamily::smoothed`] and
//! [`SmoothingFamily::smoothed_partials`] with algebraically equivalent closed
//! forms that stay finite for any `r > 0`.

use std::fmt;
use std::sync::Arc;

use crate::error::{NaveError, Result};

/// A smoothing kernel described by `θ`, `ψ = 1 - θ`, `ψ'` and `ψ⁻¹`.
///
/// Implementations must be reentrant; solvers share them across threads.
pub trait SmoothingFamily: Send + Sync {
    fn label(&self) -> &str;

    fn psi(&self, t: f64) -> f64;

    fn psi_prime(&self, t: f64) -> f64;

    /// Inverse of `ψ` on its range. Arguments `s ≤ 0` are outside the range
    /// of every kernel here.
    fn psi_inv(&self, s: f64) -> Result<f64>;

    fn theta(&self, t: f64) -> f64 {
        1.0 - self.psi(t)
    }

    /// `G_r(y, z)`; see [`generic_smoothed`] for the default composition.
    fn smoothed(&self, y: f64, z: f64, r: f64) -> Result<f64> {
        generic_smoothed(self, y, z, r)
    }

    /// `(∂G/∂y, ∂G/∂z, ∂G/∂r)`.
    fn smoothed_partials(&self, y: f64, z: f64, r: f64) -> Result<(f64, f64, f64)> {
        generic_smoothed_partials(self, y, z, r)
    }

    /// `x |ψ'(x)| / ψ(x)`.
    fn loja_ratio(&self, x: f64) -> Result<f64> {
        let p = self.psi(x);
        if !(p > 0.0) || !p.is_finite() {
            return Err(NaveError::DomainError(format!(
                "{}: psi({x}) = {p}, ratio undefined",
                self.label()
            )));
        }
        Ok(x * self.psi_prime(x).abs() / p)
    }
}

impl fmt::Debug for dyn SmoothingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothingFamily({})", self.label())
    }
}

/// `r ψ⁻¹(ψ(y/r) + ψ(z/r))` evaluated literally. A sum that underflows to
/// zero is clamped to the smallest positive normal so `ψ⁻¹` stays defined.
pub fn generic_smoothed<F: SmoothingFamily + ?Sized>(fam: &F, y: f64, z: f64, r: f64) -> Result<f64> {
    check_r(r)?;
    let s = clamp_sum(fam, fam.psi(y / r) + fam.psi(z / r), y, z, r)?;
    Ok(r * fam.psi_inv(s)?)
}

pub fn generic_smoothed_partials<F: SmoothingFamily + ?Sized>(
    fam: &F,
    y: f64,
    z: f64,
    r: f64,
) -> Result<(f64, f64, f64)> {
    check_r(r)?;
    let (a, b) = (y / r, z / r);
    let s = clamp_sum(fam, fam.psi(a) + fam.psi(b), y, z, r)?;
    let u = fam.psi_inv(s)?;
    let den = fam.psi_prime(u);
    if den == 0.0 || !den.is_finite() {
        return Err(NaveError::DegenerateDerivative(format!(
            "{}: psi'(psi_inv(S)) = {den} at y={y}, z={z}, r={r}",
            fam.label()
        )));
    }
    let (pa, pb) = (fam.psi_prime(a), fam.psi_prime(b));
    Ok((pa / den, pb / den, u - (a * pa + b * pb) / den))
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(NaveError::DomainError(format!(
            "smoothing parameter must be positive, got {r}"
        )))
    }
}

fn clamp_sum<F: SmoothingFamily + ?Sized>(fam: &F, s: f64, y: f64, z: f64, r: f64) -> Result<f64> {
    if !s.is_finite() || s < 0.0 {
        return Err(NaveError::DomainError(format!(
            "{}: psi sum {s} at y={y}, z={z}, r={r}",
            fam.label()
        )));
    }
    Ok(s.max(f64::MIN_POSITIVE))
}

fn check_psi_arg(label: &str, s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(NaveError::DomainError(format!(
            "{label}: psi_inv({s}) is outside (0, inf)"
        )))
    }
}

/// `θ₁(t) = t/(t+1)` for `t ≥ 0`, `t` for `t < 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Theta1;

impl Theta1 {
    /// `r ψ₁(v/r)`, finite for every `v` and `r > 0`.
    fn scaled_psi(v: f64, r: f64) -> f64 {
        if v < 0.0 {
            r - v
        } else {
            r * r / (r + v)
        }
    }
}

impl SmoothingFamily for Theta1 {
    fn label(&self) -> &str {
        "theta1"
    }

    fn psi(&self, t: f64) -> f64 {
        if t >= 0.0 {
            1.0 / (1.0 + t)
        } else {
            1.0 - t
        }
    }

    fn psi_prime(&self, t: f64) -> f64 {
        if t >= 0.0 {
            -1.0 / ((1.0 + t) * (1.0 + t))
        } else {
            -1.0
        }
    }

    fn psi_inv(&self, s: f64) -> Result<f64> {
        check_psi_arg(self.label(), s)?;
        Ok(if s <= 1.0 { 1.0 / s - 1.0 } else { 1.0 - s })
    }

    fn theta(&self, t: f64) -> f64 {
        if t >= 0.0 {
            t / (t + 1.0)
        } else {
            t
        }
    }

    // ψ₁(y/r) + ψ₁(z/r) ≤ 1 exactly when y, z ≥ 0 and yz ≥ r²; there
    // G = (yz - r²)/(2r + y + z). Otherwise G = r - rψ₁(y/r) - rψ₁(z/r).
    fn smoothed(&self, y: f64, z: f64, r: f64) -> Result<f64> {
        check_r(r)?;
        if y >= 0.0 && z >= 0.0 && y * z >= r * r {
            Ok((y * z - r * r) / (2.0 * r + y + z))
        } else {
            Ok(r - Self::scaled_psi(y, r) - Self::scaled_psi(z, r))
        }
    }

    fn smoothed_partials(&self, y: f64, z: f64, r: f64) -> Result<(f64, f64, f64)> {
        check_r(r)?;
        if y >= 0.0 && z >= 0.0 && y * z >= r * r {
            let d = 2.0 * r + y + z;
            let d2 = d * d;
            return Ok((
                (z + r) * (z + r) / d2,
                (y + r) * (y + r) / d2,
                -2.0 * (r + y) * (r + z) / d2,
            ));
        }
        // d(rψ₁(v/r))/dv and d(rψ₁(v/r))/dr
        let parts = |v: f64| {
            if v < 0.0 {
                (-1.0, 1.0)
            } else {
                let q = r + v;
                (-r * r / (q * q), (r * r + 2.0 * r * v) / (q * q))
            }
        };
        let (dy, ry) = parts(y);
        let (dz, rz) = parts(z);
        Ok((-dy, -dz, 1.0 - ry - rz))
    }

    fn loja_ratio(&self, x: f64) -> Result<f64> {
        if x >= 0.0 {
            Ok(x / (1.0 + x))
        } else {
            Ok(x.abs() / (1.0 - x))
        }
    }
}

/// `θ₂(t) = 1 - e^{-t}`; `G_r` is then the log-sum-exp soft minimum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Theta2;

impl SmoothingFamily for Theta2 {
    fn label(&self) -> &str {
        "theta2"
    }

    fn psi(&self, t: f64) -> f64 {
        (-t).exp()
    }

    fn psi_prime(&self, t: f64) -> f64 {
        -(-t).exp()
    }

    fn psi_inv(&self, s: f64) -> Result<f64> {
        check_psi_arg(self.label(), s)?;
        Ok(-s.ln())
    }

    fn theta(&self, t: f64) -> f64 {
        -(-t).exp_m1()
    }

    // -r ln(e^{-y/r} + e^{-z/r}) = min(y, z) - r ln(1 + e^{-|y-z|/r})
    fn smoothed(&self, y: f64, z: f64, r: f64) -> Result<f64> {
        check_r(r)?;
        Ok(y.min(z) - r * (-(y - z).abs() / r).exp().ln_1p())
    }

    fn smoothed_partials(&self, y: f64, z: f64, r: f64) -> Result<(f64, f64, f64)> {
        check_r(r)?;
        let gap = (y - z).abs() / r;
        let e = (-gap).exp();
        let w_small = 1.0 / (1.0 + e);
        let w_large = e / (1.0 + e);
        let dr = -e.ln_1p() - gap * w_large;
        if y <= z {
            Ok((w_small, w_large, dr))
        } else {
            Ok((w_large, w_small, dr))
        }
    }

    fn loja_ratio(&self, x: f64) -> Result<f64> {
        Ok(x.abs())
    }
}

/// `ψ(x) = 1/ln(1+x)` on `(0, ∞)`: convex and decreasing to zero, yet its
/// ratio `x|ψ'|/ψ = x/((1+x) ln(1+x))` tends to zero. Defined only for
/// `x > 0`; other arguments produce NaN.
#[derive(Debug, Clone, Copy, Default)]
pub struct LogCounterexample;

impl SmoothingFamily for LogCounterexample {
    fn label(&self) -> &str {
        "logexp-counterexample"
    }

    fn psi(&self, t: f64) -> f64 {
        if t > 0.0 {
            1.0 / t.ln_1p()
        } else {
            f64::NAN
        }
    }

    fn psi_prime(&self, t: f64) -> f64 {
        if t > 0.0 {
            let l = t.ln_1p();
            -1.0 / ((1.0 + t) * l * l)
        } else {
            f64::NAN
        }
    }

    fn psi_inv(&self, s: f64) -> Result<f64> {
        check_psi_arg(self.label(), s)?;
        Ok((1.0 / s).exp_m1())
    }
}

/// Resolves `theta1`, `theta2` or `logexp-counterexample` (also `1`, `2`).
pub fn family_by_name(name: &str) -> Result<Arc<dyn SmoothingFamily>> {
    match name {
        "theta1" | "1" => Ok(Arc::new(Theta1)),
        "theta2" | "2" => Ok(Arc::new(Theta2)),
        "logexp-counterexample" | "logexp" => Ok(Arc::new(LogCounterexample)),
        other => Err(NaveError::ConfigError(format!(
            "unknown smoothing family '{other}'"
        ))),
    }
}

pub fn make_theta1() -> Arc<dyn SmoothingFamily> {
    Arc::new(Theta1)
}

pub fn make_theta2() -> Arc<dyn SmoothingFamily> {
    Arc::new(Theta2)
}

pub fn gr_component(fam: &dyn SmoothingFamily, yi: f64, zi: f64, r: f64) -> Result<f64> {
    fam.smoothed(yi, zi, r)
}

pub fn gr_partials(fam: &dyn SmoothingFamily, yi: f64, zi: f64, r: f64) -> Result<(f64, f64, f64)> {
    fam.smoothed_partials(yi, zi, r)
}

pub fn loja_ratio(fam: &dyn SmoothingFamily, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(NaveError::DomainError(format!(
            "ratio is sampled at x > 0, got {x}"
        )));
    }
    fam.loja_ratio(x)
}

/// `n` points spaced geometrically on `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2, "bad geometric grid");
    let step = (hi / lo).ln() / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|k| lo * (step * k as f64).exp()).collect();
    g[n - 1] = hi;
    g
}

/// `ψ(x)/m ≥ ψ(nx)` at every grid point, all of which must exceed `R`.
pub fn check_condition_ii(
    fam: &dyn SmoothingFamily,
    m: f64,
    n: f64,
    r_bound: f64,
    grid: &[f64],
) -> Result<bool> {
    if !(m > 1.0 && n > 1.0 && r_bound > 0.0) {
        return Err(NaveError::InvalidInput(format!(
            "need m > 1, n > 1, R > 0; got ({m}, {n}, {r_bound})"
        )));
    }
    if grid.is_empty() {
        return Err(NaveError::InvalidInput("empty grid".into()));
    }
    if let Some(x) = grid.iter().find(|&&x| !(x > r_bound)) {
        return Err(NaveError::InvalidInput(format!(
            "grid point {x} is not above R = {r_bound}"
        )));
    }
    Ok(holds_on(fam, m, n, grid.iter().copied()))
}

fn holds_on(fam: &dyn SmoothingFamily, m: f64, n: f64, pts: impl Iterator<Item = f64>) -> bool {
    let mut any = false;
    for x in pts {
        any = true;
        let (lhs, rhs) = (fam.psi(x) / m, fam.psi(n * x));
        if !(lhs >= rhs) {
            return false;
        }
    }
    any
}

/// The classical halving assumption `ψ(t)/2 ≥ ψ(t/a)` on `(R_a, ∞)`, which is
/// condition (ii) with `m = 2`, `n = 1/a`.
pub fn check_legacy_assumption(
    fam: &dyn SmoothingFamily,
    a: f64,
    r_a: f64,
    grid: &[f64],
) -> Result<bool> {
    if !(a > 0.0 && a < 1.0) {
        return Err(NaveError::InvalidInput(format!("need a in (0, 1), got {a}")));
    }
    check_condition_ii(fam, 2.0, 1.0 / a, r_a, grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LojaVerdict {
    /// The ratio stays bounded away from zero and a condition (ii) witness
    /// exists.
    SatisfiedI,
    /// A witness exists but the ratio could not be evaluated on the tail.
    SatisfiedII,
    FailsBoth,
    /// The two checks disagree.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub m: f64,
    pub n: f64,
    pub r_bound: f64,
}

#[derive(Debug, Clone)]
pub struct LojaReport {
    pub family_label: String,
    pub ratio_samples: Vec<(f64, f64)>,
    /// Minimum ratio over the last half of the grid.
    pub liminf_estimate: f64,
    /// Relative drop of the ratio across the tail window; positive when the
    /// ratio is still falling.
    pub tail_decay: f64,
    pub condition_ii_witness: Option<Witness>,
    pub verdict: LojaVerdict,
}

/// Cut below which the liminf estimate counts as zero.
pub const LIMINF_THRESHOLD: f64 = 1e-3;
/// A tail whose ratio still drops by more than this fraction is treated as
/// decaying to zero.
pub const TAIL_DECAY_LIMIT: f64 = 0.05;

/// Candidate `(m, n, R)` triples: `m` from `{2, 10, 100}`, `n = 2^k` for
/// `k = 1..=24`, `R` from `{1, 10, 100}`, ordered by `m`, `R`, then `n`.
pub fn default_candidates() -> Vec<Witness> {
    let mut out = Vec::new();
    for m in [2.0, 10.0, 100.0] {
        for r_bound in [1.0, 10.0, 100.0] {
            for k in 1..=24 {
                out.push(Witness {
                    m,
                    n: 2f64.powi(k),
                    r_bound,
                });
            }
        }
    }
    out
}

pub fn loja_verdict(
    fam: &dyn SmoothingFamily,
    tail_grid: &[f64],
    candidates: &[Witness],
) -> Result<LojaReport> {
    if tail_grid.len() < 50 {
        return Err(NaveError::InvalidInput(format!(
            "tail grid needs at least 50 points, got {}",
            tail_grid.len()
        )));
    }
    if tail_grid[0] <= 0.0 || tail_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(NaveError::InvalidInput(
            "tail grid must be positive and strictly increasing".into(),
        ));
    }

    let ratio_samples: Vec<(f64, f64)> = tail_grid
        .iter()
        .map(|&x| (x, loja_ratio(fam, x).unwrap_or(f64::NAN)))
        .collect();
    let tail = &ratio_samples[ratio_samples.len() / 2..];
    let assessable = tail.iter().all(|(_, r)| r.is_finite());
    let liminf_estimate = tail.iter().map(|&(_, r)| r).fold(f64::INFINITY, f64::min);
    let (first, last) = (tail[0].1, tail[tail.len() - 1].1);
    let tail_decay = if first > 0.0 { (first - last) / first } else { 0.0 };

    let condition_ii_witness = candidates.iter().copied().find(|w| {
        w.m > 1.0
            && w.n > 1.0
            && holds_on(
                fam,
                w.m,
                w.n,
                tail_grid.iter().copied().filter(|&x| x > w.r_bound),
            )
    });

    let cond_i = assessable && liminf_estimate > LIMINF_THRESHOLD && tail_decay <= TAIL_DECAY_LIMIT;
    let verdict = match (assessable, cond_i, condition_ii_witness.is_some()) {
        (false, _, true) => LojaVerdict::SatisfiedII,
        (_, true, true) => LojaVerdict::SatisfiedI,
        (_, false, false) => LojaVerdict::FailsBoth,
        _ => LojaVerdict::Inconclusive,
    };

    Ok(LojaReport {
        family_label: fam.label().to_string(),
        ratio_samples,
        liminf_estimate,
        tail_decay,
        condition_ii_witness,
        verdict,
    })
}

/// Condition (iii) on a finite ladder of `m`: for each `m`, the smallest
/// `n = 2^k` (`k ≤ 24`) and `R ∈ {1, 10, 100, 1000}` with `ψ(x)/m ≥ ψ(nx)` on
/// the grid points above `R`, if any.
pub fn check_condition_iii(
    fam: &dyn SmoothingFamily,
    m_ladder: &[f64],
    grid: &[f64],
) -> Vec<(f64, Option<Witness>)> {
    m_ladder
        .iter()
        .map(|&m| {
            let found = (1..=24).find_map(|k| {
                let n = 2f64.powi(k);
                [1.0, 10.0, 100.0, 1000.0].into_iter().find_map(|r_bound| {
                    holds_on(fam, m, n, grid.iter().copied().filter(|&x| x > r_bound)).then_some(
                        Witness { m, n, r_bound },
                    )
                })
            });
            (m, found)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fd_partials(fam: &dyn SmoothingFamily, y: f64, z: f64, r: f64) -> (f64, f64, f64) {
        let h = 1e-6;
        let g = |a: f64, b: f64, c: f64| generic_smoothed(fam, a, b, c).unwrap();
        (
            (g(y + h, z, r) - g(y - h, z, r)) / (2.0 * h),
            (g(y, z + h, r) - g(y, z - h, r)) / (2.0 * h),
            (g(y, z, r + h) - g(y, z, r - h)) / (2.0 * h),
        )
    }

    #[test]
    fn theta1_values() {
        let f = Theta1;
        assert_eq!(f.theta(1.0), 0.5);
        assert_eq!(f.theta(-2.0), -2.0);
        assert_eq!(f.psi_inv(0.25).unwrap(), 3.0);
        assert!(matches!(f.psi_inv(0.0), Err(NaveError::DomainError(_))));
        assert!(f.psi_inv(-1.0).is_err());
    }

    #[test]
    fn theta2_values() {
        let f = Theta2;
        assert_eq!(f.theta(0.0), 0.0);
        assert_relative_eq!(f.psi(2f64.ln()), 0.5, epsilon = 1e-15);
        assert_eq!(f.psi_inv(1.0).unwrap(), 0.0);
        assert!(f.psi_inv(0.0).is_err());
    }

    #[test]
    fn gr_component_examples() {
        let g = gr_component(&Theta2, 1.0, 1.0, 0.5).unwrap();
        assert_relative_eq!(g, 0.5 * (2.0 - 2f64.ln()), epsilon = 1e-14);
        assert_relative_eq!(g, 0.65343, epsilon = 1e-5);

        let g = gr_component(&Theta2, 3.0, 0.5, 0.01).unwrap();
        assert!((g - 0.5).abs() <= 1e-10);

        for r in [1e-3, 0.5, 7.0] {
            assert_relative_eq!(gr_component(&Theta1, 0.0, 0.0, r).unwrap(), -r, epsilon = 1e-15);
            assert_relative_eq!(generic_smoothed(&Theta1, 0.0, 0.0, r).unwrap(), -r, epsilon = 1e-15);
        }
    }

    #[test]
    fn closed_forms_agree_with_generic_composition() {
        let pts = [
            (1.0, 2.0, 0.3),
            (0.2, 0.1, 1.0),
            (-0.4, 1.5, 0.7),
            (-1.0, -2.0, 0.5),
            (3.0, 0.0, 0.2),
            (0.05, 0.02, 0.1),
        ];
        for fam in [&Theta1 as &dyn SmoothingFamily, &Theta2] {
            for &(y, z, r) in &pts {
                let closed = fam.smoothed(y, z, r).unwrap();
                let generic = generic_smoothed(fam, y, z, r).unwrap();
                assert_relative_eq!(closed, generic, epsilon = 1e-12, max_relative = 1e-12);
                let (a, b, c) = fam.smoothed_partials(y, z, r).unwrap();
                let (ga, gb, gc) = generic_smoothed_partials(fam, y, z, r).unwrap();
                assert_relative_eq!(a, ga, epsilon = 1e-12, max_relative = 1e-10);
                assert_relative_eq!(b, gb, epsilon = 1e-12, max_relative = 1e-10);
                assert_relative_eq!(c, gc, epsilon = 1e-12, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn partials_match_finite_differences() {
        for fam in [&Theta1 as &dyn SmoothingFamily, &Theta2] {
            let (a, b, c) = gr_partials(fam, 1.0, 2.0, 0.3).unwrap();
            let (fa, fb, fc) = fd_partials(fam, 1.0, 2.0, 0.3);
            assert_relative_eq!(a, fa, max_relative = 1e-6);
            assert_relative_eq!(b, fb, max_relative = 1e-6);
            assert_relative_eq!(c, fc, max_relative = 1e-6);
        }
    }

    #[test]
    fn symmetric_partials_and_zero_point() {
        for t in [0.0, 0.3, 4.0] {
            for r in [0.01, 1.0] {
                let (a, b, _) = gr_partials(&Theta2, t, t, r).unwrap();
                assert_eq!(a, 0.5);
                assert_eq!(b, 0.5);
            }
        }
        let (_, _, dr) = gr_partials(&Theta1, 0.0, 0.0, 0.4).unwrap();
        assert_eq!(dr, -1.0);
    }

    #[test]
    fn closed_forms_survive_tiny_r() {
        let r = 1e-14;
        assert_eq!(gr_component(&Theta2, 2.0, 1e-3, r).unwrap(), 1e-3);
        let g1 = gr_component(&Theta1, 2.0, 1e-3, r).unwrap();
        assert_relative_eq!(g1, 2.0 * 1e-3 / 2.001, max_relative = 1e-12);
        let g = gr_component(&Theta2, -5.0, 3.0, r).unwrap();
        assert_eq!(g, -5.0);
        let (a, b, c) = gr_partials(&Theta1, -5.0, 3.0, r).unwrap();
        assert!(a.is_finite() && b.is_finite() && c.is_finite());
    }

    #[test]
    fn generic_path_flags_bad_r() {
        assert!(matches!(
            generic_smoothed(&Theta2, 1.0, 1.0, 0.0),
            Err(NaveError::DomainError(_))
        ));
        assert!(gr_component(&Theta1, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn loja_ratio_examples() {
        assert_eq!(loja_ratio(&Theta2, 5.0).unwrap(), 5.0);
        assert_eq!(loja_ratio(&Theta1, 3.0).unwrap(), 0.75);
        let x = 10f64.exp() - 1.0;
        let expected = x / ((1.0 + x) * 10.0);
        assert_relative_eq!(loja_ratio(&LogCounterexample, x).unwrap(), expected, max_relative = 1e-12);
        assert!(loja_ratio(&Theta1, 0.0).is_err());
        // generic path: ψ₂ underflows at 1e6
        struct Plain;
        impl SmoothingFamily for Plain {
            fn label(&self) -> &str {
                "plain-exp"
            }
            fn psi(&self, t: f64) -> f64 {
                (-t).exp()
            }
            fn psi_prime(&self, t: f64) -> f64 {
                -(-t).exp()
            }
            fn psi_inv(&self, s: f64) -> Result<f64> {
                Ok(-s.ln())
            }
        }
        assert!(matches!(loja_ratio(&Plain, 1e6), Err(NaveError::DomainError(_))));
    }

    #[test]
    fn condition_ii_examples() {
        let grid = geometric_grid(1.1, 1e6, 200);
        assert!(check_condition_ii(&Theta2, 2.0, 2.0, 1.0, &grid).unwrap());
        assert!(check_condition_ii(&Theta1, 2.0, 4.0, 1.0, &grid).unwrap());
        assert!(!check_condition_ii(&Theta1, 2.0, 2.0, 1.0, &grid).unwrap());

        let big = geometric_grid(1e3, 1e12, 200);
        assert!(!check_condition_ii(&LogCounterexample, 2.0, 2.0, 100.0, &big).unwrap());
        assert!(!check_condition_ii(&LogCounterexample, 1.5, 1000.0, 100.0, &big).unwrap());

        assert!(check_condition_ii(&Theta2, 1.0, 2.0, 1.0, &grid).is_err());
        assert!(check_condition_ii(&Theta2, 2.0, 2.0, 10.0, &grid).is_err());
        assert!(check_condition_ii(&Theta2, 2.0, 2.0, 1.0, &[]).is_err());
    }

    #[test]
    fn legacy_assumption_examples() {
        let grid = geometric_grid(1.1, 1e6, 200);
        assert!(check_legacy_assumption(&Theta2, 0.5, 1.0, &grid).unwrap());
        assert!(check_legacy_assumption(&Theta1, 0.25, 1.0, &grid).unwrap());
        let big = geometric_grid(11.0, 1e10, 200);
        assert!(!check_legacy_assumption(&LogCounterexample, 0.5, 10.0, &big).unwrap());
        assert!(check_legacy_assumption(&Theta1, 1.0, 1.0, &grid).is_err());
    }

    #[test]
    fn verdicts_on_the_battery() {
        let grid = geometric_grid(1.1, 1e10, 200);
        let cands = default_candidates();

        let r2 = loja_verdict(&Theta2, &grid, &cands).unwrap();
        assert_eq!(r2.verdict, LojaVerdict::SatisfiedI);
        assert_eq!(
            r2.condition_ii_witness,
            Some(Witness {
                m: 2.0,
                n: 2.0,
                r_bound: 1.0
            })
        );
        let first_tail = r2.ratio_samples[r2.ratio_samples.len() / 2].0;
        assert_eq!(r2.liminf_estimate, first_tail);

        let r1 = loja_verdict(&Theta1, &grid, &cands).unwrap();
        assert_eq!(r1.verdict, LojaVerdict::SatisfiedI);
        assert!(r1.liminf_estimate >= 0.99);

        let rc = loja_verdict(&LogCounterexample, &grid, &cands).unwrap();
        assert_eq!(rc.verdict, LojaVerdict::FailsBoth);
        assert!(rc.condition_ii_witness.is_none());
        assert!(rc.tail_decay > TAIL_DECAY_LIMIT);

        assert!(loja_verdict(&Theta1, &grid[..10], &cands).is_err());
    }

    #[test]
    fn condition_iii_ladder() {
        let grid = geometric_grid(1.1, 1e8, 200);
        for fam in [&Theta1 as &dyn SmoothingFamily, &Theta2] {
            let ladder = check_condition_iii(fam, &[2.0, 10.0, 100.0], &grid);
            assert!(ladder.iter().all(|(_, w)| w.is_some()), "{}", fam.label());
        }
        let ladder = check_condition_iii(&LogCounterexample, &[2.0, 10.0, 100.0], &grid);
        assert!(ladder.iter().all(|(_, w)| w.is_none()));
    }

    #[test]
    fn theta_axioms_on_grid() {
        let grid: Vec<f64> = (0..=2020).map(|k| -10.0 + k as f64 * 0.5).collect();
        for fam in [&Theta1 as &dyn SmoothingFamily, &Theta2] {
            assert_eq!(fam.theta(0.0), 0.0);
            let th: Vec<f64> = grid.iter().map(|&t| fam.theta(t)).collect();
            for w in th.windows(2) {
                assert!(w[1] - w[0] >= -1e-12);
            }
            for w in th.windows(3) {
                assert!(w[0] - 2.0 * w[1] + w[2] <= 1e-12);
            }
            for (&t, &v) in grid.iter().zip(&th) {
                if t < 0.0 {
                    assert!(v < 0.0);
                }
                if t <= 30.0 {
                    assert!(v < 1.0);
                }
                assert_relative_eq!(fam.psi(t), 1.0 - fam.theta(t), epsilon = 1e-15);
            }
        }
        assert!(Theta2.theta(1e6) > 1.0 - 1e-3);
        assert_eq!(Theta1.theta(1e6), 1e6 / (1e6 + 1.0));
    }

    #[test]
    fn psi_inverse_round_trip() {
        for fam in [&Theta1 as &dyn SmoothingFamily, &Theta2] {
            for k in 0..=550 {
                let t = -5.0 + k as f64 * 0.1;
                let back = fam.psi_inv(fam.psi(t)).unwrap();
                assert!((back - t).abs() <= 1e-10 * t.abs().max(1.0), "{} t={t}", fam.label());
            }
        }
    }

    #[test]
    fn smoothed_min_limits() {
        let rs = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
        for (y, z) in [(0.1, 3.0), (5.0, 5.0), (2.0, 0.7), (1.0, 1.3)] {
            let m = f64::min(y, z);
            for &r in &rs {
                let g = gr_component(&Theta2, y, z, r).unwrap();
                assert!((g - m).abs() <= 10.0 * r);
                for fam in [&Theta1 as &dyn SmoothingFamily, &Theta2] {
                    let (a, b) = (gr_component(fam, y, z, r).unwrap(), gr_component(fam, z, y, r).unwrap());
                    assert_relative_eq!(a, b, max_relative = 1e-14);
                }
            }
            // θ₁ converges monotonically, to yz/(y+z) rather than to min(y, z)
            let lim = y * z / (y + z);
            let errs: Vec<f64> = rs
                .iter()
                .map(|&r| (gr_component(&Theta1, y, z, r).unwrap() - lim).abs())
                .collect();
            for w in errs.windows(2) {
                assert!(w[1] <= w[0]);
            }
            assert!(errs[rs.len() - 1] <= 1e-5);
        }
    }

    #[test]
    fn family_lookup() {
        assert_eq!(family_by_name("1").unwrap().label(), "theta1");
        assert_eq!(family_by_name("theta2").unwrap().label(), "theta2");
        assert!(family_by_name("theta3").is_err());
    }
}
