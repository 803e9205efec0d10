//! Finite-difference discretizations of second-order ODEs with an `|x|`
//! term, written as NAVEs in the nodal values.
//!
//! Three instances are provided:
//!
//! - the stiff initial value problem `ẍ + 1001ẋ - 1000|x| = 0`,
//!   `x(0) = x₀ < 0`, `ẋ(0) = 0`, whose solution stays negative;
//! - the same equation as a boundary value problem on `[0, T]`;
//! - `ẍ + arctan(x) - |x| = f(t)` with the manufactured solution `cos(πt)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{NaveError, Result};
use crate::linalg::{norm_inf, DenseMatrix};
use crate::nave::NaveProblem;

/// `-e^{-1000t}/999 + 1000e^{-t}/999`, scaled by `x₀`.
pub fn stiff_exact(t: f64, x0: f64) -> f64 {
    x0 * (-(-1000.0 * t).exp() / 999.0 + 1000.0 / 999.0 * (-t).exp())
}

pub fn arctan_exact(t: f64) -> f64 {
    (PI * t).cos()
}

/// Source term making `cos(πt)` solve the arctan equation.
pub fn arctan_source(t: f64) -> f64 {
    let c = (PI * t).cos();
    c.atan() - c.abs() - PI * PI * c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// `x(0) = x0`, `ẋ(0) = 0`.
    Ivp { x0: f64 },
    /// `x(0) = x0`, `x(T) = y0`.
    Bvp { x0: f64, y0: f64 },
}

#[derive(Clone)]
pub struct OdeDiscretization {
    pub mesh_h: f64,
    pub n_steps: usize,
    /// Second-difference matrix, already divided by `h²`.
    pub a: DenseMatrix,
    /// First-difference matrix, already divided by `h` or `2h`.
    pub b: Option<DenseMatrix>,
    pub rhs: Vec<f64>,
    /// Times of the unknown nodal values.
    pub nodes: Vec<f64>,
    pub exact: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    pub boundary: Boundary,
}

impl fmt::Debug for OdeDiscretization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeDiscretization")
            .field("mesh_h", &self.mesh_h)
            .field("n_steps", &self.n_steps)
            .field("unknowns", &self.nodes.len())
            .field("boundary", &self.boundary)
            .finish()
    }
}

impl OdeDiscretization {
    pub fn exact_on_mesh(&self) -> Option<Vec<f64>> {
        self.exact.as_ref().map(|e| self.nodes.iter().map(|&t| e(t)).collect())
    }

    /// `max |x_i - x(t_i)|` over the unknown nodes.
    pub fn error_inf(&self, x: &[f64]) -> Result<f64> {
        let exact = self
            .exact_on_mesh()
            .ok_or_else(|| NaveError::InvalidInput("discretization has no exact solution".into()))?;
        if x.len() != exact.len() {
            return Err(NaveError::InvalidInput(format!(
                "solution has {} values, mesh has {}",
                x.len(),
                exact.len()
            )));
        }
        let diff: Vec<f64> = x.iter().zip(&exact).map(|(a, b)| a - b).collect();
        Ok(norm_inf(&diff))
    }
}

/// Number of steps for mesh width `h` on `[0, T]`; `T/h` must be an integer
/// up to rounding.
pub fn steps_for(h: f64, t_end: f64) -> Result<usize> {
    if !(h > 0.0 && t_end > 0.0) {
        return Err(NaveError::InvalidSpec(format!("need h > 0 and T > 0, got h = {h}, T = {t_end}")));
    }
    let n = (t_end / h).round();
    if (n * h - t_end).abs() > 1e-9 * t_end || n < 1.0 {
        return Err(NaveError::InvalidSpec(format!("T = {t_end} is not a multiple of h = {h}")));
    }
    Ok(n as usize)
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(NaveError::InvalidSpec(format!("need N >= 3 steps, got {n}")));
    }
    Ok(())
}

/// Row `i` holds `(x_{i-2} - 2x_{i-1} + x_i)/h²` over the unknowns
/// `x_1 … x_N`, dropping the terms that refer to the initial data.
fn ivp_second_difference(n: usize, h: f64) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| {
        let v = if i == j {
            1.0
        } else if i == j + 1 {
            -2.0
        } else if i == j + 2 {
            1.0
        } else {
            0.0
        };
        v / (h * h)
    })
}

/// Centered first differences `(x_{i+1} - x_{i-1})/2h`, closed by the
/// second-order backward formula `(x_{N-2} - 4x_{N-1} + 3x_N)/2h`.
fn ivp_first_difference(n: usize, h: f64) -> DenseMatrix {
    let mut b = DenseMatrix::from_fn(n, n, |i, j| {
        if i == n - 1 {
            0.0
        } else if j == i + 1 {
            1.0
        } else if i == j + 1 {
            -1.0
        } else {
            0.0
        }
    });
    b[(n - 1, n - 3)] = 1.0;
    b[(n - 1, n - 2)] = -4.0;
    b[(n - 1, n - 1)] = 3.0;
    b.scaled(1.0 / (2.0 * h))
}

fn linear_problem(label: String, m: DenseMatrix, rhs: Vec<f64>) -> Result<NaveProblem> {
    NaveProblem::linear(label, m).with_rhs(rhs)
}

/// Stiff IVP on `[0, T]` with `N` steps; `F = A/1000 + 1001 B/1000`.
pub fn make_stiff_ivp(x0: f64, t_end: f64, n: usize) -> Result<(OdeDiscretization, NaveProblem)> {
    check_n(n)?;
    if !(x0 < 0.0) {
        return Err(NaveError::InvalidSpec(format!("stiff IVP needs x0 < 0, got {x0}")));
    }
    let h = t_end / n as f64;
    let a = ivp_second_difference(n, h);
    let b = ivp_first_difference(n, h);
    let m = a.scaled(1.0 / 1000.0).add_scaled(1001.0 / 1000.0, &b);
    let mut rhs = vec![0.0; n];
    rhs[0] = x0 * (1.0 / (1000.0 * h * h) + 1001.0 / (2000.0 * h));
    rhs[1] = -x0 / (1000.0 * h * h);
    let nodes: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
    let p = linear_problem(format!("ode-stiff:h={h}:T={t_end}:x0={x0}"), m, rhs.clone())?;
    let disc = OdeDiscretization {
        mesh_h: h,
        n_steps: n,
        a,
        b: Some(b),
        rhs,
        nodes,
        exact: Some(Arc::new(move |t| stiff_exact(t, x0))),
        boundary: Boundary::Ivp { x0 },
    };
    Ok((disc, p))
}

/// Stiff equation on `[0, T]` with `x(0) = x0`, `x(T) = y0`, central second
/// differences and backward first differences at the `N - 1` interior
/// nodes. The exact solution is available when `y0` is the IVP value at `T`.
pub fn make_stiff_bvp(x0: f64, y0: f64, t_end: f64, n: usize) -> Result<(OdeDiscretization, NaveProblem)> {
    check_n(n)?;
    let h = t_end / n as f64;
    let k = n - 1;
    let a = DenseMatrix::from_fn(k, k, |i, j| match (i as isize) - (j as isize) {
        0 => -2.0,
        1 | -1 => 1.0,
        _ => 0.0,
    } / (h * h));
    let b = DenseMatrix::from_fn(k, k, |i, j| match (i as isize) - (j as isize) {
        0 => 1.0,
        1 => -1.0,
        _ => 0.0,
    } / h);
    let m = a.scaled(1.0 / 1000.0).add_scaled(1001.0 / 1000.0, &b);
    let mut rhs = vec![0.0; k];
    rhs[0] = -x0 / (1000.0 * h * h) + 1001.0 * x0 / (1000.0 * h);
    rhs[k - 1] -= y0 / (1000.0 * h * h);
    let nodes: Vec<f64> = (1..n).map(|i| i as f64 * h).collect();
    let consistent = (y0 - stiff_exact(t_end, x0)).abs() <= 1e-12 * y0.abs().max(1.0);
    let exact: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>> =
        consistent.then(|| Arc::new(move |t| stiff_exact(t, x0)) as Arc<dyn Fn(f64) -> f64 + Send + Sync>);
    let p = linear_problem(format!("ode-bvp:h={h}:T={t_end}:x0={x0}"), m, rhs.clone())?;
    let disc = OdeDiscretization {
        mesh_h: h,
        n_steps: n,
        a,
        b: Some(b),
        rhs,
        nodes,
        exact,
        boundary: Boundary::Bvp { x0, y0 },
    };
    Ok((disc, p))
}

/// Boundary value problem with `y0` taken from the exact IVP solution.
pub fn make_stiff_bvp_manufactured(x0: f64, t_end: f64, n: usize) -> Result<(OdeDiscretization, NaveProblem)> {
    make_stiff_bvp(x0, stiff_exact(t_end, x0), t_end, n)
}

/// `ẍ + arctan(x) - |x| = f(t)` on `[0, T]`, `x(0) = x0`, `ẋ(0) = 0`;
/// `F(x) = Ax + arctan(x)`.
pub fn make_arctan_ivp(x0: f64, t_end: f64, n: usize) -> Result<(OdeDiscretization, NaveProblem)> {
    check_n(n)?;
    let h = t_end / n as f64;
    let a = ivp_second_difference(n, h);
    let nodes: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
    let mut rhs: Vec<f64> = nodes.iter().map(|&t| arctan_source(t)).collect();
    rhs[0] += x0 / (h * h);
    rhs[1] -= x0 / (h * h);
    let (af, aj) = (Arc::new(a.clone()), Arc::new(a.clone()));
    let p = NaveProblem::new(format!("ode-arctan:h={h}:T={t_end}:x0={x0}"), n, move |x| {
        af.matvec(x).iter().zip(x).map(|(ax, xi)| ax + xi.atan()).collect()
    })
    .with_jacobian(move |x| {
        let mut j = (*aj).clone();
        for (i, xi) in x.iter().enumerate() {
            j[(i, i)] += 1.0 / (1.0 + xi * xi);
        }
        j
    })
    .with_rhs(rhs.clone())?;
    let exact: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>> =
        (x0 == 1.0).then(|| Arc::new(arctan_exact) as Arc<dyn Fn(f64) -> f64 + Send + Sync>);
    let disc = OdeDiscretization {
        mesh_h: h,
        n_steps: n,
        a,
        b: None,
        rhs,
        nodes,
        exact,
        boundary: Boundary::Ivp { x0 },
    };
    Ok((disc, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nave::nave_residual;

    #[test]
    fn exact_solution_values() {
        assert_eq!(stiff_exact(0.0, -1.0), -1.0);
        assert_eq!(stiff_exact(0.0, -2.5), -2.5);
        assert!((stiff_exact(1.0, -1.0) + 1000.0 / 999.0 * (-1f64).exp()).abs() < 1e-15);
        assert!((stiff_exact(1.0, -1.0) + 0.36824769).abs() < 1e-8);
        assert_eq!(arctan_exact(0.0), 1.0);
        assert!((arctan_exact(1.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn stiff_matrices_have_printed_band() {
        let (disc, _) = make_stiff_ivp(-1.0, 1.0, 5).unwrap();
        let h2 = disc.mesh_h * disc.mesh_h;
        assert_eq!(disc.a[(0, 0)] * h2, 1.0);
        assert!((disc.a[(1, 0)] * h2 + 2.0).abs() < 1e-12);
        assert!((disc.a[(4, 2)] * h2 - 1.0).abs() < 1e-12);
        assert_eq!(disc.a[(0, 1)], 0.0);
        let b = disc.b.unwrap().scaled(2.0 * disc.mesh_h);
        assert!((b[(0, 1)] - 1.0).abs() < 1e-12);
        assert_eq!(b[(0, 0)], 0.0);
        assert!((b[(2, 1)] + 1.0).abs() < 1e-12);
        assert!((b[(2, 3)] - 1.0).abs() < 1e-12);
        assert!((b[(4, 2)] - 1.0).abs() < 1e-12);
        assert!((b[(4, 3)] + 4.0).abs() < 1e-12);
        assert!((b[(4, 4)] - 3.0).abs() < 1e-12);
        assert!(disc.rhs[2..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mesh_guards() {
        assert!(make_stiff_ivp(-1.0, 1.0, 2).is_err());
        assert!(make_stiff_ivp(1.0, 1.0, 10).is_err());
        assert_eq!(steps_for(0.05, 5.0).unwrap(), 100);
        assert_eq!(steps_for(0.0125, 1.0).unwrap(), 80);
        assert!(steps_for(0.3, 1.0).is_err());
    }

    #[test]
    fn smallest_bvp_has_two_unknowns() {
        let (disc, p) = make_stiff_bvp_manufactured(-1.0, 2.0, 3).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(disc.nodes.len(), 2);
        assert!(disc.exact.is_some());
        let (disc, _) = make_stiff_bvp(-1.0, 0.0, 2.0, 3).unwrap();
        assert!(disc.exact.is_none());
    }

    #[test]
    fn manufactured_residuals_shrink_with_h() {
        // the first IVP row folds in x₋₁ = x₀ and keeps an O(1) truncation error
        let res = |n: usize| {
            let (disc, p) = make_arctan_ivp(1.0, 1.0, n).unwrap();
            let x = disc.exact_on_mesh().unwrap();
            norm_inf(&nave_residual(&p, &x).unwrap()[1..])
        };
        assert!(res(80) < res(40));
        let res = |n: usize| {
            let (disc, p) = make_stiff_bvp_manufactured(-1.0, 2.0, n).unwrap();
            let x = disc.exact_on_mesh().unwrap();
            norm_inf(&nave_residual(&p, &x).unwrap()[1..])
        };
        assert!(res(160) < res(80));
    }
}
