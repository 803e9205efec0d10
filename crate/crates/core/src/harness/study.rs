use super::{run_method, Method, RunParams};
use crate::error::{NaveError, Result};
use crate::linalg::DenseMatrix;
use crate::problems::{make_sparse_heuristic, OdeKind, SparseSign};
use crate::solver::{SolveReport, SolveStatus};

/// Mesh errors of an ODE discretization over a sequence of step sizes.
#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub kind: OdeKind,
    pub method: Method,
    /// `(h, ‖x - x*‖_∞)` in the order of the input list.
    pub points: Vec<(f64, f64)>,
    pub iterations: Vec<usize>,
    /// Least-squares slope of `log error` against `log h`.
    pub slope: f64,
}

impl ConvergenceStudy {
    pub fn plot_rows(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|&(h, e)| vec![h, e]).collect()
    }
}

/// Slope of the least-squares line through `(ln h, ln e)`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(NaveError::InvalidInput("slope needs at least two points".into()));
    }
    if points.iter().any(|&(h, e)| !(h > 0.0) || !(e > 0.0)) {
        return Err(NaveError::InvalidInput("slope needs positive step sizes and errors".into()));
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|&(h, e)| (h.ln(), e.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(NaveError::InvalidInput("step sizes must not all coincide".into()));
    }
    Ok(sxy / sxx)
}

/// Solves the discretization for every `h` and fits the observed order.
/// Needs at least three strictly decreasing step sizes; a solve that does
/// not converge aborts the study.
pub fn convergence_study(
    kind: OdeKind,
    t_end: f64,
    x0: f64,
    h_list: &[f64],
    method: Method,
    params: RunParams,
) -> Result<ConvergenceStudy> {
    if h_list.len() < 3 {
        return Err(NaveError::ConfigError(format!(
            "convergence study needs at least 3 step sizes, got {}",
            h_list.len()
        )));
    }
    if h_list.iter().any(|&h| !(h > 0.0)) || h_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(NaveError::ConfigError("step sizes must be positive and strictly decreasing".into()));
    }
    let mut points = Vec::with_capacity(h_list.len());
    let mut iterations = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let (disc, p) = kind.build(h, t_end, x0)?;
        let rep = run_method(&p, method, params)?;
        if rep.status != SolveStatus::Converged {
            return Err(NaveError::NumericalFailure(format!(
                "{} did not converge at h = {h}: {} after {} iterations",
                kind.as_str(),
                rep.status.as_str(),
                rep.iterations
            )));
        }
        points.push((h, disc.error_inf(&rep.x_final)?));
        iterations.push(rep.iterations);
    }
    let slope = least_squares_slope(&points)?;
    Ok(ConvergenceStudy {
        kind,
        method,
        points,
        iterations,
        slope,
    })
}

/// Coefficients of the ℓ₁ heuristic along a path of penalties.
#[derive(Debug, Clone)]
pub struct SparsePath {
    pub lambdas: Vec<f64>,
    pub coefs: Vec<Vec<f64>>,
    pub reports: Vec<SolveReport>,
}

impl SparsePath {
    pub fn header(&self) -> Vec<String> {
        let d = self.coefs.first().map_or(0, Vec::len);
        std::iter::once("lambda".to_string())
            .chain((1..=d).map(|j| format!("coef_{j}")))
            .collect()
    }

    pub fn plot_rows(&self) -> Vec<Vec<f64>> {
        self.lambdas
            .iter()
            .zip(&self.coefs)
            .map(|(&l, c)| std::iter::once(l).chain(c.iter().copied()).collect())
            .collect()
    }
}

/// Solves the sparse heuristic for every `λ`, each from the default start.
pub fn sparse_path(
    a: &DenseMatrix,
    b: &[f64],
    lambdas: &[f64],
    sign: SparseSign,
    method: Method,
    params: RunParams,
) -> Result<SparsePath> {
    let mut coefs = Vec::with_capacity(lambdas.len());
    let mut reports = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let p = make_sparse_heuristic(a, b, lam, sign)?;
        let rep = run_method(&p, method, params)?;
        coefs.push(rep.x_final.clone());
        reports.push(rep);
    }
    Ok(SparsePath {
        lambdas: lambdas.to_vec(),
        coefs,
        reports,
    })
}
