//! Regression problems whose optimality conditions are NAVEs: asymmetric
//! ridge regression and the ℓ₁ heuristic, both with the least-squares loss
//! `L(x) = ½‖Ax - b‖²`.

use std::sync::Arc;

use crate::error::{NaveError, Result};
use crate::linalg::DenseMatrix;
use crate::nave::NaveProblem;
use crate::pstructure::{precondition_report, PreconditionReport};
use crate::rng;

/// `∇L(x) = Aᵀ(Ax - b)`.
pub fn least_squares_gradient(a: &DenseMatrix, b: &[f64], x: &[f64]) -> Vec<f64> {
    let mut r = a.matvec(x);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri -= bi;
    }
    a.tr_matvec(&r)
}

/// `min L(x) + Σ λⱼ max(xʲ, 0)² + μⱼ max(-xʲ, 0)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeSpec {
    pub design: DenseMatrix,
    pub target: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

impl RidgeSpec {
    /// Uniform design and target on `[-5, 5]`, shared `λ̄`, `μ̄`.
    pub fn random(m: usize, d: usize, lambda: f64, mu: f64, seed: u64) -> Self {
        let mut g = rng::seeded(seed);
        let data = rng::uniform_vec(&mut g, m * d, -5.0, 5.0);
        let target = rng::uniform_vec(&mut g, m, -5.0, 5.0);
        RidgeSpec {
            design: DenseMatrix::from_row_major(m, d, data).expect("m*d entries"),
            target,
            lambda: vec![lambda; d],
            mu: vec![mu; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.design.cols()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if self.target.len() != self.design.rows() {
            return Err(NaveError::InvalidSpec(format!(
                "target has length {}, design has {} rows",
                self.target.len(),
                self.design.rows()
            )));
        }
        if self.lambda.len() != d || self.mu.len() != d {
            return Err(NaveError::InvalidSpec(format!(
                "penalty vectors must have length {d}"
            )));
        }
        if let Some(j) = (0..d).find(|&j| self.lambda[j] == self.mu[j]) {
            return Err(NaveError::InvalidSpec(format!(
                "lambda and mu coincide at coordinate {j}"
            )));
        }
        if self.lambda.iter().chain(&self.mu).any(|&v| !(v >= 0.0)) {
            return Err(NaveError::InvalidSpec("penalties must be nonnegative".into()));
        }
        Ok(())
    }

    /// `∇L(x) + 2λ max(x, 0) - 2μ max(-x, 0)`, zero at a stationary point.
    pub fn stationarity(&self, x: &[f64]) -> Vec<f64> {
        let g = least_squares_gradient(&self.design, &self.target, x);
        (0..self.dim())
            .map(|j| g[j] + 2.0 * self.lambda[j] * x[j].max(0.0) - 2.0 * self.mu[j] * (-x[j]).max(0.0))
            .collect()
    }
}

/// `F(x)ʲ = ((∇L(x))ʲ + (μⱼ + λⱼ) xʲ) / (μⱼ - λⱼ)`, with `b = 0`.
pub fn make_ridge(spec: &RidgeSpec) -> Result<NaveProblem> {
    spec.validate()?;
    let d = spec.dim();
    let scale: Vec<f64> = (0..d).map(|j| 1.0 / (spec.mu[j] - spec.lambda[j])).collect();
    let shift: Vec<f64> = (0..d).map(|j| spec.mu[j] + spec.lambda[j]).collect();
    let gram = spec.design.transpose().matmul(&spec.design);
    let jac = DenseMatrix::from_fn(d, d, |i, j| {
        let e = if i == j { shift[i] } else { 0.0 };
        scale[i] * (gram[(i, j)] + e)
    });
    let s = Arc::new(spec.clone());
    let label = format!("ridge:m={}:d={d}", spec.design.rows());
    Ok(NaveProblem::new(label, d, move |x| {
        let g = least_squares_gradient(&s.design, &s.target, x);
        (0..x.len()).map(|j| scale[j] * (g[j] + shift[j] * x[j])).collect()
    })
    .with_jacobian(move |_| jac.clone()))
}

/// Sampled P₀ checks of `∇F - I` and `-∇F - I` on `[-5, 5]ᵈ`.
pub fn ridge_precondition(p: &NaveProblem, seed: u64) -> Result<PreconditionReport> {
    precondition_report(p, (-5.0, 5.0), 4, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparseSign {
    /// `F = -(1/λ) x∘∇L`, so `F(x) - |x| = 0` is `x∘∇L + λ|x| = 0`.
    Negative,
    /// `F = (1/λ) x∘∇L`.
    Positive,
}

/// Random least-squares data for the ℓ₁ experiments: `A` uniform on
/// `[-1, 1]`, `b` uniform on `[-0.05, 0]`.
pub fn sparse_random_data(m: usize, d: usize, seed: u64) -> (DenseMatrix, Vec<f64>) {
    let mut g = rng::seeded(seed);
    let data = rng::uniform_vec(&mut g, m * d, -1.0, 1.0);
    let b = rng::uniform_vec(&mut g, m, -0.05, 0.0);
    (DenseMatrix::from_row_major(m, d, data).expect("m*d entries"), b)
}

pub fn make_sparse_heuristic(
    a: &DenseMatrix,
    b: &[f64],
    lambda: f64,
    sign: SparseSign,
) -> Result<NaveProblem> {
    if !(lambda > 0.0) {
        return Err(NaveError::InvalidSpec(format!("lambda must be positive, got {lambda}")));
    }
    if a.rows() != b.len() {
        return Err(NaveError::InvalidSpec(format!(
            "A has {} rows, b has length {}",
            a.rows(),
            b.len()
        )));
    }
    let d = a.cols();
    let c = match sign {
        SparseSign::Negative => -1.0 / lambda,
        SparseSign::Positive => 1.0 / lambda,
    };
    let data = Arc::new((a.clone(), b.to_vec()));
    let data2 = Arc::clone(&data);
    let gram = a.transpose().matmul(a);
    Ok(NaveProblem::new(format!("sparse:lam={lambda}"), d, move |x| {
        let g = least_squares_gradient(&data.0, &data.1, x);
        x.iter().zip(&g).map(|(xi, gi)| c * xi * gi).collect()
    })
    .with_jacobian(move |x| {
        let g = least_squares_gradient(&data2.0, &data2.1, x);
        DenseMatrix::from_fn(d, d, |i, j| {
            let diag = if i == j { g[i] } else { 0.0 };
            c * (diag + x[i] * gram[(i, j)])
        })
    }))
}
