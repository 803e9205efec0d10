//! Problem type for `F(x) - |x| = b` and the positive/negative splitting of
//! its unknown.

use std::fmt;
use std::sync::Arc;

use crate::error::{NaveError, Result};
use crate::linalg::{norm2, DenseMatrix};

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-6;

pub type VectorMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type JacobianMap = Arc<dyn Fn(&[f64]) -> DenseMatrix + Send + Sync>;

/// A nonlinear absolute value equation `F(x) - |x| = b`.
///
/// `rhs` is kept separate from `F` so reported errors are always
/// `‖F(x) - |x| - b‖₂`.
#[derive(Clone)]
pub struct NaveProblem {
    dim: usize,
    f: VectorMap,
    jac: Option<JacobianMap>,
    rhs: Vec<f64>,
    label: String,
}

impl NaveProblem {
    pub fn new(
        label: impl Into<String>,
        dim: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        NaveProblem {
            dim,
            f: Arc::new(f),
            jac: None,
            rhs: vec![0.0; dim],
            label: label.into(),
        }
    }

    /// `F(x) = A x`, with its constant Jacobian.
    pub fn linear(label: impl Into<String>, a: DenseMatrix) -> Self {
        assert!(a.is_square(), "linear NAVE needs a square matrix");
        let dim = a.rows();
        let a = Arc::new(a);
        let a2 = Arc::clone(&a);
        NaveProblem::new(label, dim, move |x| a.matvec(x)).with_jacobian(move |_| (*a2).clone())
    }

    pub fn with_jacobian(
        mut self,
        jac: impl Fn(&[f64]) -> DenseMatrix + Send + Sync + 'static,
    ) -> Self {
        self.jac = Some(Arc::new(jac));
        self
    }

    pub fn with_rhs(mut self, rhs: Vec<f64>) -> Result<Self> {
        if rhs.len() != self.dim {
            return Err(NaveError::InvalidInput(format!(
                "rhs has length {}, problem dimension is {}",
                rhs.len(),
                self.dim
            )));
        }
        ensure_finite(&rhs, "rhs")?;
        self.rhs = rhs;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jac.is_some()
    }

    /// Evaluates `F(x)`, checking the output dimension and finiteness.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let fx = (self.f)(x);
        if fx.len() != self.dim {
            return Err(NaveError::EvaluationFailure(format!(
                "{}: F returned {} values, expected {}",
                self.label,
                fx.len(),
                self.dim
            )));
        }
        if fx.iter().any(|v| !v.is_finite()) {
            return Err(NaveError::EvaluationFailure(format!(
                "{}: F produced a non-finite value",
                self.label
            )));
        }
        Ok(fx)
    }

    /// `∇F(x)`: analytic when available, central differences otherwise.
    pub fn jacobian(&self, x: &[f64]) -> Result<DenseMatrix> {
        match &self.jac {
            Some(jac) => {
                self.check_dim(x)?;
                let j = jac(x);
                if j.rows() != self.dim || j.cols() != self.dim {
                    return Err(NaveError::EvaluationFailure(format!(
                        "{}: Jacobian is {}x{}, expected {}x{}",
                        self.label,
                        j.rows(),
                        j.cols(),
                        self.dim,
                        self.dim
                    )));
                }
                if !j.is_finite() {
                    return Err(NaveError::EvaluationFailure(format!(
                        "{}: non-finite Jacobian entry",
                        self.label
                    )));
                }
                Ok(j)
            }
            None => fd_jacobian(self, x, FD_STEP),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(NaveError::InvalidInput(format!(
                "{}: point has dimension {}, expected {}",
                self.label,
                x.len(),
                self.dim
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for NaveProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NaveProblem")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("analytic_jacobian", &self.jac.is_some())
            .field("rhs", &self.rhs)
            .finish()
    }
}

/// `x = y - z` with `y, z ≥ 0` and `yⁱ zⁱ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPair {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

pub fn split(x: &[f64]) -> Result<SplitPair> {
    ensure_finite(x, "x")?;
    Ok(SplitPair {
        y: x.iter().map(|&v| v.max(0.0)).collect(),
        z: x.iter().map(|&v| (-v).max(0.0)).collect(),
    })
}

pub fn merge(p: &SplitPair) -> Result<Vec<f64>> {
    if p.y.len() != p.z.len() {
        return Err(NaveError::InvalidInput(format!(
            "split pair dimensions differ: {} vs {}",
            p.y.len(),
            p.z.len()
        )));
    }
    Ok(p.y.iter().zip(&p.z).map(|(y, z)| y - z).collect())
}

/// `F(x) - |x| - b`.
pub fn nave_residual(p: &NaveProblem, x: &[f64]) -> Result<Vec<f64>> {
    let fx = p.eval(x)?;
    Ok(fx
        .iter()
        .zip(x)
        .zip(p.rhs())
        .map(|((f, xi), b)| f - xi.abs() - b)
        .collect())
}

/// `‖F(x) - |x| - b‖₂`; non-finite when `F` cannot be evaluated at `x`.
pub fn nave_error(p: &NaveProblem, x: &[f64]) -> f64 {
    match nave_residual(p, x) {
        Ok(r) => norm2(&r),
        Err(_) => f64::NAN,
    }
}

/// Central-difference Jacobian of `F`, one column per coordinate.
pub fn fd_jacobian(p: &NaveProblem, x: &[f64], h: f64) -> Result<DenseMatrix> {
    if !(h > 0.0) {
        return Err(NaveError::InvalidInput(format!("step must be positive, got {h}")));
    }
    let d = p.dim();
    if x.len() != d {
        return Err(NaveError::InvalidInput(format!(
            "point has dimension {}, expected {d}",
            x.len()
        )));
    }
    let mut jac = DenseMatrix::zeros(d, d);
    let mut xp = x.to_vec();
    for j in 0..d {
        let orig = xp[j];
        xp[j] = orig + h;
        let fp = p.eval(&xp)?;
        xp[j] = orig - h;
        let fm = p.eval(&xp)?;
        xp[j] = orig;
        for i in 0..d {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

pub(crate) fn ensure_finite(v: &[f64], what: &str) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(NaveError::InvalidInput(format!(
            "{what}[{i}] is not finite"
        ))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn split_examples() {
        let p = split(&[2.0, -3.0]).unwrap();
        assert_eq!(p.y, vec![2.0, 0.0]);
        assert_eq!(p.z, vec![0.0, 3.0]);
        let p = split(&[0.0, 0.0]).unwrap();
        assert_eq!(p.y, vec![0.0, 0.0]);
        assert_eq!(p.z, vec![0.0, 0.0]);
        let p = split(&[1.5, -0.25, 0.0]).unwrap();
        assert_eq!(p.y, vec![1.5, 0.0, 0.0]);
        assert_eq!(p.z, vec![0.0, 0.25, 0.0]);
    }

    #[test]
    fn split_rejects_nan() {
        assert!(matches!(split(&[1.0, f64::NAN]), Err(NaveError::InvalidInput(_))));
        assert!(split(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn merge_examples() {
        let m = |y: &[f64], z: &[f64]| {
            merge(&SplitPair {
                y: y.to_vec(),
                z: z.to_vec(),
            })
            .unwrap()
        };
        assert_eq!(m(&[2.0, 0.0], &[0.0, 3.0]), vec![2.0, -3.0]);
        assert_eq!(m(&[1.0, 1.0], &[1.0, 1.0]), vec![0.0, 0.0]);
        assert_eq!(m(&[5.0, 0.0, 2.0], &[0.0, 4.0, 2.0]), vec![5.0, -4.0, 0.0]);
        let bad = SplitPair {
            y: vec![1.0],
            z: vec![1.0, 2.0],
        };
        assert!(merge(&bad).is_err());
    }

    #[test]
    fn residual_of_identity_at_origin_vanishes() {
        let p = NaveProblem::new("id", 4, |x| x.to_vec());
        assert_eq!(nave_residual(&p, &[0.0; 4]).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn residual_reports_bad_map() {
        let short = NaveProblem::new("short", 2, |_| vec![1.0]);
        assert!(matches!(
            nave_residual(&short, &[0.0, 0.0]),
            Err(NaveError::EvaluationFailure(_))
        ));
        let nan = NaveProblem::new("nan", 1, |_| vec![f64::NAN]);
        assert!(matches!(
            nave_residual(&nan, &[0.0]),
            Err(NaveError::EvaluationFailure(_))
        ));
    }

    #[test]
    fn fd_jacobian_of_linear_map() {
        let a = DenseMatrix::from_rows(&[
            vec![4.0, -1.0, 0.5],
            vec![-1.0, 4.0, -1.0],
            vec![2.0, -1.0, 4.0],
        ])
        .unwrap();
        let p = NaveProblem::new("lin", 3, {
            let a = a.clone();
            move |x| a.matvec(x)
        });
        let j = fd_jacobian(&p, &[0.3, -1.2, 2.0], 1e-6).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                assert!((j[(i, k)] - a[(i, k)]).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn fd_jacobian_of_square_map() {
        let d = 3;
        let p = NaveProblem::new("sq", d, |x| x.iter().map(|v| v * v).collect());
        let j = fd_jacobian(&p, &[1.0; 3], 1e-5).unwrap();
        for i in 0..d {
            assert!((j[(i, i)] - 2.0).abs() <= 1e-8);
        }
        assert!(fd_jacobian(&p, &[1.0; 3], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn merge_split_round_trip(x in prop::collection::vec(-1e6f64..1e6, 1..20)) {
            let p = split(&x).unwrap();
            prop_assert_eq!(merge(&p).unwrap(), x.clone());
            for i in 0..x.len() {
                prop_assert_eq!(p.y[i] * p.z[i], 0.0);
                prop_assert_eq!(p.y[i] + p.z[i], x[i].abs());
            }
        }
    }
}
