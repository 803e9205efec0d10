//! Linear AVE instances `Ax - |x| = b` and their LCP reformulations.

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{NaveError, Result};
use crate::linalg::{dot, DenseMatrix};
use crate::nave::NaveProblem;
use crate::rng::{self, Rng};

/// `z = My + q` form of `Ax - |x| = b` for `x = y - z`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcpForm {
    pub m: DenseMatrix,
    pub q: Vec<f64>,
}

/// Both reformulations of a linear AVE.
///
/// `plus` needs `A + I` invertible and gives `z = My + q` with
/// `M = (A+I)⁻¹(A-I)`, `q = -(A+I)⁻¹b`. `minus` needs `A - I` invertible and
/// gives `y = M̃z + q̃` with `M̃ = (A-I)⁻¹(A+I)`, `q̃ = (A-I)⁻¹b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcpConversion {
    pub plus: Option<LcpForm>,
    pub minus: Option<LcpForm>,
}

const INVERTIBLE_TOL: f64 = 1e-12;

fn invertible_inverse(m: &DenseMatrix) -> Option<DenseMatrix> {
    let scale = m.hadamard_bound();
    if !(m.det().abs() > INVERTIBLE_TOL * scale) {
        return None;
    }
    m.inverse().ok()
}

pub fn ave_to_lcp(a: &DenseMatrix, b: &[f64]) -> Result<LcpConversion> {
    if !a.is_square() || a.rows() != b.len() {
        return Err(NaveError::InvalidInput(format!(
            "A is {}x{}, b has length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let d = a.rows();
    let id = DenseMatrix::identity(d);
    let a_plus = a.add_scaled(1.0, &id);
    let a_minus = a.add_scaled(-1.0, &id);
    let plus = invertible_inverse(&a_plus).map(|inv| LcpForm {
        m: inv.matmul(&a_minus),
        q: inv.matvec(b).into_iter().map(|v| -v).collect(),
    });
    let minus = invertible_inverse(&a_minus).map(|inv| LcpForm {
        m: inv.matmul(&a_plus),
        q: inv.matvec(b),
    });
    if plus.is_none() && minus.is_none() {
        return Err(NaveError::ConversionImpossible);
    }
    Ok(LcpConversion { plus, minus })
}

/// `tridiag(-1, 4, -1)` of order `d`.
pub fn tridiag_matrix(d: usize) -> DenseMatrix {
    DenseMatrix::from_fn(d, d, |i, j| match i.abs_diff(j) {
        0 => 4.0,
        1 => -1.0,
        _ => 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TridiagMode {
    /// `x*` uniform on `[-5, 5]ᵈ`, `b = Ax* - |x*|`.
    FromXStar { seed: u64 },
    /// `b` uniform on `[-5, 5]ᵈ`.
    RandomB { seed: u64 },
}

pub fn make_tridiag(d: usize, mode: TridiagMode) -> Result<NaveProblem> {
    if d < 2 {
        return Err(NaveError::InvalidSpec(format!("tridiag needs d >= 2, got {d}")));
    }
    match mode {
        TridiagMode::FromXStar { seed } => {
            let x_star = rng::uniform_vec(&mut rng::seeded(seed), d, -5.0, 5.0);
            make_tridiag_with_solution(&x_star)
        }
        TridiagMode::RandomB { seed } => {
            let b = rng::uniform_vec(&mut rng::seeded(seed), d, -5.0, 5.0);
            NaveProblem::linear(format!("tridiag:d={d}:mode=random:seed={seed}"), tridiag_matrix(d)).with_rhs(b)
        }
    }
}

/// Tridiagonal instance whose solution is the given `x*`.
pub fn make_tridiag_with_solution(x_star: &[f64]) -> Result<NaveProblem> {
    let d = x_star.len();
    if d < 2 {
        return Err(NaveError::InvalidSpec(format!("tridiag needs d >= 2, got {d}")));
    }
    let a = tridiag_matrix(d);
    let b: Vec<f64> = a
        .matvec(x_star)
        .iter()
        .zip(x_star)
        .map(|(ax, x)| ax - x.abs())
        .collect();
    NaveProblem::linear(format!("tridiag:d={d}:mode=xstar"), a).with_rhs(b)
}

/// Householder reflector `I - 2vvᵀ/‖v‖²` for a Gaussian `v`.
fn random_reflector(d: usize, rng: &mut Rng) -> DenseMatrix {
    let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let nn = dot(&v, &v);
    DenseMatrix::from_fn(d, d, |i, j| {
        let e = if i == j { 1.0 } else { 0.0 };
        e - 2.0 * v[i] * v[j] / nn
    })
}

/// `U diag(s) Vᵀ` with orthogonal `U`, `V` built from two reflectors each and
/// singular values uniform on `[σ_min, 2σ_min + 1]`.
pub fn random_sigma_min_matrix(d: usize, sigma_min: f64, rng: &mut Rng) -> DenseMatrix {
    let u = random_reflector(d, rng).matmul(&random_reflector(d, rng));
    let v = random_reflector(d, rng).matmul(&random_reflector(d, rng));
    let s: Vec<f64> = (0..d)
        .map(|_| rng.random_range(sigma_min..2.0 * sigma_min + 1.0))
        .collect();
    u.matmul(&DenseMatrix::from_diag(&s)).matmul(&v.transpose())
}
