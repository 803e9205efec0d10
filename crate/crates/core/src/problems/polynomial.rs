//! Small polynomial NAVE instances in three and four unknowns.

use crate::error::{NaveError, Result};
use crate::linalg::DenseMatrix;
use crate::nave::NaveProblem;

pub const R3_RHS: [(&str, [f64; 3]); 3] = [
    ("b1", [-1.0, -5.0, 10.0]),
    ("b2", [9.0, -100.0, 10.0]),
    ("b3", [200.0, 0.0, 900.0]),
];

pub const R4_RHS: [(&str, [f64; 4]); 3] = [
    ("bstar1", [10.0, 10.0, -12.0, 0.0]),
    ("bstar2", [20.0, -100.0, -12.0, 1.0]),
    ("bstar3", [200.0, 10.0, -5.0, -5.0]),
];

fn r3_map(x: &[f64]) -> Vec<f64> {
    vec![
        2.0 * x[0] - 2.0,
        2.0 * x[1] + x[1].powi(3) - x[2] + 3.0,
        x[1] + 2.0 * x[2] + 2.0 * x[2].powi(3) - 3.0,
    ]
}

fn r3_jacobian(x: &[f64]) -> DenseMatrix {
    DenseMatrix::from_row_major(
        3,
        3,
        vec![
            2.0, 0.0, 0.0, //
            0.0, 2.0 + 3.0 * x[1] * x[1], -1.0, //
            0.0, 1.0, 2.0 + 6.0 * x[2] * x[2],
        ],
    )
    .expect("3x3 layout")
}

fn r4_map(x: &[f64]) -> Vec<f64> {
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    vec![
        3.0 * x1 * x1 + x1 + 2.0 * x1 * x2 + 2.0 * x2 * x2 + x3 + 3.0 * x4,
        2.0 * x1 * x1 + x1 + x2 * x2 + x2 + 10.0 * x3 + 2.0 * x4,
        3.0 * x1 * x1 + x1 * x2 + 2.0 * x2 * x2 + 3.0 * x3 + 9.0 * x4,
        x1 * x1 + 3.0 * x2 * x2 + 2.0 * x3 + 4.0 * x4,
    ]
}

fn r4_jacobian(x: &[f64]) -> DenseMatrix {
    let (x1, x2) = (x[0], x[1]);
    DenseMatrix::from_row_major(
        4,
        4,
        vec![
            6.0 * x1 + 1.0 + 2.0 * x2, 2.0 * x1 + 4.0 * x2, 1.0, 3.0, //
            4.0 * x1 + 1.0, 2.0 * x2 + 1.0, 10.0, 2.0, //
            6.0 * x1 + x2, x1 + 4.0 * x2, 3.0, 9.0, //
            2.0 * x1, 6.0 * x2, 2.0, 4.0,
        ],
    )
    .expect("4x4 layout")
}

/// The cubic map in three unknowns, with zero right-hand side.
pub fn make_example_r3() -> NaveProblem {
    NaveProblem::new("r3", 3, r3_map).with_jacobian(r3_jacobian)
}

/// The quadratic map in four unknowns, with zero right-hand side.
pub fn make_example_r4() -> NaveProblem {
    NaveProblem::new("r4", 4, r4_map).with_jacobian(r4_jacobian)
}

/// `r3` paired with one of `b1`, `b2`, `b3`.
pub fn r3_with(name: &str) -> Result<NaveProblem> {
    let (_, b) = R3_RHS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| NaveError::InvalidSpec(format!("unknown r3 right-hand side '{name}'")))?;
    Ok(make_example_r3().with_rhs(b.to_vec())?.with_label(format!("r3:{name}")))
}

/// `r4` paired with one of `bstar1`, `bstar2`, `bstar3`.
pub fn r4_with(name: &str) -> Result<NaveProblem> {
    let (_, b) = R4_RHS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| NaveError::InvalidSpec(format!("unknown r4 right-hand side '{name}'")))?;
    Ok(make_example_r4().with_rhs(b.to_vec())?.with_label(format!("r4:{name}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nave::fd_jacobian;

    #[test]
    fn constant_terms() {
        assert_eq!(make_example_r3().eval(&[0.0; 3]).unwrap(), vec![-2.0, 3.0, -3.0]);
        assert_eq!(make_example_r4().eval(&[0.0; 4]).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn analytic_jacobians_match_differences() {
        let cases: [(NaveProblem, Vec<f64>); 3] = [
            (make_example_r3(), vec![0.0, 1.0, 1.0]),
            (make_example_r3(), vec![-1.3, 0.4, 2.2]),
            (make_example_r4(), vec![0.5, -1.5, 2.0, 0.3]),
        ];
        for (p, x) in cases {
            let a = p.jacobian(&x).unwrap();
            let f = fd_jacobian(&p, &x, 1e-6).unwrap();
            for i in 0..p.dim() {
                for j in 0..p.dim() {
                    assert!((a[(i, j)] - f[(i, j)]).abs() <= 1e-6 * a[(i, j)].abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn named_right_hand_sides() {
        assert_eq!(r3_with("b2").unwrap().rhs(), &[9.0, -100.0, 10.0]);
        assert_eq!(r4_with("bstar3").unwrap().rhs(), &[200.0, 10.0, -5.0, -5.0]);
        assert_eq!(r4_with("bstar1").unwrap().label(), "r4:bstar1");
        assert!(r3_with("b7").is_err());
    }
}
