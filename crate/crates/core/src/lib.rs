//! Smoothing Newton methods for nonlinear absolute value equations
//! `F(x) - |x| = b`, together with P₀ diagnostics, baseline solvers, test
//! problem generators and an experiment harness.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod nave;
pub mod problems;
pub mod pstructure;
pub mod rng;
pub mod smoothing;
pub mod solver;

pub use error::{NaveError, Result};
pub use linalg::DenseMatrix;
pub use nave::{merge, nave_error, nave_residual, split, NaveProblem, SplitPair};
pub use smoothing::{family_by_name, LogCounterexample, SmoothingFamily, Theta1, Theta2};
pub use solver::{newton_armijo_solve, AugmentedState, InitialPoint, SolveReport, SolveStatus, SolverConfig};
