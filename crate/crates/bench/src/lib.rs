//! Benchmark fixtures shared by the criterion targets.

use nave_core::problems::resolve;
use nave_core::NaveProblem;

/// Builds a catalog problem, panicking on a bad identifier.
pub fn problem(id: &str) -> NaveProblem {
    resolve(id).unwrap_or_else(|e| panic!("{id}: {e}")).problem
}
