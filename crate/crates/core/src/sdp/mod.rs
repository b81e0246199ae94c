//! Dense primal-dual interior-point solver for block LMIs.

mod dense;
mod problem;
mod solver;
mod verify;

pub use dense::{cholesky_blocked, cholesky_solve, Cholesky, RealMatrix, SymmetricEigen};
pub use problem::{realify_hermitian, LmiBlock, LmiProblem, SparseSym};
pub use solver::{solve, SdpSolution, SdpStatus, SolverOptions};
pub use verify::{verify_point, verify_solution, FeasibilityReport};
