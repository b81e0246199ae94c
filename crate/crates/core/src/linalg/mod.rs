//! Dense complex linear algebra for bipartite operators.

mod bipartite;
mod eigen;
mod matrix;
mod state;

pub use bipartite::{kron, op_norm, partial_transpose, trace_norm, BipartiteOperator};
pub use eigen::{eig_hermitian, eig_hermitian_with_tol, eigvals_hermitian, HermitianEigen};
pub use matrix::{inner, vec_norm, ComplexMatrix, C64};
pub use state::{
    pinch, relative_entropy, support_projector, DensityMatrix, StateTolerances, SupportProjector,
    DEFAULT_SUPPORT_CUTOFF, SUPPORT_INCLUSION_TOL,
};
