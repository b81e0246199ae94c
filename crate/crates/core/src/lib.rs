//! SDP bounds on PPT-assisted distillable entanglement and entanglement cost.
//!
//! The crate compiles each bound into a block linear-matrix-inequality problem,
//! solves it with a dense primal-dual interior-point method, and cross-checks
//! the optimum against explicit feasible witnesses built from closed forms.

pub mod error;
pub mod app;
pub mod certificates;
pub mod linalg;
pub mod measures;
pub mod par;
pub mod sdp;
pub mod states;

pub use error::{Error, Result};
