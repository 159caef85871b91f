//! Shared numerical tolerances.
//!
//! Every check in this crate is an exact identity up to floating-point error,
//! so these only absorb rounding.

/// Max entry deviation between a matrix and its adjoint.
pub const HERM: f64 = 1e-10;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD: f64 = -1e-9;
/// Allowed deviation of a state's trace from one.
pub const TRACE: f64 = 1e-10;
/// Slack for analytic identity assertions.
pub const EQ: f64 = 1e-9;
/// Allowed deviation of a pure state's norm from one.
pub const NORM: f64 = 1e-10;
/// Eigenvalues above this count towards a state's support.
pub const SUPPORT: f64 = 1e-9;
/// Unitarity tolerance for gates.
pub const UNITARY: f64 = 1e-10;
/// Completeness tolerance for Kraus lists and POVMs.
pub const COMPLETENESS: f64 = 1e-9;
