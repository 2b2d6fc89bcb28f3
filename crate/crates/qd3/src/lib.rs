//! Numerical workbench for the q-deformed D₃⁽¹⁾ vertex model with open
//! (non-diagonal) boundaries.
//!
//! The crate builds every algebraic object of the model from closed-form
//! entries — vector, fused and spinorial R-matrices, boundary K-matrices and
//! their duals, fusion projectors, similarity transforms — assembles
//! monodromies and (fused) transfer matrices on small chains, and checks the
//! full catalog of Yang–Baxter, reflection, crossing and fusion identities at
//! machine precision. A spectral layer diagonalizes the commuting transfer
//! family, validates the eigenvalue functional relations, and cross-checks the
//! spectrum against inhomogeneous T-Q relations and their Bethe equations.
//!
//! Module map:
//! - [`params`] — model parameters, validation, JSON config.
//! - [`la`] — dense complex tensor-leg toolkit.
//! - [`local_ops`] — every local matrix, projector and transform.
//! - [`chain`] — monodromies, transfer matrices, Hamiltonian.
//! - [`verify`] — the identity catalog producing residual records.
//! - [`spectra`] — diagonalization, T-Q relations, Bethe equations, energies.
//! - [`cli`] — the JSON-in/JSON-out command-line front end.

#![warn(missing_docs)]
// Threshold tests are written `!(x < tol)` on purpose: a NaN residual must
// count as a failure, which `x >= tol` would silently let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod cli;
pub mod la;
pub mod local_ops;
pub mod params;
pub mod spectra;
pub mod verify;

pub use num_complex::Complex64 as C64;

/// Errors raised by constructors, solvers and the command-line layer.
///
/// Identity-check failures are never errors: they are reported as data in
/// [`verify::ResidualRecord`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A division by an exactly (or numerically) vanishing quantity.
    #[error("zero divisor: {0}")]
    ZeroDivisor(String),
    /// Random sampling could not avoid the exclusion set.
    #[error("exhausted {0} retries while sampling a generic point")]
    ExhaustedRetries(usize),
    /// Tensor factor dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// The same tensor slot was named twice.
    #[error("duplicate slot {0}")]
    DuplicateSlot(usize),
    /// A tensor slot index is out of range.
    #[error("slot {slot} out of range for a layout with {legs} legs")]
    BadSlot {
        /// Offending slot.
        slot: usize,
        /// Number of legs in the layout.
        legs: usize,
    },
    /// Members of a family expected to commute do not.
    #[error("family does not commute (relative commutator {0:.3e})")]
    NotCommuting(f64),
    /// The eigenbasis of a commuting family is too ill-conditioned to use.
    #[error("ill-conditioned eigenbasis (condition number {0:.3e})")]
    IllConditionedBasis(f64),
    /// A square root met a negative real argument.
    #[error("branch cut: {0}")]
    BranchCut(String),
    /// A matrix expected to be invertible is numerically singular.
    #[error("singular matrix: {0}")]
    Singular(String),
    /// The transfer matrix at the regular point is numerically singular.
    #[error("transfer matrix at u=0 is singular (condition {0:.3e})")]
    SingularT0(f64),
    /// Evaluation point sits on a pole of a Q-function ratio.
    #[error("evaluation too close to a pole: {0}")]
    NearPole(String),
    /// Two Bethe roots coincide.
    #[error("coincident Bethe roots: {0}")]
    CoincidentRoots(String),
    /// Bethe root counts violate L₁ = L₂ + L₃ + N or the admissible range.
    #[error("root counting rule violated: {0}")]
    CountingRule(String),
    /// Parameters failed validation; every violation is listed.
    #[error("invalid parameters: {}", .0.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join("; "))]
    InvalidParams(Vec<params::Violation>),
    /// Malformed configuration or unsupported request.
    #[error("configuration error: {0}")]
    Config(String),
    /// A numerical decomposition failed to converge.
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    /// I/O failure in the command-line layer.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
