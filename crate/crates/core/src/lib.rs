//! Numerical toolkit for generator-based dynamic-memory fractional calculus.
//!
//! Memory kernels are produced from a Laplace-domain generator `Φ(p, Θ)` as
//! `Ψ_α = L⁻¹{Φ^(-α)}`. On top of the kernels the crate provides fractional
//! integral and derivative operators on uniformly sampled functions,
//! generalized Mittag-Leffler evaluation, a predictor-corrector solver for the
//! nonlinear memory Langevin system, and a verification harness that checks
//! the operator identities numerically.

pub mod error;
pub mod expr;
pub mod gridfn;
pub mod kernel;
pub mod langevin;
pub mod laplace;
pub mod ml;
pub mod operators;
pub mod report;
pub mod verify;

pub use error::Error;
pub use expr::{GeneratorExpr, GeneratorPreset, ParamSet};
pub use gridfn::GridFunction;
pub use kernel::{Kernel, KernelStrategy};
pub use laplace::{Grid, InversionConfig, InversionMethod};
pub use report::{Check, VerificationReport};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Number of worker threads requested through `DYNMEM_THREADS`.
///
/// `Some(0)` and `Some(1)` mean strictly sequential execution; `None` leaves
/// the rayon default in place.
pub fn configured_threads() -> Option<usize> {
    std::env::var("DYNMEM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
}

pub(crate) fn sequential() -> bool {
    matches!(configured_threads(), Some(0) | Some(1))
}
