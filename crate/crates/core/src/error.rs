use thiserror::Error;

/// Errors produced by the dynamic-memory toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("invalid parameter set: {0}")]
    InvalidParams(String),

    #[error("branch point: zero base raised to exponent {0}")]
    BranchPoint(f64),

    #[error("generator symbol has a pole: Φ(p,Θ) = 0 at p = {0}")]
    SymbolPole(num_complex::Complex64),

    #[error("invalid inversion config: {0}")]
    InvalidInversionConfig(String),

    #[error("inverse Laplace transform requires t > 0, got {0}")]
    NonPositiveTime(f64),

    #[error("inversion accumulated a non-finite value at t = {0}")]
    NonFiniteInversion(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("kernel is singular at t = 0; level-0 evaluation needs t > 0")]
    SingularAtOrigin,

    #[error("grid function: {0}")]
    GridFunction(String),

    #[error("sample at node {0} is undefined but required")]
    UndefinedSample(usize),

    #[error("Mittag-Leffler argument {z} outside the evaluation envelope: {reason}")]
    MlEnvelope { z: f64, reason: String },

    #[error("ML symbol pole on the inversion contour (Φ^α = λ near p = {0})")]
    MlContourPole(num_complex::Complex64),

    #[error("invalid Langevin problem: {0}")]
    InvalidProblem(String),

    #[error("deviating argument looks ahead: σ(t_{step}) = {sigma} > t_{step}")]
    SigmaFuture { step: usize, sigma: f64 },

    #[error("solver diverged: non-finite state at step {0}")]
    Divergence(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
