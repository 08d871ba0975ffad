use thiserror::Error;

use crate::solver::SolveResult;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// The interval length makes the kernel formula degenerate (sin T too
    /// close to zero) or is not a positive finite number.
    #[error("invalid interval length T = {t_len}: need T > 0 and |sin T| > {guard:e}")]
    InvalidInterval { t_len: f64, guard: f64 },

    #[error("point (t, s) = ({t}, {s}) lies outside [0, {t_len}]^2")]
    OutOfDomain { t: f64, s: f64, t_len: f64 },

    #[error("lp exponent must satisfy 1 <= p < infinity, got {0}")]
    InvalidExponent(f64),

    #[error("family of vectors is empty")]
    EmptyFamily,

    #[error("cutoff {cutoff} out of range 1..={max}")]
    BadCutoff { cutoff: usize, max: usize },

    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    #[error("component index {j} out of range 1..={j_max}")]
    ComponentOutOfRange { j: usize, j_max: usize },

    #[error("unknown system '{0}'")]
    UnknownSystem(String),

    #[error(
        "envelope check failed at j = {j}, t = {t}: |f_j|^p = {lhs} exceeds g_j + h_j |v_j|^p = {rhs}"
    )]
    EnvelopeViolation { j: usize, t: f64, lhs: f64, rhs: f64 },

    #[error("malformed config: {0}")]
    MalformedConfig(String),

    #[error("invalid solver config: {0}")]
    InvalidSolverConfig(String),

    /// The Picard iteration hit `max_iter` without meeting the tolerance.
    /// The partial result (trace and last iterate) is carried along.
    #[error("no convergence after {iterations} iterations (last delta {last_delta:e})")]
    NoConvergence {
        iterations: usize,
        last_delta: f64,
        result: Box<SolveResult>,
    },

    #[error("state file: {0}")]
    StateFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
