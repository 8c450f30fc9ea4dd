use thiserror::Error;

use crate::layout::Mode;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid trap: {0}")]
    InvalidTrap(String),

    #[error("mode {0} is not configured in this layout")]
    UnknownMode(Mode),

    #[error("phonon count {count} on mode {mode} exceeds truncation {max}")]
    CountExceedsTruncation { mode: Mode, count: usize, max: usize },

    #[error("operands live on different Hilbert-space layouts")]
    LayoutMismatch,

    #[error("total dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("identical modes: a two-mode operation needs two distinct modes")]
    IdenticalModes,

    #[error("partial trace needs a nonempty set of factors to keep")]
    EmptyKeep,

    #[error("unequal tone intensities: {0}")]
    UnequalTones(String),

    #[error("drive is not a recognized toolbox pattern: {0}")]
    UnrecognizedPattern(String),

    #[error("{what} exceeds the truncation budget (estimated leak {leak:.3e} > tolerance {tol:.3e})")]
    Budget { what: String, leak: f64, tol: f64 },

    #[error("guard-band population {leak:.3e} exceeds leak tolerance {tol:.3e}")]
    Leak { leak: f64, tol: f64 },

    #[error("qubit no longer factorizes: reduced purity {purity:.12}")]
    Separability { purity: f64 },

    #[error("integrator step underflow at t = {t:.6e} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("integrator exceeded {steps} steps before reaching t = {t_final}")]
    TooManySteps { steps: usize, t_final: f64 },

    #[error("tolerance {0:e} outside the accepted range [1e-12, 1e-4]")]
    InvalidTolerance(f64),

    #[error("ill-conditioned frequency dictionary (condition estimate {cond:.3e})")]
    IllConditioned { cond: f64 },

    #[error("commensurability violated: {0}")]
    Commensurability(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
