//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid beam: {0}")]
    InvalidBeam(String),

    #[error("surface kind is None; no reflection coefficient is defined")]
    NoSurface,

    #[error("coupled-dipole interaction diverges: alpha0/(2 pi eps0 D^3) = {0} >= 1")]
    CouplingDivergence(f64),

    #[error("no trap well found in scan range [{0:.3e}, {1:.3e}] m")]
    NoWellFound(f64, f64),

    #[error("unstable well: non-positive curvature along {axis} ({curvature:.3e} N/m)")]
    UnstableWell { axis: &'static str, curvature: f64 },

    #[error("free-molecular regime violated: Knudsen number {0:.3} < 10")]
    RegimeViolation(f64),

    #[error("surface quadrature did not converge: relative change {0:.3e} on refinement")]
    QuadratureNonConvergence(f64),

    #[error("particle left the simulation box at step {step} (|{axis}| = {value:.3e} m)")]
    ParticleLost { step: u64, axis: &'static str, value: f64 },

    #[error("non-finite state at step {0}")]
    NonFinite(u64),

    #[error("time series too short: {have} samples, need at least {need}")]
    TooShort { have: usize, need: usize },

    #[error("fit did not converge after {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("no peak above the noise floor (best prominence {0:.2})")]
    NoPeak(f64),

    #[error("grating period {period:.3e} m >= wavelength {wavelength:.3e} m: propagating orders outside model scope")]
    PropagatingOrder { period: f64, wavelength: f64 },

    #[error("pairwise mesh not converged: relative change {0:.3e} on refinement")]
    MeshNotConverged(f64),

    #[error("dumbbell interpenetrates the grating: separation {separation:.3e} m < minimum {minimum:.3e} m")]
    Interpenetration { separation: f64, minimum: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code contract: 2 config, 3 physics/model, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io(_) => 4,
            _ => 3,
        }
    }
}
