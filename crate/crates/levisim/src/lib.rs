//! Physics of an optically levitated, rotating silica nanodumbbell near a
//! reflecting surface.
//!
//! The crate models the full chain from a focused trapping beam to the
//! measured observables:
//!
//! * [`beam`] — paraxial Gaussian beam, normal-incidence Fresnel reflection
//!   and the resulting partial standing wave near a surface.
//! * [`dumbbell`] — two-sphere rigid body and its coupled-dipole
//!   polarizability tensor.
//! * [`trap`] — optical potential, standing-wave trap wells, trap
//!   frequencies, enhancement ratios and optical torque.
//! * [`gas`] — free-molecular damping of center-of-mass and rotational
//!   motion versus pressure.
//! * [`langevin`] — stochastic time-domain simulation of the trapped rotor,
//!   driven rotation and ring-up dynamics.
//! * [`spectral`] — Welch PSD estimation, Lorentzian fitting and
//!   torque/force sensitivity.
//! * [`grating`] — evanescent near field above a gold nanograting and the
//!   trap-frequency scan it produces.
//! * [`casimir`] — calibrated pairwise-summation surrogate for the Casimir
//!   torque and force between the dumbbell and the grating.
//! * [`config`] / [`cli`] — batch front end with reproducible outputs.

pub mod beam;
pub mod casimir;
pub mod cli;
pub mod config;
pub mod constants;
pub mod dumbbell;
pub mod error;
pub mod gas;
pub mod grating;
pub mod langevin;
pub mod output;
pub mod spectral;
pub mod trap;

pub use beam::{BeamParams, ComplexField, SurfaceKind, SurfaceSpec};
pub use casimir::CasimirConfig;
pub use config::RunConfig;
pub use dumbbell::{DumbbellGeom, PolarizabilityTensor};
pub use error::Error;
pub use gas::{DampingRates, Environment};
pub use grating::GratingSpec;
pub use langevin::{RotorState, SimConfig, TimeSeries};
pub use spectral::{PsdEstimate, SensitivityReport};
pub use trap::TrapWell;
