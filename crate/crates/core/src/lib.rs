//! Thermodynamics of the BCS model with an imaginary magnetic field for
//! gapped free dispersions: gap equation, critical temperature, phase
//! boundary `τ(β)`, free energy and order parameters.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod bzquad;
pub mod closed_form;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod free_energy;
pub mod gap;
mod kernel;
mod roots;
pub mod verify;

pub use boundary::{BoundaryCurve, GridSpec, ShapeVerdict};
pub use config::{QuadratureConfig, RootConfig, SolverConfig};
pub use dispersion::{BzGeometry, DispersionKind, DispersionModel, MeasureFractions};
pub use error::{Error, Result};
pub use free_energy::{FreeEnergyPoint, JumpReport};
pub use gap::{GapResult, ModelParams, Regime};
