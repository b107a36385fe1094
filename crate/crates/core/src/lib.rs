//! Cavity optomechanics with the collective motion of a trapped atomic ensemble.
//!
//! * [`params`]: physical inputs and the collective-mode reduction (mass,
//!   oscillator length, per-photon force, granularity).
//! * [`lattice`]: Bloch bands of the trapping lattice and the probe's
//!   excitation weights.
//! * [`statics`]: optomechanical force and potential, equilibria,
//!   bistability and quasi-static transmission sweeps.
//! * [`backaction`]: photon-number spectral densities, heating/cooling rate
//!   equation and field response.
//! * [`numerics`]: eigensolver, root finder and linear ODE used by the above.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod backaction;
pub mod error;
pub mod lattice;
pub mod numerics;
pub mod params;
pub mod statics;

pub use error::{Error, Result};
pub use params::{CollectiveMode, PhysicalConstants, SystemParams};
pub use statics::DriveCondition;
