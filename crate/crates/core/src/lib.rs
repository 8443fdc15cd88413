//! Interference-aware, recovery-assisted flooding for cognitive radio ad hoc
//! networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`] holds the physical/protocol constants and validates them.
//! * [`spectrum`] evaluates the stochastic-geometry quantities: permissible
//!   secondary density, avoidance-region gain, mean neighbour count.
//! * [`epidemic`] integrates the static and mobile flooding ODEs with hybrid
//!   (vaccine + global timeout) recovery.
//! * [`planner`] picks the SU transmit power and global timer that minimise
//!   buffer occupancy under a delivery-probability constraint.
//! * [`simulator`] is a slot-level Monte Carlo model used to cross-check the
//!   analytical path.
//! * [`experiment`] drives sweeps and writes the CSV artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN.

pub mod epidemic;
pub mod error;
pub mod experiment;
pub mod numeric;
pub mod params;
pub mod planner;
pub mod simulator;
pub mod spectrum;

pub use epidemic::{
    buffer_occupancy, integrate, EpidemicConfig, EpidemicState, Recovery, Scheme, Trajectory,
};
pub use error::{Error, Result};
pub use params::{PathlossConstants, RecoveryPolicy, SystemParams, ValidatedParams};
pub use spectrum::SpectrumDerived;
