//! Slot-level Monte Carlo model of interference-aware flooding.
//!
//! Each round deploys PT/PR pairs and SUs as Poisson point processes, floods
//! a packet from a random source toward a random destination frame by frame,
//! and (under hybrid recovery) floods antipackets back once the destination is
//! reached. Reception is decided per link by SINR under Rayleigh fading.

mod channel;
mod flooding;
mod mobility;
mod network;
mod oracle;
mod run;

pub use channel::{attempt_reception, link_success_rate, Channel};
pub use flooding::{slot_activation, step_flooding, FrameCounts};
pub use mobility::{step_mobility, Leg, MobilityConfig};
pub use network::{
    sample_network, sample_network_retrying, NetworkSnapshot, NodeRef, NodeState, Point,
};
pub use oracle::{pr_outage_oracle, Thinning};
pub use run::{round_rng, run, run_round, run_rounds, FrameStats, RoundOutcome, RunMetrics};

use crate::epidemic::{Recovery, Scheme};
use crate::error::{Error, Result};
use crate::params::ValidatedParams;
use crate::spectrum;

/// Minimum link distance (m); guards the path-loss singularity.
pub const D_MIN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub params: ValidatedParams,
    /// Per-slot access probability for SUs outside every avoidance region.
    pub p_hat: f64,
    pub rounds: u32,
    pub scheme: Scheme,
    pub recovery: Recovery,
    /// Global timer in frames.
    pub timer: u32,
    pub mobility: MobilityConfig,
    pub seed: u64,
    /// Whether antipacket transmissions interfere with packet reception.
    pub antipacket_interference: bool,
    /// Dispatch rounds over the rayon pool (results are identical either way).
    pub parallel: bool,
}

impl SimConfig {
    /// Builds a config with p̂ taken from the spectrum model.
    pub fn new(
        params: ValidatedParams,
        scheme: Scheme,
        recovery: Recovery,
        timer: u32,
        rounds: u32,
        seed: u64,
    ) -> Result<Self> {
        let derived = spectrum::derive(&params)?;
        let cfg = Self {
            params,
            p_hat: derived.p_hat,
            rounds,
            scheme,
            recovery,
            timer,
            mobility: MobilityConfig::default(),
            seed,
            antipacket_interference: true,
            parallel: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds < 1 {
            return Err(Error::InvalidArgument("rounds must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p_hat) {
            return Err(Error::InvalidArgument(format!(
                "p_hat must lie in [0, 1], got {}",
                self.p_hat
            )));
        }
        self.mobility.validate()
    }

    /// Physical avoidance radius ρ·r_PT (m).
    pub fn avoidance_radius(&self) -> f64 {
        self.params.rho * self.params.r_pt
    }

    pub fn channel(&self) -> Channel {
        Channel::new(&self.params)
    }
}
