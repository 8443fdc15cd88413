//! Browser bindings: derived quantities, ODE curves and a live single-round
//! simulation for the static page in `www/`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

use crahn::epidemic::{integrate, EpidemicConfig, EpidemicState, Recovery, Scheme};
use crahn::simulator::{
    sample_network_retrying, step_flooding, NetworkSnapshot, NodeState, SimConfig,
};
use crahn::{spectrum, SystemParams, ValidatedParams};

fn to_js(e: crahn::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn params(p_su: f64, rho: f64, lambda_pt: f64) -> crahn::Result<ValidatedParams> {
    SystemParams {
        p_su,
        rho,
        lambda_pt,
        ..SystemParams::reference()
    }
    .validate()
}

fn scheme(name: &str) -> crahn::Result<Scheme> {
    name.parse()
}

/// Names matching the values returned by [`derive`].
#[wasm_bindgen]
pub fn derive_keys() -> Vec<String> {
    let d = spectrum::derive(
        &SystemParams::reference()
            .validate()
            .expect("reference params"),
    )
    .expect("reference params are feasible");
    d.rows().iter().map(|(k, _)| (*k).to_string()).collect()
}

/// Derived access quantities for the reference deployment with the given
/// SU power (mW), avoidance coefficient and PT density.
#[wasm_bindgen]
pub fn derive(p_su: f64, rho: f64, lambda_pt: f64) -> Result<Vec<f64>, JsValue> {
    let p = params(p_su, rho, lambda_pt).map_err(to_js)?;
    let d = spectrum::derive(&p).map_err(to_js)?;
    Ok(d.rows().iter().map(|(_, v)| *v).collect())
}

/// ODE samples flattened as `[t, S, I, R, P, t, S, …]`, every quarter frame.
#[wasm_bindgen]
pub fn ode_curves(
    scheme_name: &str,
    p_su: f64,
    rho: f64,
    lambda_pt: f64,
    timer: f64,
) -> Result<Vec<f64>, JsValue> {
    ode_samples(scheme_name, p_su, rho, lambda_pt, timer).map_err(to_js)
}

fn ode_samples(
    scheme_name: &str,
    p_su: f64,
    rho: f64,
    lambda_pt: f64,
    timer: f64,
) -> crahn::Result<Vec<f64>> {
    let p = params(p_su, rho, lambda_pt)?;
    let d = spectrum::derive(&p)?;
    let cfg = EpidemicConfig::from_derived(&p, &d, timer, scheme(scheme_name)?);
    let traj = integrate(&cfg, &EpidemicState::initial(p.relay_population()))?;
    Ok(traj
        .states()
        .iter()
        .step_by(25)
        .flat_map(|s| [s.t, s.s, s.i, s.r, s.p])
        .collect())
}

/// One simulated round that the page steps frame by frame.
#[wasm_bindgen]
pub struct Round {
    cfg: SimConfig,
    snapshot: NetworkSnapshot,
    rng: ChaCha8Rng,
}

#[wasm_bindgen]
impl Round {
    #[wasm_bindgen(constructor)]
    pub fn new(scheme_name: &str, hybrid: bool, timer: u32, seed: u64) -> Result<Round, JsValue> {
        Self::build(scheme_name, hybrid, timer, seed).map_err(to_js)
    }

    /// Advances one frame; returns false once the timer has expired.
    pub fn step(&mut self) -> bool {
        if self.snapshot.clock >= self.cfg.timer {
            return false;
        }
        step_flooding(&mut self.snapshot, &self.cfg, &mut self.rng);
        true
    }

    pub fn clock(&self) -> u32 {
        self.snapshot.clock
    }

    pub fn side(&self) -> f64 {
        self.cfg.params.region_side
    }

    pub fn avoidance_radius(&self) -> f64 {
        self.cfg.avoidance_radius()
    }

    /// Frame of delivery, or 0 while undelivered.
    pub fn delivered_at(&self) -> u32 {
        self.snapshot.delivered_at.unwrap_or(0)
    }

    /// SU coordinates as `[x0, y0, x1, y1, …]`.
    pub fn su_positions(&self) -> Vec<f64> {
        self.snapshot
            .su_positions
            .iter()
            .flat_map(|p| [p.x, p.y])
            .collect()
    }

    pub fn pr_positions(&self) -> Vec<f64> {
        self.snapshot
            .pr_positions
            .iter()
            .flat_map(|p| [p.x, p.y])
            .collect()
    }

    pub fn pt_positions(&self) -> Vec<f64> {
        self.snapshot
            .pt_positions
            .iter()
            .flat_map(|p| [p.x, p.y])
            .collect()
    }

    /// Per SU: 0 susceptible, 1 infected, 2 recovered, plus 4 if active this slot.
    pub fn states(&self) -> Vec<u8> {
        self.snapshot
            .states
            .iter()
            .zip(&self.snapshot.active)
            .map(|(s, &a)| {
                let base = match s {
                    NodeState::Susceptible => 0,
                    NodeState::Infected => 1,
                    NodeState::Recovered => 2,
                };
                base | if a { 4 } else { 0 }
            })
            .collect()
    }

    pub fn source(&self) -> usize {
        self.snapshot.source
    }

    pub fn destination(&self) -> usize {
        self.snapshot.destination
    }
}

impl Round {
    fn build(scheme_name: &str, hybrid: bool, timer: u32, seed: u64) -> crahn::Result<Round> {
        let p = SystemParams::reference().validate()?;
        let recovery = if hybrid {
            Recovery::HybridVaccineTimeout
        } else {
            Recovery::None
        };
        let mut cfg = SimConfig::new(p, scheme(scheme_name)?, recovery, timer, 1, seed)?;
        cfg.parallel = false;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let snapshot = sample_network_retrying(&cfg, &mut rng)?;
        Ok(Round { cfg, snapshot, rng })
    }
}
