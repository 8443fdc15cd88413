//! Buffer-occupancy minimisation.
//!
//! Lowering `P_SU` raises the permissible active density, so the optimum sits
//! at the connectivity bound `β = β_th`, i.e. `P*_SU = (β_th / k₅)²`. The
//! optimal timer is the smallest `T` with `P(T) = 1 − ε_T`.

use crate::epidemic::{integrate_until, EpidemicConfig, EpidemicState, Scheme};
use crate::error::{Error, Result};
use crate::numeric::bisect_increasing;
use crate::params::ValidatedParams;
use crate::spectrum;

/// Connectivity threshold without fading.
pub const DEFAULT_BETA_TH: f64 = 4.52;
/// Absolute tolerance on `T*`.
pub const TIMER_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanResult {
    pub t_star: f64,
    pub p_su_star: f64,
    pub q_at_t_star: f64,
    pub p_at_t_star: f64,
    pub beta_th: f64,
}

impl PlanResult {
    pub fn rows(&self) -> [(&'static str, f64); 5] {
        [
            ("t_star", self.t_star),
            ("p_su_star", self.p_su_star),
            ("q_at_t_star", self.q_at_t_star),
            ("p_at_t_star", self.p_at_t_star),
            ("beta_th", self.beta_th),
        ]
    }
}

/// Search horizon `50 (M+1) / (βp̂)` frames.
pub fn timer_horizon(cfg: &EpidemicConfig) -> Result<f64> {
    let rate = cfg.beta * cfg.p_hat;
    if !(rate > 0.0) {
        return Err(Error::Infeasible(
            "no active neighbours (beta * p_hat = 0): the packet never spreads".into(),
        ));
    }
    Ok(50.0 * (f64::from(cfg.m) + 1.0) / rate * cfg.t_frame)
}

/// Timer and occupancy at the optimum for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimerSolution {
    pub t_star: f64,
    pub p_at_t_star: f64,
    pub q_at_t_star: f64,
}

/// Smallest `T` with `P(T) >= 1 − ε_T`, with `P(T*)` and `Q(T*)`.
pub fn solve_timer(cfg: &EpidemicConfig, eps_t: f64) -> Result<TimerSolution> {
    if !(eps_t > 0.0 && eps_t < 1.0) {
        return Err(Error::OutageOutOfRange {
            name: "eps_t",
            value: eps_t,
        });
    }
    let target = 1.0 - eps_t;
    let horizon = timer_horizon(cfg)?;
    let long = cfg.with_timer(horizon);
    // P(t) on [0, T] does not depend on T, so one long run answers every T.
    // Stop once the target is crossed, or once P has stalled for good.
    let stall_window = 100.0 * cfg.t_frame;
    let mut anchor = (0.0, 0.0);
    let traj = integrate_until(&long, &EpidemicState::initial(cfg.m), |s| {
        if s.p >= target {
            return true;
        }
        if s.t - anchor.0 >= stall_window {
            let stalled = s.p - anchor.1 < 1e-13 && s.i < 1e-6;
            anchor = (s.t, s.p);
            return stalled;
        }
        false
    })?;
    let last = traj.states()[traj.states().len() - 1];
    if last.p < target {
        return Err(Error::TargetUnreachable {
            target,
            supremum: last.p,
        });
    }
    let p = |t: f64| traj.reception_probability(t).unwrap_or(0.0);
    let t_star = if p(0.0) >= target {
        0.0
    } else {
        bisect_increasing(p, 0.0, last.t, target, TIMER_TOL)
    };
    Ok(TimerSolution {
        t_star,
        p_at_t_star: traj.reception_probability(t_star)?,
        q_at_t_star: traj.buffer_occupancy(t_star)?,
    })
}

pub fn optimal_timer(cfg: &EpidemicConfig, eps_t: f64) -> Result<f64> {
    Ok(solve_timer(cfg, eps_t)?.t_star)
}

/// `P*_SU = (β_th / k₅)²` (mW), α = 4.
pub fn optimal_power(params: &ValidatedParams, beta_th: f64) -> Result<f64> {
    if !(beta_th > 0.0 && beta_th.is_finite()) {
        return Err(Error::NonPositive {
            name: "beta_th",
            value: beta_th,
        });
    }
    let k5 = spectrum::k5(params)?;
    if !(k5 > 0.0) {
        return Err(Error::Infeasible("k5 is zero".into()));
    }
    Ok((beta_th / k5).powi(2))
}

/// Power first, then the timer at that power.
pub fn plan(
    params: &ValidatedParams,
    eps_t: f64,
    beta_th: f64,
    scheme: Scheme,
) -> Result<PlanResult> {
    let p_su_star = optimal_power(params, beta_th)?;
    let at_power = params.with(|p| p.p_su = p_su_star)?;
    let derived = spectrum::derive(&at_power)?;
    let horizon_cfg = EpidemicConfig::from_derived(&at_power, &derived, 1.0, scheme);
    let sol = solve_timer(&horizon_cfg, eps_t)?;
    Ok(PlanResult {
        t_star: sol.t_star,
        p_su_star,
        q_at_t_star: sol.q_at_t_star,
        p_at_t_star: sol.p_at_t_star,
        beta_th,
    })
}
