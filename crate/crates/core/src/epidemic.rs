//! Epidemic models of packet flooding with hybrid recovery.
//!
//! `I` counts SUs buffering the data packet, `R` SUs that dropped it (via an
//! antipacket or the global timeout), and `P` is the probability that the
//! destination already holds the packet. `S = M + 1 − I − R`.
//!
//! Static flooding contacts grow with the perimeter of the infected cluster
//! (`√I` terms); mobile flooding mixes homogeneously (`I` terms).

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::params::ValidatedParams;
use crate::spectrum::SpectrumDerived;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Static,
    Mobile,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(Scheme::Static),
            "mobile" => Ok(Scheme::Mobile),
            other => Err(Error::InvalidArgument(format!(
                "unknown scheme `{other}` (expected static|mobile)"
            ))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Static => "static",
            Scheme::Mobile => "mobile",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Recovery {
    /// Antipackets from the destination plus the global timeout.
    HybridVaccineTimeout,
    /// Buffers are cleared only when the timer expires.
    TimeoutOnly,
    /// Plain flooding: no antipackets, no clearing.
    None,
}

impl Recovery {
    pub fn has_vaccine(self) -> bool {
        matches!(self, Recovery::HybridVaccineTimeout)
    }

    pub fn has_timeout(self) -> bool {
        !matches!(self, Recovery::None)
    }
}

impl FromStr for Recovery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hybrid" => Ok(Recovery::HybridVaccineTimeout),
            "timeout" => Ok(Recovery::TimeoutOnly),
            "none" => Ok(Recovery::None),
            other => Err(Error::InvalidArgument(format!(
                "unknown recovery `{other}` (expected hybrid|timeout|none)"
            ))),
        }
    }
}

impl std::fmt::Display for Recovery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Recovery::HybridVaccineTimeout => "hybrid",
            Recovery::TimeoutOnly => "timeout",
            Recovery::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpidemicConfig {
    /// Relay population M; the total population is M + 1.
    pub m: u32,
    pub beta: f64,
    pub p_hat: f64,
    pub t_frame: f64,
    /// Global timeout T.
    pub timer: f64,
    pub scheme: Scheme,
    pub recovery: Recovery,
    /// Output grid step h.
    pub step: f64,
}

impl EpidemicConfig {
    pub fn new(m: u32, beta: f64, p_hat: f64, timer: f64, scheme: Scheme) -> Self {
        Self {
            m,
            beta,
            p_hat,
            t_frame: 1.0,
            timer,
            scheme,
            recovery: Recovery::HybridVaccineTimeout,
            step: 0.01,
        }
    }

    /// Configuration matching a deployment: M from the region, β and p̂ from
    /// the spectrum quantities, h = 0.01·T_F.
    pub fn from_derived(
        params: &ValidatedParams,
        derived: &SpectrumDerived,
        timer: f64,
        scheme: Scheme,
    ) -> Self {
        Self {
            m: params.relay_population(),
            beta: derived.beta,
            p_hat: derived.p_hat,
            t_frame: params.t_frame,
            timer,
            scheme,
            recovery: Recovery::HybridVaccineTimeout,
            step: 0.01 * params.t_frame,
        }
    }

    pub fn with_recovery(self, recovery: Recovery) -> Self {
        Self { recovery, ..self }
    }

    pub fn with_timer(self, timer: f64) -> Self {
        Self { timer, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::InvalidArgument(
                "relay population must be >= 1".into(),
            ));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::NonPositive {
                name: "beta",
                value: self.beta,
            });
        }
        if !(self.p_hat >= 0.0 && self.p_hat <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "p_hat must lie in [0, 1], got {}",
                self.p_hat
            )));
        }
        for (name, value) in [
            ("t_frame", self.t_frame),
            ("timer", self.timer),
            ("step", self.step),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositive { name, value });
            }
        }
        Ok(())
    }

    fn m_f64(&self) -> f64 {
        f64::from(self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpidemicState {
    pub t: f64,
    pub s: f64,
    pub i: f64,
    pub r: f64,
    /// Probability that the destination has received the packet.
    pub p: f64,
}

impl EpidemicState {
    /// Source infected, everyone else (destination included) susceptible.
    pub fn initial(m: u32) -> Self {
        Self {
            t: 0.0,
            s: f64::from(m),
            i: 1.0,
            r: 0.0,
            p: 0.0,
        }
    }

    fn from_vector(t: f64, y: [f64; 3], m: f64) -> Self {
        let i = y[0].max(0.0);
        let r = y[1].max(0.0);
        Self {
            t,
            s: m + 1.0 - i - r,
            i,
            r,
            p: y[2].clamp(0.0, 1.0),
        }
    }

    fn vector(&self) -> [f64; 3] {
        [self.i, self.r, self.p]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub di: f64,
    pub dr: f64,
    pub dp: f64,
}

impl Derivatives {
    fn as_array(self) -> [f64; 3] {
        [self.di, self.dr, self.dp]
    }
}

/// Collision-free probability `exp(−βp̂ (I+R+P)/M · T_F)`. Serves as both the
/// infection rate ψ and the recovery rate μ.
pub fn collision_free_rate(state: &EpidemicState, cfg: &EpidemicConfig) -> f64 {
    let load = (state.i.max(0.0) + state.r.max(0.0) + state.p.clamp(0.0, 1.0)) / cfg.m_f64();
    (-cfg.beta * cfg.p_hat * load * cfg.t_frame).exp()
}

struct Terms {
    psi: f64,
    mu: f64,
    i: f64,
    r: f64,
    p: f64,
    /// Susceptible relays M − I − R (the destination is tracked through P).
    s_relay: f64,
    m: f64,
}

fn terms(state: &EpidemicState, cfg: &EpidemicConfig) -> Terms {
    let psi = collision_free_rate(state, cfg);
    let i = state.i.max(0.0);
    let r = state.r.max(0.0);
    let m = cfg.m_f64();
    Terms {
        psi,
        mu: if cfg.recovery.has_vaccine() { psi } else { 0.0 },
        i,
        r,
        p: state.p.clamp(0.0, 1.0),
        s_relay: (m - i - r).max(0.0),
        m,
    }
}

/// Static flooding right-hand side, with `c = 2√(β+1)`.
pub fn static_rhs(state: &EpidemicState, cfg: &EpidemicConfig) -> Derivatives {
    let k = terms(state, cfg);
    let c = 2.0 * (cfg.beta + 1.0).sqrt();
    let contact = cfg.p_hat * cfg.beta / 2.0 * c;
    let antipacket = (k.r + k.p).sqrt();
    let infect = contact * k.psi * k.i.sqrt() * k.s_relay / k.m;
    let cure_infected = contact * k.mu * antipacket * k.i / k.m;
    let cure_susceptible = contact * k.mu * antipacket * k.s_relay / k.m;
    Derivatives {
        di: infect - cure_infected,
        dr: cure_infected + cure_susceptible,
        dp: cfg.p_hat * k.psi * cfg.beta / 2.0 * k.i / k.m * (1.0 - k.p),
    }
}

/// Mobile flooding right-hand side (homogeneous mixing).
pub fn mobile_rhs(state: &EpidemicState, cfg: &EpidemicConfig) -> Derivatives {
    let k = terms(state, cfg);
    let contact = cfg.p_hat * cfg.beta;
    let infect = contact * k.psi * k.i * k.s_relay / k.m;
    let cure_infected = contact * k.mu * (k.r + k.p) * k.i / k.m;
    let cure_susceptible = contact * k.mu * (k.r + k.p) * k.s_relay / k.m;
    Derivatives {
        di: infect - cure_infected,
        dr: cure_infected + cure_susceptible,
        dp: contact * k.psi * k.i / k.m * (1.0 - k.p),
    }
}

pub fn rhs(state: &EpidemicState, cfg: &EpidemicConfig) -> Derivatives {
    match cfg.scheme {
        Scheme::Static => static_rhs(state, cfg),
        Scheme::Mobile => mobile_rhs(state, cfg),
    }
}

fn eval(t: f64, y: [f64; 3], cfg: &EpidemicConfig) -> [f64; 3] {
    let state = EpidemicState {
        t,
        s: 0.0,
        i: y[0],
        r: y[1],
        p: y[2],
    };
    rhs(&state, cfg).as_array()
}

fn axpy(y: [f64; 3], a: f64, k: [f64; 3]) -> [f64; 3] {
    [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]]
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step(state: &EpidemicState, cfg: &EpidemicConfig, h: f64) -> EpidemicState {
    let y = rk4(state.t, state.vector(), cfg, h);
    EpidemicState::from_vector(state.t + h, y, cfg.m_f64())
}

fn rk4(t: f64, y: [f64; 3], cfg: &EpidemicConfig, h: f64) -> [f64; 3] {
    let k1 = eval(t, y, cfg);
    let k2 = eval(t + h / 2.0, axpy(y, h / 2.0, k1), cfg);
    let k3 = eval(t + h / 2.0, axpy(y, h / 2.0, k2), cfg);
    let k4 = eval(t + h, axpy(y, h, k3), cfg);
    let mut out = y;
    for j in 0..3 {
        out[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    out
}

/// Substeps per grid interval near the start, where √I and √(R+P) have
/// unbounded derivatives. Interval `k ≥ 1` gets `ceil(STARTUP / k)` substeps;
/// interval 0 is split geometrically toward t0.
const STARTUP_REFINEMENT: usize = 64;
const STARTUP_LEVELS: i32 = 40;
const DRIFT_TOL: f64 = 1e-6;
const NEG_TOL: f64 = 1e-9;
const MAX_HALVINGS: u32 = 10;

/// Streams grid states of one integration attempt at a fixed output step.
struct Stepper<'a> {
    cfg: &'a EpidemicConfig,
    t0: f64,
    h: f64,
    end: f64,
    k: usize,
    y: [f64; 3],
    t: f64,
}

#[derive(Debug)]
struct Drift;

impl<'a> Stepper<'a> {
    fn new(cfg: &'a EpidemicConfig, initial: &EpidemicState, h: f64, end: f64) -> Self {
        Self {
            cfg,
            t0: initial.t,
            h,
            end,
            k: 0,
            y: initial.vector(),
            t: initial.t,
        }
    }

    fn advance(&mut self, from: f64, to: f64, pieces: usize) {
        let dt = (to - from) / pieces as f64;
        for j in 0..pieces {
            self.y = rk4(from + j as f64 * dt, self.y, self.cfg, dt);
        }
    }

    fn next_state(&mut self) -> Option<std::result::Result<EpidemicState, Drift>> {
        if self.t >= self.end {
            return None;
        }
        let start = self.t;
        let grid_next = self.t0 + (self.k + 1) as f64 * self.h;
        let stop = if grid_next > self.end - 1e-12 * self.h.max(1.0) {
            self.end
        } else {
            grid_next
        };
        if self.k == 0 {
            let span = stop - start;
            let mut lo = start;
            for level in (0..STARTUP_LEVELS).rev() {
                let hi = start + span * 2f64.powi(-level);
                let pieces = if level == STARTUP_LEVELS - 1 {
                    1
                } else {
                    STARTUP_REFINEMENT / 2
                };
                self.advance(lo, hi, pieces);
                lo = hi;
            }
        } else {
            let pieces = STARTUP_REFINEMENT.div_ceil(self.k).max(1);
            self.advance(start, stop, pieces);
        }
        self.k += 1;
        self.t = stop;
        let m = self.cfg.m_f64();
        let [i, r, _] = self.y;
        if i < -NEG_TOL || r < -NEG_TOL || i + r > m + 1.0 + DRIFT_TOL || !(i + r).is_finite() {
            return Some(Err(Drift));
        }
        Some(Ok(EpidemicState::from_vector(stop, self.y, m)))
    }
}

/// Integrates up to the first of `cfg.timer` or `stop(state)`, halving the
/// step on conservation drift.
pub(crate) fn integrate_until(
    cfg: &EpidemicConfig,
    initial: &EpidemicState,
    mut stop: impl FnMut(&EpidemicState) -> bool,
) -> Result<Trajectory> {
    cfg.validate()?;
    if !(initial.t < cfg.timer) {
        return Err(Error::InvalidArgument(format!(
            "initial time {} must precede the timer {}",
            initial.t, cfg.timer
        )));
    }
    let m = cfg.m_f64();
    let mut first = EpidemicState::from_vector(initial.t, initial.vector(), m);
    first.s = m + 1.0 - first.i - first.r;
    let mut h = cfg.step;
    'attempt: for _ in 0..=MAX_HALVINGS {
        let mut states = vec![first];
        let mut stepper = Stepper::new(cfg, &first, h, cfg.timer);
        while let Some(next) = stepper.next_state() {
            match next {
                Ok(state) => {
                    states.push(state);
                    if stop(&state) {
                        break;
                    }
                }
                Err(Drift) => {
                    h /= 2.0;
                    continue 'attempt;
                }
            }
        }
        return Ok(Trajectory {
            states,
            m: cfg.m,
            timer: cfg.timer,
            recovery: cfg.recovery,
        });
    }
    Err(Error::StepTooLarge(MAX_HALVINGS))
}

/// Integrates on `[t0, T]`. Beyond `T` (timeout variants) the trajectory is
/// flat: buffers cleared and `P` frozen.
pub fn integrate(cfg: &EpidemicConfig, initial: &EpidemicState) -> Result<Trajectory> {
    integrate_until(cfg, initial, |_| false)
}

/// Grid states up to the global timer plus the timeout event.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<EpidemicState>,
    m: u32,
    timer: f64,
    recovery: Recovery,
}

impl Trajectory {
    pub fn states(&self) -> &[EpidemicState] {
        &self.states
    }

    pub fn relay_population(&self) -> u32 {
        self.m
    }

    pub fn start_time(&self) -> f64 {
        self.states[0].t
    }

    /// Last integrated time.
    pub fn end_time(&self) -> f64 {
        self.states[self.states.len() - 1].t
    }

    /// Time of the global timeout (the buffer-clearing event).
    pub fn timeout(&self) -> f64 {
        self.timer
    }

    /// Whether the trajectory was integrated all the way to the timeout.
    pub fn reaches_timeout(&self) -> bool {
        self.end_time() >= self.timer
    }

    fn bracket(&self, t: f64) -> Result<EpidemicState> {
        let start = self.start_time();
        let end = self.end_time();
        if !(t >= start) {
            return Err(Error::OutOfRange { t, start, end });
        }
        if t > end {
            if self.reaches_timeout() && self.recovery.has_timeout() {
                let last = self.states[self.states.len() - 1];
                return Ok(EpidemicState {
                    t,
                    s: f64::from(self.m) + 1.0,
                    i: 0.0,
                    r: 0.0,
                    p: last.p,
                });
            }
            return Err(Error::OutOfRange { t, start, end });
        }
        let idx = self.states.partition_point(|s| s.t < t);
        if idx == 0 {
            return Ok(self.states[0]);
        }
        let b = self.states[idx];
        let a = self.states[idx - 1];
        let w = if b.t > a.t {
            (t - a.t) / (b.t - a.t)
        } else {
            1.0
        };
        let lerp = |x: f64, y: f64| x + w * (y - x);
        Ok(EpidemicState {
            t,
            s: lerp(a.s, b.s),
            i: lerp(a.i, b.i),
            r: lerp(a.r, b.r),
            p: lerp(a.p, b.p),
        })
    }

    /// Linear interpolation on the grid. At `t = T` this is the left limit;
    /// past `T` it is the cleared state.
    pub fn state_at(&self, t: f64) -> Result<EpidemicState> {
        self.bracket(t)
    }

    /// `P(t)`, the probability the destination holds the packet by `t`.
    pub fn reception_probability(&self, t: f64) -> Result<f64> {
        Ok(self.bracket(t)?.p)
    }

    pub fn infected_at(&self, t: f64) -> Result<f64> {
        Ok(self.bracket(t)?.i)
    }

    /// First grid-interpolated time at which `P(t) >= level`.
    pub fn first_time_reaching(&self, level: f64) -> Option<f64> {
        let idx = self.states.iter().position(|s| s.p >= level)?;
        if idx == 0 {
            return Some(self.states[0].t);
        }
        let a = self.states[idx - 1];
        let b = self.states[idx];
        Some(a.t + (level - a.p) / (b.p - a.p) * (b.t - a.t))
    }

    /// Delivery-time quantile: the time by which the destination has received
    /// the packet with probability `q`.
    pub fn delivery_quantile(&self, q: f64) -> Option<f64> {
        self.first_time_reaching(q)
    }

    /// `Q(T) = ∫_0^T I(t) dt` by the trapezoidal rule on the stored grid.
    pub fn buffer_occupancy(&self, timer: f64) -> Result<f64> {
        buffer_occupancy(self, timer)
    }
}

/// Buffer occupancy `∫_{t0}^{T} I(t) dt` (trapezoidal on the trajectory grid).
pub fn buffer_occupancy(traj: &Trajectory, timer: f64) -> Result<f64> {
    let end = traj.end_time();
    if timer > end + 1e-12 {
        return Err(Error::TrajectoryTooShort {
            end,
            requested: timer,
        });
    }
    let states = traj.states();
    let mut total = 0.0;
    for pair in states.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a.t >= timer {
            break;
        }
        if b.t <= timer {
            total += 0.5 * (a.i + b.i) * (b.t - a.t);
        } else {
            let w = (timer - a.t) / (b.t - a.t);
            let i_end = a.i + w * (b.i - a.i);
            total += 0.5 * (a.i + i_end) * (timer - a.t);
        }
    }
    Ok(total)
}
