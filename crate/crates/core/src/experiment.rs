//! Timer sweeps, figure reproduction and the CSV artifacts.
//!
//! Every CSV starts with `# crahn <version> config=<hash> seed=<seed>` and a
//! header row. Floats are printed in shortest round-trip form, so identical
//! inputs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::epidemic::{integrate, EpidemicConfig, EpidemicState, Recovery, Scheme, Trajectory};
use crate::error::{Error, Result};
use crate::params::ValidatedParams;
use crate::simulator::{run_rounds, RoundOutcome, RunMetrics, SimConfig};
use crate::spectrum::{self, SpectrumDerived};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Rounds per simulated point at desk scale.
pub const DESK_ROUNDS: u32 = 2000;
/// Rounds per simulated point in the full-scale reproduction.
pub const FULL_ROUNDS: u32 = 20_000;

/// Timer values `start, start+step, …, end` in frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimerAxis {
    pub start: u32,
    pub end: u32,
    pub step: u32,
}

impl TimerAxis {
    pub fn new(start: u32, end: u32, step: u32) -> Result<Self> {
        if start < 1 || step == 0 || start > end {
            return Err(Error::Config(format!(
                "timer axis {start}:{end}:{step} needs 1 <= start <= end and step > 0"
            )));
        }
        Ok(Self { start, end, step })
    }

    pub fn single(t: u32) -> Result<Self> {
        Self::new(t, t, 1)
    }

    pub fn values(&self) -> Vec<u32> {
        (self.start..=self.end)
            .step_by(self.step as usize)
            .collect()
    }

    pub fn last(&self) -> u32 {
        *self.values().last().expect("axis is never empty")
    }
}

impl FromStr for TimerAxis {
    type Err = Error;

    /// `start:end:step`, or a single timer value.
    fn from_str(s: &str) -> Result<Self> {
        let parse = |x: &str| {
            x.trim().parse::<u32>().map_err(|_| {
                Error::Config(format!("bad timer axis `{s}` (expected start:end:step)"))
            })
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [t] => Self::single(parse(t)?),
            [a, b, c] => Self::new(parse(a)?, parse(b)?, parse(c)?),
            _ => Err(Error::Config(format!(
                "bad timer axis `{s}` (expected start:end:step)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub params: ValidatedParams,
    pub scheme: Scheme,
    pub axis: TimerAxis,
    pub rounds: u32,
    pub seed: u64,
    pub parallel: bool,
}

impl ExperimentSpec {
    pub fn new(
        params: ValidatedParams,
        scheme: Scheme,
        axis: TimerAxis,
        rounds: u32,
        seed: u64,
    ) -> Self {
        Self {
            params,
            scheme,
            axis,
            rounds,
            seed,
            parallel: true,
        }
    }

    fn sim_config(&self, recovery: Recovery, timer: u32) -> Result<SimConfig> {
        let mut cfg = SimConfig::new(
            self.params,
            self.scheme,
            recovery,
            timer,
            self.rounds,
            self.seed,
        )?;
        cfg.parallel = self.parallel;
        Ok(cfg)
    }
}

/// Comment line identifying the tool version, configuration and seed.
pub fn preamble(params: &ValidatedParams, seed: Option<u64>) -> String {
    match seed {
        Some(seed) => format!(
            "# crahn {VERSION} config={} seed={seed}\n",
            params.config_hash()
        ),
        None => format!("# crahn {VERSION} config={}\n", params.config_hash()),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

/// `key,value` table (derived quantities, plans).
pub fn key_value_csv(params: &ValidatedParams, rows: &[(&str, f64)]) -> String {
    let mut out = preamble(params, None);
    out.push_str("key,value\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{v:.8e}");
    }
    out
}

/// ODE samples every `stride` grid points, plus the final point.
pub fn trajectory_csv(params: &ValidatedParams, traj: &Trajectory, stride: usize) -> String {
    let mut out = preamble(params, None);
    out.push_str("t,S,I,R,P\n");
    let states = traj.states();
    let stride = stride.max(1);
    for (k, s) in states.iter().enumerate() {
        if k % stride == 0 || k + 1 == states.len() {
            let _ = writeln!(out, "{},{},{},{},{}", s.t, s.s, s.i, s.r, s.p);
        }
    }
    out
}

/// Simulated dynamics: `frame, mean_S, mean_I, mean_R, se_I`.
pub fn dynamics_csv(params: &ValidatedParams, metrics: &RunMetrics) -> String {
    let mut out = preamble(params, Some(metrics.seed));
    out.push_str("frame,mean_S,mean_I,mean_R,se_I\n");
    for f in &metrics.frames {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            f.frame,
            f.mean_s,
            f.mean_i,
            f.mean_r,
            opt(f.se_i)
        );
    }
    out
}

/// Simulated summary: `P_T, Q_T, mean_T_D, rounds, seed`.
pub fn summary_csv(params: &ValidatedParams, metrics: &RunMetrics) -> String {
    let mut out = preamble(params, Some(metrics.seed));
    out.push_str("P_T,Q_T,mean_T_D,rounds,seed\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{}",
        metrics.p_t,
        metrics.q_t,
        opt(metrics.mean_t_d),
        metrics.rounds,
        metrics.seed
    );
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub timer: u32,
    pub p_ode: f64,
    pub p_sim: f64,
    pub p_sim_se: Option<f64>,
    pub q_ode: f64,
    pub q_sim: f64,
    pub q_sim_se: Option<f64>,
    pub scheme: Scheme,
}

pub const SWEEP_HEADER: &str = "T,P_T_ode,P_T_sim,Q_T_ode,Q_T_sim,scheme";

impl SweepRow {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.timer, self.p_ode, self.p_sim, self.q_ode, self.q_sim, self.scheme
        )
    }
}

fn ode_trajectory(
    params: &ValidatedParams,
    derived: &SpectrumDerived,
    scheme: Scheme,
    recovery: Recovery,
    timer: u32,
) -> Result<Trajectory> {
    let cfg = EpidemicConfig::from_derived(params, derived, f64::from(timer), scheme)
        .with_recovery(recovery);
    integrate(&cfg, &EpidemicState::initial(params.relay_population()))
}

/// Sweep rows from one long ODE trajectory and one long batch of rounds.
/// Before the timer fires neither path depends on it, so truncating the long
/// run at `T` gives exactly the run with timer `T`.
pub fn sweep_rows(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    let outcomes = run_rounds(&spec.sim_config(Recovery::HybridVaccineTimeout, spec.axis.last())?)?;
    sweep_rows_from(spec, &outcomes)
}

/// Like [`sweep_rows`] with precomputed hybrid-recovery rounds covering the axis.
pub fn sweep_rows_from(spec: &ExperimentSpec, outcomes: &[RoundOutcome]) -> Result<Vec<SweepRow>> {
    let derived = spectrum::derive(&spec.params)?;
    let horizon = spec.axis.last();
    let traj = ode_trajectory(
        &spec.params,
        &derived,
        spec.scheme,
        Recovery::HybridVaccineTimeout,
        horizon,
    )?;
    spec.axis
        .values()
        .into_iter()
        .map(|t| {
            let tf = f64::from(t);
            let m = RunMetrics::from_outcomes(outcomes, t, spec.seed)?;
            Ok(SweepRow {
                timer: t,
                p_ode: traj.reception_probability(tf)?,
                p_sim: m.p_t,
                p_sim_se: m.p_t_se,
                q_ode: traj.buffer_occupancy(tf)?,
                q_sim: m.q_t,
                q_sim_se: m.q_t_se,
                scheme: spec.scheme,
            })
        })
        .collect()
}

/// Writes the sweep CSV. On failure the rows produced so far are followed
/// by a `# FAILED: …` marker and the error is returned.
pub fn run_sweep(spec: &ExperimentSpec, out: &mut impl Write) -> Result<Vec<SweepRow>> {
    out.write_all(preamble(&spec.params, Some(spec.seed)).as_bytes())?;
    writeln!(out, "{SWEEP_HEADER}")?;
    match sweep_rows(spec) {
        Ok(rows) => {
            for r in &rows {
                writeln!(out, "{}", r.csv())?;
            }
            out.flush()?;
            Ok(rows)
        }
        Err(e) => {
            writeln!(out, "# FAILED: {e}")?;
            out.flush()?;
            Err(e)
        }
    }
}

pub fn sweep_csv(params: &ValidatedParams, seed: u64, rows: &[SweepRow]) -> String {
    let mut out = preamble(params, Some(seed));
    let _ = writeln!(out, "{SWEEP_HEADER}");
    for r in rows {
        let _ = writeln!(out, "{}", r.csv());
    }
    out
}

/// One dynamics figure: ODE and simulated curves, with and without recovery.
#[derive(Debug, Clone)]
pub struct DynamicsFigure {
    pub scheme: Scheme,
    pub timer: u32,
    pub ode: Trajectory,
    pub ode_baseline: Trajectory,
    pub sim: RunMetrics,
    pub sim_baseline: RunMetrics,
    pub outcomes: Vec<RoundOutcome>,
    pub baseline_outcomes: Vec<RoundOutcome>,
}

impl DynamicsFigure {
    pub fn compute(
        params: &ValidatedParams,
        scheme: Scheme,
        timer: u32,
        rounds: u32,
        seed: u64,
    ) -> Result<Self> {
        let spec = ExperimentSpec::new(*params, scheme, TimerAxis::single(timer)?, rounds, seed);
        Self::compute_with(&spec)
    }

    pub fn compute_with(spec: &ExperimentSpec) -> Result<Self> {
        let timer = spec.axis.last();
        let derived = spectrum::derive(&spec.params)?;
        let ode = ode_trajectory(
            &spec.params,
            &derived,
            spec.scheme,
            Recovery::HybridVaccineTimeout,
            timer,
        )?;
        let ode_baseline =
            ode_trajectory(&spec.params, &derived, spec.scheme, Recovery::None, timer)?;
        let outcomes = run_rounds(&spec.sim_config(Recovery::HybridVaccineTimeout, timer)?)?;
        let baseline_outcomes = run_rounds(&spec.sim_config(Recovery::None, timer)?)?;
        Ok(Self {
            scheme: spec.scheme,
            timer,
            sim: RunMetrics::from_outcomes(&outcomes, timer, spec.seed)?,
            sim_baseline: RunMetrics::from_outcomes(&baseline_outcomes, timer, spec.seed)?,
            ode,
            ode_baseline,
            outcomes,
            baseline_outcomes,
        })
    }

    /// Largest `|mean I_sim(k) − I_ode(k)| / M` over the frames `0..=T`
    /// (the ODE is read as the left limit at `T`).
    pub fn sup_distance(&self) -> Result<f64> {
        let m = f64::from(self.ode.relay_population());
        let mut sup: f64 = 0.0;
        for f in &self.sim.frames {
            let i = self.ode.infected_at(f64::from(f.frame))?;
            sup = sup.max((f.mean_i - i).abs() / m);
        }
        Ok(sup)
    }

    pub fn csv(&self, params: &ValidatedParams) -> Result<String> {
        let mut out = preamble(params, Some(self.sim.seed));
        out.push_str(
            "frame,S_ode,I_ode,R_ode,P_ode,I_ode_none,mean_S,mean_I,mean_R,se_I,mean_I_none\n",
        );
        for (f, b) in self.sim.frames.iter().zip(&self.sim_baseline.frames) {
            let t = f64::from(f.frame);
            let s = self.ode.state_at(t)?;
            let i_none = self.ode_baseline.infected_at(t)?;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                f.frame,
                s.s,
                s.i,
                s.r,
                s.p,
                i_none,
                f.mean_s,
                f.mean_i,
                f.mean_r,
                opt(f.se_i),
                b.mean_i
            );
        }
        Ok(out)
    }
}

/// Timer sweep over both schemes for the P(T) and Q(T) figures.
pub fn figure_axis() -> TimerAxis {
    TimerAxis::new(5, 65, 5).expect("static axis")
}

fn series_csv(params: &ValidatedParams, seed: u64, rows: &[SweepRow], which: char) -> String {
    let mut out = preamble(params, Some(seed));
    let _ = writeln!(out, "T,scheme,{which}_T_ode,{which}_T_sim,{which}_T_sim_se");
    for r in rows {
        let (ode, sim, se) = match which {
            'P' => (r.p_ode, r.p_sim, r.p_sim_se),
            _ => (r.q_ode, r.q_sim, r.q_sim_se),
        };
        let _ = writeln!(out, "{},{},{ode},{sim},{}", r.timer, r.scheme, opt(se));
    }
    out
}

/// Paths of the files written by [`reproduce_figures`].
#[derive(Debug, Clone)]
pub struct FigureFiles {
    pub fig4: PathBuf,
    pub fig5: PathBuf,
    pub fig6: PathBuf,
    pub fig7: PathBuf,
    pub summary: PathBuf,
}

/// Writes fig4 (static dynamics, T=65), fig5 (mobile dynamics, T=18),
/// fig6/fig7 (P(T), Q(T) sweeps for both schemes) and a summary table.
pub fn reproduce_figures(
    params: &ValidatedParams,
    rounds: u32,
    seed: u64,
    out_dir: &Path,
) -> Result<FigureFiles> {
    fs::create_dir_all(out_dir)?;
    let axis = figure_axis();
    let static_fig = DynamicsFigure::compute(params, Scheme::Static, 65, rounds, seed)?;
    let mobile_fig = DynamicsFigure::compute(params, Scheme::Mobile, 18, rounds, seed)?;

    let mut rows = Vec::new();
    for scheme in [Scheme::Static, Scheme::Mobile] {
        let spec = ExperimentSpec::new(*params, scheme, axis, rounds, seed);
        if scheme == Scheme::Static && static_fig.timer >= axis.last() {
            rows.extend(sweep_rows_from(&spec, &static_fig.outcomes)?);
        } else {
            rows.extend(sweep_rows(&spec)?);
        }
    }

    let files = FigureFiles {
        fig4: out_dir.join("fig4_static_dynamics.csv"),
        fig5: out_dir.join("fig5_mobile_dynamics.csv"),
        fig6: out_dir.join("fig6_reception_probability.csv"),
        fig7: out_dir.join("fig7_buffer_occupancy.csv"),
        summary: out_dir.join("summary.csv"),
    };
    fs::write(&files.fig4, static_fig.csv(params)?)?;
    fs::write(&files.fig5, mobile_fig.csv(params)?)?;
    fs::write(&files.fig6, series_csv(params, seed, &rows, 'P'))?;
    fs::write(&files.fig7, series_csv(params, seed, &rows, 'Q'))?;

    let mut summary = preamble(params, Some(seed));
    summary.push_str("figure,scheme,T,P_T,Q_T,mean_T_D,rounds,seed,sup_distance\n");
    for (name, fig) in [("fig4", &static_fig), ("fig5", &mobile_fig)] {
        let m = &fig.sim;
        let _ = writeln!(
            summary,
            "{name},{},{},{},{},{},{},{},{}",
            fig.scheme,
            fig.timer,
            m.p_t,
            m.q_t,
            opt(m.mean_t_d),
            m.rounds,
            m.seed,
            fig.sup_distance()?
        );
    }
    fs::write(&files.summary, summary)?;
    Ok(files)
}
