use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::flooding::{step_flooding, FrameCounts};
use super::network::sample_network_retrying;
use super::SimConfig;
use crate::error::{Error, Result};

/// Independent stream for one round, derived from the master seed.
pub fn round_rng(seed: u64, round: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(round));
    rng
}

/// Per-frame compartment counts of one round. Index 0 is the deployment
/// (frame 0); index `k` is the state after frame `k`, before any timeout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundOutcome {
    pub susceptible: Vec<u32>,
    pub infected: Vec<u32>,
    pub recovered: Vec<u32>,
    pub delivered_at: Option<u32>,
    pub su_count: u32,
}

impl RoundOutcome {
    pub fn frames(&self) -> u32 {
        self.infected.len() as u32 - 1
    }

    fn push(&mut self, c: FrameCounts) {
        self.susceptible.push(c.susceptible);
        self.infected.push(c.infected);
        self.recovered.push(c.recovered);
    }
}

pub fn run_round(cfg: &SimConfig, round: u32) -> Result<RoundOutcome> {
    let mut rng = round_rng(cfg.seed, round);
    let mut snap = sample_network_retrying(cfg, &mut rng)?;
    let frames = cfg.timer as usize + 1;
    let mut out = RoundOutcome {
        susceptible: Vec::with_capacity(frames),
        infected: Vec::with_capacity(frames),
        recovered: Vec::with_capacity(frames),
        delivered_at: None,
        su_count: snap.su_count() as u32,
    };
    out.push(FrameCounts::of(&snap));
    while snap.clock < cfg.timer {
        let counts = step_flooding(&mut snap, cfg, &mut rng);
        out.push(counts);
    }
    out.delivered_at = snap.delivered_at;
    Ok(out)
}

/// All rounds in round order. Parallel and serial dispatch give identical
/// results because every round owns its own stream.
pub fn run_rounds(cfg: &SimConfig) -> Result<Vec<RoundOutcome>> {
    cfg.validate()?;
    #[cfg(feature = "parallel")]
    if cfg.parallel {
        use rayon::prelude::*;
        return (0..cfg.rounds)
            .into_par_iter()
            .map(|r| run_round(cfg, r))
            .collect();
    }
    (0..cfg.rounds).map(|r| run_round(cfg, r)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameStats {
    pub frame: u32,
    pub mean_s: f64,
    pub mean_i: f64,
    pub mean_r: f64,
    /// Standard error of `mean_i`; undefined for a single round.
    pub se_i: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub frames: Vec<FrameStats>,
    /// Fraction of rounds delivered by the horizon.
    pub p_t: f64,
    pub p_t_se: Option<f64>,
    /// Mean over rounds of `Σ_{k<T} I_k`.
    pub q_t: f64,
    pub q_t_se: Option<f64>,
    /// Mean delivery frame over delivered rounds.
    pub mean_t_d: Option<f64>,
    /// `delivery_histogram[k]` counts rounds first delivered in frame `k`.
    pub delivery_histogram: Vec<u32>,
    pub rounds: u32,
    pub seed: u64,
    pub horizon: u32,
}

fn mean_se(values: impl Iterator<Item = f64> + Clone) -> (f64, Option<f64>) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, None);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, None);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, Some((var / n as f64).sqrt()))
}

impl RunMetrics {
    /// Aggregates outcomes truncated at `horizon` frames. With hybrid
    /// recovery the dynamics before the timer do not depend on it, so one
    /// long run yields the metrics of every shorter timer.
    pub fn from_outcomes(outcomes: &[RoundOutcome], horizon: u32, seed: u64) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidArgument("no rounds to aggregate".into()));
        }
        if let Some(short) = outcomes.iter().find(|o| o.frames() < horizon) {
            return Err(Error::InvalidArgument(format!(
                "round covers {} frames, horizon is {horizon}",
                short.frames()
            )));
        }
        let rounds = outcomes.len();
        let h = horizon as usize;
        let frames = (0..=h)
            .map(|k| {
                let (mean_i, se_i) =
                    mean_se(outcomes.iter().map(move |o| f64::from(o.infected[k])));
                let avg = |f: fn(&RoundOutcome) -> &Vec<u32>| {
                    outcomes.iter().map(|o| f64::from(f(o)[k])).sum::<f64>() / rounds as f64
                };
                FrameStats {
                    frame: k as u32,
                    mean_s: avg(|o| &o.susceptible),
                    mean_i,
                    mean_r: avg(|o| &o.recovered),
                    se_i,
                }
            })
            .collect();
        let delivered = |o: &RoundOutcome| o.delivered_at.is_some_and(|d| d <= horizon);
        let (p_t, p_t_se) = mean_se(
            outcomes
                .iter()
                .map(move |o| f64::from(u8::from(delivered(o)))),
        );
        let (q_t, q_t_se) = mean_se(
            outcomes
                .iter()
                .map(move |o| o.infected[..h].iter().map(|&i| f64::from(i)).sum::<f64>()),
        );
        let mut delivery_histogram = vec![0u32; h + 1];
        let mut t_d_sum = 0.0;
        let mut t_d_count = 0u32;
        for o in outcomes {
            if let Some(d) = o.delivered_at.filter(|&d| d <= horizon) {
                delivery_histogram[d as usize] += 1;
                t_d_sum += f64::from(d);
                t_d_count += 1;
            }
        }
        Ok(Self {
            frames,
            p_t,
            p_t_se,
            q_t,
            q_t_se,
            mean_t_d: (t_d_count > 0).then(|| t_d_sum / f64::from(t_d_count)),
            delivery_histogram,
            rounds: rounds as u32,
            seed,
            horizon,
        })
    }
}

pub fn run(cfg: &SimConfig) -> Result<RunMetrics> {
    let outcomes = run_rounds(cfg)?;
    RunMetrics::from_outcomes(&outcomes, cfg.timer, cfg.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidemic::{Recovery, Scheme};
    use crate::params::SystemParams;

    fn cfg(scheme: Scheme, timer: u32, rounds: u32) -> SimConfig {
        let p = SystemParams::reference().validate().unwrap();
        SimConfig::new(p, scheme, Recovery::HybridVaccineTimeout, timer, rounds, 42).unwrap()
    }

    #[test]
    fn same_seed_same_metrics() {
        let mut c = cfg(Scheme::Mobile, 12, 6);
        let a = run(&c).unwrap();
        c.parallel = false;
        let b = run(&c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_round_has_undefined_errors() {
        let m = run(&cfg(Scheme::Static, 5, 1)).unwrap();
        assert_eq!(m.rounds, 1);
        assert!(m.p_t_se.is_none() && m.q_t_se.is_none());
        assert!(m.frames.iter().all(|f| f.se_i.is_none()));
    }

    #[test]
    fn accounting_holds_every_frame() {
        let c = cfg(Scheme::Static, 20, 3);
        for r in 0..3 {
            let o = run_round(&c, r).unwrap();
            assert_eq!(o.frames(), 20);
            for k in 0..=20 {
                assert_eq!(
                    o.susceptible[k] + o.infected[k] + o.recovered[k],
                    o.su_count
                );
            }
            assert_eq!(o.infected[0], 1);
        }
    }

    #[test]
    fn truncated_metrics_are_monotone() {
        let c = cfg(Scheme::Static, 30, 8);
        let outcomes = run_rounds(&c).unwrap();
        let mut last = (0.0, 0.0);
        for t in 1..=30 {
            let m = RunMetrics::from_outcomes(&outcomes, t, c.seed).unwrap();
            assert!(m.p_t >= last.0 && m.q_t >= last.1);
            last = (m.p_t, m.q_t);
        }
        assert!(RunMetrics::from_outcomes(&outcomes, 31, c.seed).is_err());
    }
}
