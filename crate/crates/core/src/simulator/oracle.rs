//! Monte Carlo check of the primary receiver's outage constraint.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::channel::{uniform_in_disk, Channel};
use super::network::Point;
use crate::error::{Error, Result};
use crate::params::ValidatedParams;
use crate::spectrum;

/// How the secondary field around the typical PR is thinned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Thinning {
    /// No SUs at all; only PT interference.
    NoSecondary,
    /// Every SU accesses independently with probability p̃, no avoidance.
    Permissible,
    /// SUs outside every avoidance disk access with probability p̂.
    Avoidance,
}

pub const MIN_ORACLE_TRIALS: u32 = 10_000;

fn poisson(rng: &mut impl Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite mean").sample(rng) as usize
}

/// Outage fraction at a typical PR placed at the centre of a disk of radius
/// `region_side / 2`. Each trial draws fresh PT and SU fields over the disk.
pub fn pr_outage_oracle(
    params: &ValidatedParams,
    thinning: Thinning,
    trials: u32,
    rng: &mut impl Rng,
) -> Result<f64> {
    if trials < MIN_ORACLE_TRIALS {
        return Err(Error::InvalidArgument(format!(
            "outage oracle needs at least {MIN_ORACLE_TRIALS} trials, got {trials}"
        )));
    }
    let access = match thinning {
        Thinning::NoSecondary => 0.0,
        Thinning::Permissible => spectrum::permissible_density(params)?.p_tilde,
        Thinning::Avoidance => spectrum::derive(params)?.p_hat,
    };
    let channel = Channel::new(params);
    let radius = params.region_side / 2.0;
    let area = PI * radius * radius;
    let avoid2 = (params.rho * params.r_pt).powi(2);
    let origin = Point::default();
    let signal_gain = channel.p_pt * channel.path_gain(params.r_pt * params.r_pt);
    let mut other_prs = Vec::new();
    let mut outages = 0u32;

    for _ in 0..trials {
        let mut interference = 0.0;
        other_prs.clear();
        for _ in 0..poisson(rng, params.lambda_pt * area) {
            let pt = uniform_in_disk(rng, origin, radius);
            let g: f64 = Exp1.sample(rng);
            interference += g * channel.p_pt * channel.path_gain(pt.dist2(origin));
            if thinning == Thinning::Avoidance {
                other_prs.push(pt.offset(params.r_pt, rng.random::<f64>() * TAU));
            }
        }
        if thinning != Thinning::NoSecondary {
            for _ in 0..poisson(rng, params.lambda_su * area) {
                let su = uniform_in_disk(rng, origin, radius);
                let coin = rng.random::<f64>();
                let silenced = thinning == Thinning::Avoidance
                    && (su.dist2(origin) < avoid2
                        || other_prs.iter().any(|pr| pr.dist2(su) < avoid2));
                if silenced || coin >= access {
                    continue;
                }
                let g: f64 = Exp1.sample(rng);
                interference += g * channel.p_su * channel.path_gain(su.dist2(origin));
            }
        }
        let g: f64 = Exp1.sample(rng);
        if !channel.decodes(g * signal_gain, interference, channel.eta_pr) {
            outages += 1;
        }
    }
    Ok(f64::from(outages) / f64::from(trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noise_only_outage_matches_closed_form() {
        let p = SystemParams {
            lambda_pt: 0.0,
            ..SystemParams::reference()
        }
        .validate()
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let out = pr_outage_oracle(&p, Thinning::NoSecondary, 200_000, &mut rng).unwrap();
        let expected = p.noise_only_pr_outage();
        assert!((out - expected).abs() < 0.005, "{out} vs {expected}");
    }

    #[test]
    fn permissible_thinning_meets_target() {
        let p = SystemParams::reference().validate().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let out = pr_outage_oracle(&p, Thinning::Permissible, 20_000, &mut rng).unwrap();
        assert!((out - p.eps_pr).abs() < 0.01, "{out}");
    }

    #[test]
    fn avoidance_keeps_receivers_protected() {
        let p = SystemParams::reference().validate().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let out = pr_outage_oracle(&p, Thinning::Avoidance, 20_000, &mut rng).unwrap();
        assert!(out <= p.eps_pr + 0.015, "{out}");
    }

    #[test]
    fn rejects_too_few_trials() {
        let p = SystemParams::reference().validate().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(pr_outage_oracle(&p, Thinning::Permissible, 100, &mut rng).is_err());
    }
}
