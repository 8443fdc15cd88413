//! Stochastic-geometry access quantities for the secondary network.
//!
//! Secondary users (SUs) share spectrum with a Poisson field of primary
//! transmitter/receiver pairs (PT/PR). Slotted ALOHA with access probability
//! `p̃` keeps the PR outage at `eps_pr`; silencing SUs inside an avoidance
//! disk around each PR lets the rest transmit with a larger `p̂`.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::numeric;
use crate::params::ValidatedParams;

/// Derived access quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumDerived {
    /// Permissible active SU density λ̃_SU (nodes/m²).
    pub lambda_tilde: f64,
    /// σ with λ̃_SU = σ · P_SU^{-δ}.
    pub sigma: f64,
    pub p_tilde: f64,
    /// λ̂_SU / λ̃_SU.
    pub avoidance_gain: f64,
    /// Avoidance-enhanced active density λ̂_SU (nodes/m²).
    pub lambda_hat: f64,
    pub p_hat: f64,
    /// Mean neighbours per SU.
    pub beta: f64,
    /// β = k₅ √P_SU at α = 4.
    pub k5: f64,
    /// Effective active neighbours β·p̂.
    pub beta_p_hat: f64,
    /// Set when p̃ or p̂ had to be clamped to 1.
    pub clamped: bool,
}

impl SpectrumDerived {
    /// `(name, value)` rows in a stable order, for CSV output.
    pub fn rows(&self) -> [(&'static str, f64); 9] {
        [
            ("lambda_tilde", self.lambda_tilde),
            ("sigma", self.sigma),
            ("p_tilde", self.p_tilde),
            ("avoidance_gain", self.avoidance_gain),
            ("lambda_hat", self.lambda_hat),
            ("p_hat", self.p_hat),
            ("beta", self.beta),
            ("k5", self.k5),
            ("beta_p_hat", self.beta_p_hat),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermissibleDensity {
    pub lambda_tilde: f64,
    pub sigma: f64,
    pub p_tilde: f64,
    pub clamped: bool,
}

/// The bracket `(-ln(1-ε_PR) - η_PR N r^α / P_PT) / (r² η_PR^δ K_α) - λ_PT`,
/// i.e. the PR's spare interference budget expressed as a PT-equivalent density.
fn spare_primary_budget(p: &ValidatedParams) -> f64 {
    let pl = p.pathloss();
    let numerator = -(-p.eps_pr).ln_1p() - p.pr_noise_exponent();
    numerator / (p.r_pt * p.r_pt * p.eta_pr.powf(pl.delta) * pl.k_alpha) - p.lambda_pt
}

/// Permissible active SU density under the PR outage constraint.
pub fn permissible_density(p: &ValidatedParams) -> Result<PermissibleDensity> {
    let delta = p.pathloss().delta;
    let mut budget = spare_primary_budget(p);
    // Absorb round-off at the exact feasibility boundary.
    if budget < 0.0 && budget.abs() <= 1e-12 * p.lambda_pt.max(f64::MIN_POSITIVE) {
        budget = 0.0;
    }
    if budget < 0.0 {
        return Err(Error::Infeasible(format!(
            "primary outage constraint eps_pr = {} cannot be met even without SUs",
            p.eps_pr
        )));
    }
    let sigma = budget * p.p_pt.powf(delta);
    let raw = sigma * p.p_su.powf(-delta);
    let clamped = raw > p.lambda_su;
    let lambda_tilde = raw.min(p.lambda_su);
    Ok(PermissibleDensity {
        lambda_tilde,
        sigma,
        p_tilde: lambda_tilde / p.lambda_su,
        clamped,
    })
}

/// `sqrt(P_PT / (η_PR P_SU)) · ρ²`.
fn avoidance_arg(p: &ValidatedParams) -> f64 {
    (p.p_pt / (p.eta_pr * p.p_su)).sqrt() * p.rho * p.rho
}

fn require_alpha4(p: &ValidatedParams) -> Result<()> {
    if (p.alpha - 4.0).abs() > 1e-12 {
        return Err(Error::AlphaUnsupported(p.alpha));
    }
    Ok(())
}

/// λ̂_SU / λ̃_SU = (π/2) / (π/2 − arctan(√(P_PT/(η_PR P_SU)) ρ²)), α = 4.
pub fn avoidance_gain(p: &ValidatedParams) -> Result<f64> {
    require_alpha4(p)?;
    let denom = FRAC_PI_2 - avoidance_arg(p).atan();
    if denom <= 0.0 {
        return Err(Error::ArgOutOfDomain);
    }
    Ok(FRAC_PI_2 / denom)
}

/// Alternate form of the avoidance gain as it falls out of the interference
/// Laplace transform: `exp(λ_PT π ρ²) · (π²/2) / (π²/2 − arctan(√(P_PT/(η_PR P_SU)) ρ²/r_PT²))`.
/// Exposed for comparison only; nothing downstream consumes it.
pub fn avoidance_gain_laplace_form(p: &ValidatedParams) -> Result<f64> {
    require_alpha4(p)?;
    let half_pi_sq = PI * PI / 2.0;
    let denom = half_pi_sq - (avoidance_arg(p) / (p.r_pt * p.r_pt)).atan();
    if denom <= 0.0 {
        return Err(Error::ArgOutOfDomain);
    }
    Ok((p.lambda_pt * PI * p.rho * p.rho).exp() * half_pi_sq / denom)
}

/// Probability that an SU at distance `r` decodes a transmitter under PT
/// interference and noise only:
/// `exp(-η_SU N r^α / P_SU − λ_PT (P_PT/P_SU)^δ η_SU^δ K_α r²)`.
pub fn link_success_probability(p: &ValidatedParams, r: f64) -> f64 {
    let (a, b) = neighbour_coefficients(p);
    (-a * r.powf(p.alpha) - b * r * r).exp()
}

fn neighbour_coefficients(p: &ValidatedParams) -> (f64, f64) {
    let pl = p.pathloss();
    let a = p.eta_su * p.noise / p.p_su;
    let b = p.lambda_pt * (p.p_pt / p.p_su).powf(pl.delta) * p.eta_su.powf(pl.delta) * pl.k_alpha;
    (a, b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanNeighbors {
    pub beta: f64,
    /// Present only for α = 4, where β = k₅ √P_SU.
    pub k5: Option<f64>,
}

/// k₅ = (λ_SU π/2) √(π/(η_SU N)) · exp(λ_PT² P_PT π⁴ / (16 N)) · erfc(λ_PT √P_PT π² / (4 √N)).
pub fn k5(p: &ValidatedParams) -> Result<f64> {
    require_alpha4(p)?;
    let pi2 = PI * PI;
    let lead = p.lambda_su * FRAC_PI_2 * (PI / (p.eta_su * p.noise)).sqrt();
    let exponent = p.lambda_pt * p.lambda_pt * p.p_pt * pi2 * pi2 / (16.0 * p.noise);
    let arg = p.lambda_pt * p.p_pt.sqrt() * pi2 / (4.0 * p.noise.sqrt());
    let tail = if exponent > 700.0 {
        // exp(x²)·erfc(x) ~ 1/(x√π) once exp overflows.
        1.0 / (arg * PI.sqrt())
    } else {
        exponent.exp() * numeric::erfc(arg)
    };
    Ok(lead * tail)
}

/// Mean neighbour count by direct quadrature of
/// `λ_SU ∫_0^∞ P(success at r) 2πr dr`, valid for any α > 2.
pub fn mean_neighbors_quadrature(p: &ValidatedParams) -> Result<f64> {
    let (a, b) = neighbour_coefficients(p);
    let alpha = p.alpha;
    // Characteristic range: where either exponent reaches 1.
    let mut scale = a.powf(-1.0 / alpha);
    if b > 0.0 {
        scale = scale.min(b.powf(-0.5));
    }
    let integral = numeric::integrate_semi_infinite(
        |r| (-a * r.powf(alpha) - b * r * r).exp() * 2.0 * PI * r,
        scale,
        1e-10,
    )?;
    Ok(p.lambda_su * integral)
}

/// β from the closed form at α = 4, otherwise by quadrature.
pub fn mean_neighbors(p: &ValidatedParams) -> Result<MeanNeighbors> {
    if (p.alpha - 4.0).abs() <= 1e-12 {
        let k5 = k5(p)?;
        Ok(MeanNeighbors {
            beta: k5 * p.p_su.sqrt(),
            k5: Some(k5),
        })
    } else {
        Ok(MeanNeighbors {
            beta: mean_neighbors_quadrature(p)?,
            k5: None,
        })
    }
}

/// βp̂ = σ k₅ π / (2 λ_SU [π/2 − arctan(√(P_PT/(η_PR P_SU)) ρ²)]), α = 4.
pub fn effective_neighbor_rate(p: &ValidatedParams) -> Result<f64> {
    require_alpha4(p)?;
    let sigma = permissible_density(p)?.sigma;
    let k5 = k5(p)?;
    let denom = FRAC_PI_2 - avoidance_arg(p).atan();
    if denom <= 0.0 {
        return Err(Error::ArgOutOfDomain);
    }
    Ok(sigma * k5 * PI / (2.0 * p.lambda_su * denom))
}

/// All derived quantities at α = 4.
pub fn derive(p: &ValidatedParams) -> Result<SpectrumDerived> {
    let dens = permissible_density(p)?;
    let gain = avoidance_gain(p)?;
    let nb = mean_neighbors(p)?;
    let raw_hat = dens.lambda_tilde * gain;
    let hat_clamped = raw_hat > p.lambda_su;
    let lambda_hat = raw_hat.min(p.lambda_su);
    let p_hat = lambda_hat / p.lambda_su;
    Ok(SpectrumDerived {
        lambda_tilde: dens.lambda_tilde,
        sigma: dens.sigma,
        p_tilde: dens.p_tilde,
        avoidance_gain: gain,
        lambda_hat,
        p_hat,
        beta: nb.beta,
        k5: nb.k5.unwrap_or(f64::NAN),
        beta_p_hat: nb.beta * p_hat,
        clamped: dens.clamped || hat_clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParams;
    use proptest::prelude::*;

    fn reference() -> ValidatedParams {
        SystemParams::reference().validate().unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // Reference values below were evaluated independently at 30 digits.
    const LAMBDA_TILDE: f64 = 2.841_996_704_468_960_4e-5;
    const GAIN: f64 = 6.411_971_992_766_762;
    const K5: f64 = 33.290_317_795_458_185;
    const BETA: f64 = 10.527_322_826_448_327;
    const BETA_P_HAT: f64 = 1.918_373_328_534_183_3;

    #[test]
    fn reference_permissible_density() {
        let d = permissible_density(&reference()).unwrap();
        assert!(rel(d.lambda_tilde, LAMBDA_TILDE) < 1e-12);
        assert!(rel(d.p_tilde, 0.028_419_967_044_689_604) < 1e-12);
        assert!(!d.clamped);
    }

    #[test]
    fn boundary_budget_gives_zero_density() {
        let p = SystemParams::reference();
        let pl = crate::params::PathlossConstants::new(p.alpha);
        let exponent = p.pr_noise_exponent()
            + p.lambda_pt * p.r_pt * p.r_pt * p.eta_pr.powf(pl.delta) * pl.k_alpha;
        let eps_pr = -(-exponent).exp_m1();
        let v = SystemParams { eps_pr, ..p }.validate().unwrap();
        let d = permissible_density(&v).unwrap();
        assert!(d.lambda_tilde.abs() < 1e-17, "{}", d.lambda_tilde);
        let tighter = SystemParams {
            eps_pr: eps_pr * 0.99,
            ..p
        }
        .validate()
        .unwrap();
        assert!(matches!(
            permissible_density(&tighter),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn removing_primary_interference_adds_density() {
        let base = reference();
        let free = base.with(|p| p.lambda_pt = 0.0).unwrap();
        let diff = permissible_density(&free).unwrap().lambda_tilde
            - permissible_density(&base).unwrap().lambda_tilde;
        let expected = 1e-5 * 3f64.sqrt();
        assert!(rel(diff, expected) < 1e-12, "{diff} vs {expected}");
    }

    #[test]
    fn reference_avoidance_gain() {
        assert!(rel(avoidance_gain(&reference()).unwrap(), GAIN) < 1e-13);
    }

    #[test]
    fn zero_radius_gives_unit_gain() {
        let p = reference().with(|p| p.rho = 0.0).unwrap();
        assert_eq!(avoidance_gain(&p).unwrap(), 1.0);
        let d = derive(&p).unwrap();
        assert!(rel(effective_neighbor_rate(&p).unwrap(), d.beta * d.p_tilde) < 1e-12);
    }

    #[test]
    fn avoidance_gain_rejects_other_alpha() {
        let p = reference().with(|p| p.alpha = 3.5).unwrap();
        assert_eq!(avoidance_gain(&p), Err(Error::AlphaUnsupported(3.5)));
    }

    #[test]
    fn laplace_form_reduces_to_one_without_avoidance() {
        let p = reference().with(|p| p.rho = 0.0).unwrap();
        assert_eq!(avoidance_gain_laplace_form(&p).unwrap(), 1.0);
        // With ρ² scaled by r_PT² it is much closer to 1 than the canonical form.
        let g = avoidance_gain_laplace_form(&reference()).unwrap();
        assert!(g > 1.0 && g < 1.01, "{g}");
    }

    #[test]
    fn reference_mean_neighbors() {
        let nb = mean_neighbors(&reference()).unwrap();
        assert!(rel(nb.k5.unwrap(), K5) < 1e-12);
        assert!(rel(nb.beta, BETA) < 1e-12);
        let quad = mean_neighbors_quadrature(&reference()).unwrap();
        assert!(rel(quad, nb.beta) < 1e-6, "{quad} vs {}", nb.beta);
    }

    #[test]
    fn k5_without_primaries() {
        let p = reference().with(|p| p.lambda_pt = 0.0).unwrap();
        let expected = 1e-3 * FRAC_PI_2 * (PI / 3e-9).sqrt();
        assert!(rel(k5(&p).unwrap(), expected) < 1e-14);
    }

    #[test]
    fn general_alpha_uses_quadrature() {
        let p = reference().with(|p| p.alpha = 3.0).unwrap();
        let nb = mean_neighbors(&p).unwrap();
        assert!(nb.k5.is_none());
        assert!(nb.beta > 0.0);
    }

    #[test]
    fn reference_effective_rate() {
        let p = reference();
        let closed = effective_neighbor_rate(&p).unwrap();
        let d = derive(&p).unwrap();
        assert!(rel(closed, BETA_P_HAT) < 1e-12);
        assert!(rel(closed, d.beta * d.p_hat) < 1e-9);
        assert!(rel(d.beta_p_hat, d.beta * d.lambda_hat / p.lambda_su) < 1e-12);
    }

    #[test]
    fn link_success_reference_points() {
        let p = reference();
        for (r, expected) in [
            (10.0, 0.985_009_092_782_256_5),
            (40.0, 0.730_759_769_728_516),
            (80.0, 0.113_462_598_783_310_85),
        ] {
            assert!(rel(link_success_probability(&p, r), expected) < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn gain_at_least_one_and_increasing(rho in 0.0f64..10.0, drho in 1e-3f64..1.0) {
            let p = reference().with(|p| p.rho = rho).unwrap();
            let q = reference().with(|p| p.rho = rho + drho).unwrap();
            let g = avoidance_gain(&p).unwrap();
            prop_assert!(g >= 1.0);
            prop_assert!(avoidance_gain(&q).unwrap() > g);
        }

        #[test]
        fn closed_form_matches_quadrature(
            lambda_pt in 0.0f64..3e-5,
            p_su in 0.01f64..1.0,
            noise in 1e-10f64..1e-8,
            eta_su in 1.0f64..10.0,
        ) {
            let p = reference().with(|p| {
                p.lambda_pt = lambda_pt;
                p.p_su = p_su;
                p.noise = noise;
                p.eta_su = eta_su;
            }).unwrap();
            let closed = mean_neighbors(&p).unwrap().beta;
            let quad = mean_neighbors_quadrature(&p).unwrap();
            prop_assert!(rel(closed, quad) < 1e-6, "{} vs {}", closed, quad);
        }

        #[test]
        fn beta_increases_with_power(p_su in 0.01f64..1.0) {
            let a = reference().with(|p| p.p_su = p_su).unwrap();
            let b = reference().with(|p| p.p_su = p_su * 1.1).unwrap();
            prop_assert!(mean_neighbors(&b).unwrap().beta > mean_neighbors(&a).unwrap().beta);
        }
    }
}
