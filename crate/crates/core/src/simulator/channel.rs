//! Power-law path loss with unit-mean Rayleigh (exponential power) fading.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::network::{NetworkSnapshot, NodeRef, Point};
use super::D_MIN;
use crate::params::ValidatedParams;

/// Noise-only success probability below which a link is treated as dead:
/// `exp(-34.5) ≈ 1e-15`.
const DEAD_LINK_EXPONENT: f64 = 34.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub p_su: f64,
    pub p_pt: f64,
    pub noise: f64,
    pub alpha: f64,
    pub eta_su: f64,
    pub eta_pr: f64,
}

impl Channel {
    pub fn new(p: &ValidatedParams) -> Self {
        Self {
            p_su: p.p_su,
            p_pt: p.p_pt,
            noise: p.noise,
            alpha: p.alpha,
            eta_su: p.eta_su,
            eta_pr: p.eta_pr,
        }
    }

    /// `d^{-α}` from a squared distance, with `d >= D_MIN`.
    #[inline]
    pub fn path_gain(&self, d2: f64) -> f64 {
        let d2 = d2.max(D_MIN * D_MIN);
        if self.alpha == 4.0 {
            1.0 / (d2 * d2)
        } else {
            d2.powf(-self.alpha / 2.0)
        }
    }

    #[inline]
    pub fn decodes(&self, signal: f64, interference: f64, threshold: f64) -> bool {
        signal >= threshold * (self.noise + interference)
    }

    /// SU-to-SU distance beyond which even an interference-free link succeeds
    /// with probability below 1e-15.
    pub fn su_reach(&self) -> f64 {
        (DEAD_LINK_EXPONENT * self.p_su / (self.eta_su * self.noise)).powf(1.0 / self.alpha)
    }

    fn tx_power(&self, node: NodeRef) -> f64 {
        match node {
            NodeRef::Su(_) => self.p_su,
            NodeRef::Pt(_) => self.p_pt,
            NodeRef::Pr(_) => panic!("primary receivers do not transmit"),
        }
    }

    fn threshold(&self, node: NodeRef) -> f64 {
        match node {
            NodeRef::Su(_) => self.eta_su,
            NodeRef::Pr(_) => self.eta_pr,
            NodeRef::Pt(_) => panic!("primary transmitters do not receive"),
        }
    }
}

/// Decides one link in the current slot. Fading is drawn independently for
/// the link of interest and for every interferer: all transmitting SUs other
/// than `tx` and all PTs other than `tx`.
pub fn attempt_reception(
    tx: NodeRef,
    rx: NodeRef,
    snapshot: &NetworkSnapshot,
    channel: &Channel,
    vaccine: bool,
    rng: &mut impl Rng,
) -> bool {
    let at = snapshot.position(rx);
    let fade = |rng: &mut _| -> f64 { Exp1.sample(rng) };
    let signal =
        fade(rng) * channel.tx_power(tx) * channel.path_gain(snapshot.position(tx).dist2(at));
    let mut interference = 0.0;
    for k in 0..snapshot.su_count() {
        if tx == NodeRef::Su(k) || rx == NodeRef::Su(k) || !snapshot.is_transmitting(k, vaccine) {
            continue;
        }
        interference +=
            fade(rng) * channel.p_su * channel.path_gain(snapshot.su_positions[k].dist2(at));
    }
    for (k, pt) in snapshot.pt_positions.iter().enumerate() {
        if tx == NodeRef::Pt(k) {
            continue;
        }
        interference += fade(rng) * channel.p_pt * channel.path_gain(pt.dist2(at));
    }
    channel.decodes(signal, interference, channel.threshold(rx))
}

pub(crate) fn uniform_in_disk(rng: &mut impl Rng, center: Point, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    center.offset(r, rng.random::<f64>() * TAU)
}

/// Empirical success rate of an isolated SU link of length `distance`, with
/// PT interference from a Poisson field over a disk of `field_radius` around
/// the receiver and no other SUs.
pub fn link_success_rate(
    params: &ValidatedParams,
    distance: f64,
    trials: u32,
    field_radius: f64,
    rng: &mut impl Rng,
) -> f64 {
    let channel = Channel::new(params);
    let mean_pts = params.lambda_pt * std::f64::consts::PI * field_radius * field_radius;
    let origin = Point::default();
    let mut successes = 0u32;
    for _ in 0..trials {
        let n_pt = if mean_pts > 0.0 {
            Poisson::new(mean_pts).expect("finite mean").sample(rng) as usize
        } else {
            0
        };
        let pts: Vec<Point> = (0..n_pt)
            .map(|_| uniform_in_disk(rng, origin, field_radius))
            .collect();
        let prs = pts
            .iter()
            .map(|p| p.offset(params.r_pt, rng.random::<f64>() * TAU))
            .collect();
        let mut snap =
            NetworkSnapshot::from_positions(pts, prs, vec![Point::new(distance, 0.0), origin]);
        snap.active[0] = true;
        if attempt_reception(NodeRef::Su(0), NodeRef::Su(1), &snap, &channel, false, rng) {
            successes += 1;
        }
    }
    f64::from(successes) / f64::from(trials)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParams;
    use crate::spectrum::link_success_probability;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reference() -> ValidatedParams {
        SystemParams::reference().validate().unwrap()
    }

    #[test]
    fn path_gain_is_clamped() {
        let ch = Channel::new(&reference());
        assert_eq!(ch.path_gain(0.0), ch.path_gain(D_MIN * D_MIN));
        assert!((ch.path_gain(0.0) - 1e4).abs() < 1e-9);
        assert!((ch.path_gain(100.0) - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn noise_limited_unit_fading_decodes_at_short_range() {
        let ch = Channel::new(&reference());
        // P_SU d^-4 / N >= 3 holds for d below ~76 m.
        let d2: f64 = 50.0 * 50.0;
        assert!(ch.decodes(ch.p_su * ch.path_gain(d2), 0.0, ch.eta_su));
        let far: f64 = 100.0 * 100.0;
        assert!(!ch.decodes(ch.p_su * ch.path_gain(far), 0.0, ch.eta_su));
    }

    #[test]
    fn reach_bounds_noise_only_success() {
        let ch = Channel::new(&reference());
        let r = ch.su_reach();
        let p = (-ch.eta_su * ch.noise * r.powf(4.0) / ch.p_su).exp();
        assert!((p - (-DEAD_LINK_EXPONENT).exp()).abs() < 1e-20);
    }

    #[test]
    fn isolated_link_matches_noise_only_closed_form() {
        let p = reference().with(|p| p.lambda_pt = 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rate = link_success_rate(&p, 60.0, 20_000, 400.0, &mut rng);
        let expected = link_success_probability(&p, 60.0);
        assert!((rate - expected).abs() < 0.02, "{rate} vs {expected}");
    }

    #[test]
    fn interferers_exclude_link_endpoints() {
        let p = reference();
        let ch = Channel::new(&p);
        // Two SUs, both transmitting, and no PTs: the receiver's own activity
        // must not count as interference, so the short link always decodes
        // when the fading is not tiny.
        let mut snap = NetworkSnapshot::from_positions(
            vec![],
            vec![],
            vec![Point::new(1.0, 0.0), Point::new(0.0, 0.0)],
        );
        snap.active = vec![true, true];
        snap.states[1] = super::super::NodeState::Infected;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ok = (0..1000)
            .filter(|_| {
                attempt_reception(NodeRef::Su(0), NodeRef::Su(1), &snap, &ch, false, &mut rng)
            })
            .count();
        assert!(ok > 990, "{ok}");
    }
}
