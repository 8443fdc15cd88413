use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::channel::Channel;
use super::mobility::step_mobility;
use super::network::{NetworkSnapshot, NodeState};
use super::SimConfig;
use crate::epidemic::Scheme;

/// Compartment counts after one frame (before the timeout clears buffers).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameCounts {
    pub frame: u32,
    pub susceptible: u32,
    pub infected: u32,
    pub recovered: u32,
    pub delivered: bool,
}

impl FrameCounts {
    pub fn of(snapshot: &NetworkSnapshot) -> Self {
        let mut c = FrameCounts {
            frame: snapshot.clock,
            susceptible: 0,
            infected: 0,
            recovered: 0,
            delivered: snapshot.is_delivered(),
        };
        for s in &snapshot.states {
            match s {
                NodeState::Susceptible => c.susceptible += 1,
                NodeState::Infected => c.infected += 1,
                NodeState::Recovered => c.recovered += 1,
            }
        }
        c
    }
}

/// Slotted-ALOHA access for one slot: SUs inside an avoidance disk stay
/// silent; everyone else accesses with probability `p_hat`.
pub fn slot_activation(
    snapshot: &mut NetworkSnapshot,
    p_hat: f64,
    avoidance_radius: f64,
    rng: &mut impl Rng,
) {
    for k in 0..snapshot.su_count() {
        let coin = rng.random::<f64>();
        let silenced = snapshot.in_avoidance_region(snapshot.su_positions[k], avoidance_radius);
        snapshot.active[k] = !silenced && coin < p_hat;
    }
}

/// One frame: (mobility,) access, reception, state update, timeout.
///
/// Active infected SUs send the packet and, under vaccine recovery, active
/// recovered SUs send the antipacket. A silent SU decodes a copy if any
/// single transmitter clears the SINR threshold with every other concurrent
/// transmitter counted as interference. Antipackets win over packets.
pub fn step_flooding(
    snapshot: &mut NetworkSnapshot,
    cfg: &SimConfig,
    rng: &mut impl Rng,
) -> FrameCounts {
    if snapshot.clock >= cfg.timer {
        return FrameCounts::of(snapshot);
    }
    snapshot.clock += 1;
    let p = &cfg.params;
    if cfg.scheme == Scheme::Mobile {
        step_mobility(snapshot, &cfg.mobility, p.region_side, rng);
    }
    slot_activation(snapshot, cfg.p_hat, cfg.avoidance_radius(), rng);

    let channel: Channel = cfg.channel();
    let vaccine = cfg.recovery.has_vaccine();
    let n = snapshot.su_count();
    let mut packet_tx = Vec::new();
    let mut anti_tx = Vec::new();
    let transmitting: Vec<bool> = (0..n)
        .map(|k| snapshot.is_transmitting(k, vaccine))
        .collect();
    for k in (0..n).filter(|&k| transmitting[k]) {
        match snapshot.states[k] {
            NodeState::Infected => packet_tx.push(k),
            _ => anti_tx.push(k),
        }
    }

    let reach2 = channel.su_reach().powi(2);
    let pos = &snapshot.su_positions;
    let mut packet_terms = Vec::with_capacity(packet_tx.len());
    let mut anti_terms = Vec::with_capacity(anti_tx.len());
    let mut next = snapshot.states.clone();
    let fade = |rng: &mut _| -> f64 { Exp1.sample(rng) };

    for rx in 0..n {
        if transmitting[rx] {
            continue;
        }
        let state = snapshot.states[rx];
        let is_dest = rx == snapshot.destination;
        let wants_packet = state == NodeState::Susceptible && !(is_dest && snapshot.is_delivered());
        let wants_anti = vaccine && state != NodeState::Recovered;
        let here = pos[rx];
        let near_packet = wants_packet && packet_tx.iter().any(|&k| pos[k].dist2(here) < reach2);
        let near_anti = wants_anti && anti_tx.iter().any(|&k| pos[k].dist2(here) < reach2);
        if !near_packet && !near_anti {
            continue;
        }

        let pt_sum: f64 = snapshot
            .pt_positions
            .iter()
            .map(|pt| fade(rng) * channel.p_pt * channel.path_gain(pt.dist2(here)))
            .sum();
        packet_terms.clear();
        anti_terms.clear();
        for &k in &packet_tx {
            packet_terms.push(fade(rng) * channel.p_su * channel.path_gain(pos[k].dist2(here)));
        }
        for &k in &anti_tx {
            anti_terms.push(fade(rng) * channel.p_su * channel.path_gain(pos[k].dist2(here)));
        }
        let packet_sum: f64 = packet_terms.iter().sum();
        let anti_sum: f64 = anti_terms.iter().sum();
        let (packet_field, anti_field) = if cfg.antipacket_interference {
            let all = packet_sum + anti_sum + pt_sum;
            (all, all)
        } else {
            (packet_sum + pt_sum, anti_sum + pt_sum)
        };
        let got_packet = near_packet
            && packet_terms
                .iter()
                .any(|&s| channel.decodes(s, packet_field - s, channel.eta_su));
        let got_anti = near_anti
            && anti_terms
                .iter()
                .any(|&s| channel.decodes(s, anti_field - s, channel.eta_su));

        if is_dest {
            // The destination never relays; once served it originates antipackets.
            if got_packet && !snapshot.is_delivered() {
                snapshot.delivered_at = Some(snapshot.clock);
                if vaccine {
                    next[rx] = NodeState::Recovered;
                }
            }
            continue;
        }
        if got_anti {
            next[rx] = NodeState::Recovered;
        } else if got_packet {
            next[rx] = NodeState::Infected;
        }
    }
    snapshot.states = next;

    let counts = FrameCounts::of(snapshot);
    if snapshot.clock == cfg.timer && cfg.recovery.has_timeout() {
        for s in snapshot.states.iter_mut() {
            if *s == NodeState::Infected {
                *s = NodeState::Recovered;
            }
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidemic::Recovery;
    use crate::params::SystemParams;
    use crate::simulator::network::Point;
    use crate::simulator::{sample_network, SimConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(recovery: Recovery) -> SimConfig {
        let p = SystemParams::reference().validate().unwrap();
        SimConfig::new(p, Scheme::Static, recovery, 65, 1, 7).unwrap()
    }

    #[test]
    fn full_avoidance_silences_everyone() {
        let mut c = cfg(Recovery::HybridVaccineTimeout);
        c.params = c.params.with(|p| p.rho = 200.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut snap = loop {
            let s = sample_network(&c, &mut rng).unwrap();
            if !s.pr_positions.is_empty() {
                break s;
            }
        };
        slot_activation(&mut snap, 1.0, c.avoidance_radius(), &mut rng);
        assert!(snap.active.iter().all(|a| !a));
    }

    #[test]
    fn certain_access_without_avoidance() {
        let c = cfg(Recovery::HybridVaccineTimeout);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut snap = sample_network(&c, &mut rng).unwrap();
        slot_activation(&mut snap, 1.0, 0.0, &mut rng);
        assert!(snap.active.iter().all(|&a| a));
    }

    #[test]
    fn access_rate_matches_p_hat() {
        let c = cfg(Recovery::HybridVaccineTimeout);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut snap = sample_network(&c, &mut rng).unwrap();
        let radius = c.avoidance_radius();
        let eligible: Vec<usize> = (0..snap.su_count())
            .filter(|&k| !snap.in_avoidance_region(snap.su_positions[k], radius))
            .collect();
        let mut on = 0usize;
        let slots = 20_000 / eligible.len().max(1) + 1;
        let mut draws = 0usize;
        for _ in 0..slots {
            slot_activation(&mut snap, c.p_hat, radius, &mut rng);
            on += eligible.iter().filter(|&&k| snap.active[k]).count();
            draws += eligible.len();
        }
        let rate = on as f64 / draws as f64;
        assert!((rate - c.p_hat).abs() < 0.01, "{rate} vs {}", c.p_hat);
    }

    #[test]
    fn no_recovery_never_recovers_before_timer() {
        let c = cfg(Recovery::None);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut snap = sample_network(&c, &mut rng).unwrap();
        let total = snap.su_count() as u32;
        for _ in 0..c.timer {
            let counts = step_flooding(&mut snap, &c, &mut rng);
            assert_eq!(counts.recovered, 0);
            assert_eq!(
                counts.susceptible + counts.infected + counts.recovered,
                total
            );
        }
    }

    #[test]
    fn transitions_respect_state_machine() {
        let c = cfg(Recovery::HybridVaccineTimeout);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut snap = sample_network(&c, &mut rng).unwrap();
        let mut delivered = false;
        for _ in 0..c.timer {
            let before = snap.states.clone();
            let counts = step_flooding(&mut snap, &c, &mut rng);
            for (a, b) in before.iter().zip(&snap.states) {
                let ok = matches!(
                    (a, b),
                    (NodeState::Susceptible, _)
                        | (NodeState::Infected, NodeState::Infected)
                        | (NodeState::Infected, NodeState::Recovered)
                        | (NodeState::Recovered, NodeState::Recovered)
                );
                assert!(ok, "{a:?} -> {b:?}");
            }
            assert!(counts.delivered || !delivered);
            delivered = counts.delivered;
        }
        assert_eq!(snap.count(NodeState::Infected), 0, "timeout clears buffers");
    }

    #[test]
    fn close_pair_delivers_at_noise_limited_rate() {
        // One source, one destination 60 m apart, no PTs, certain access.
        let p = SystemParams {
            lambda_pt: 0.0,
            ..SystemParams::reference()
        }
        .validate()
        .unwrap();
        let mut c =
            SimConfig::new(p, Scheme::Static, Recovery::HybridVaccineTimeout, 1, 1, 0).unwrap();
        c.p_hat = 1.0;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rounds = 10_000;
        let mut delivered = 0;
        for _ in 0..rounds {
            let mut snap = NetworkSnapshot::from_positions(
                vec![],
                vec![],
                vec![Point::new(100.0, 100.0), Point::new(160.0, 100.0)],
            );
            step_flooding(&mut snap, &c, &mut rng);
            if snap.delivered_at == Some(1) {
                delivered += 1;
            }
        }
        let rate = f64::from(delivered) / f64::from(rounds);
        let expected = (-3e-9 * 60f64.powi(4) / 0.1).exp();
        assert!((rate - expected).abs() < 0.02, "{rate} vs {expected}");
    }
}
