use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::mobility::Leg;
use super::SimConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn offset(self, r: f64, angle: f64) -> Point {
        Point::new(self.x + r * angle.cos(), self.y + r * angle.sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeState {
    Susceptible,
    Infected,
    Recovered,
}

/// Addresses a node of the snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRef {
    Su(usize),
    Pt(usize),
    Pr(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSnapshot {
    pub pt_positions: Vec<Point>,
    /// `pr_positions[k]` is the receiver of `pt_positions[k]`.
    pub pr_positions: Vec<Point>,
    pub su_positions: Vec<Point>,
    pub states: Vec<NodeState>,
    /// Access decision for the current slot.
    pub active: Vec<bool>,
    pub source: usize,
    pub destination: usize,
    /// Frame in which the destination first decoded the packet.
    pub delivered_at: Option<u32>,
    /// Frames elapsed.
    pub clock: u32,
    pub(crate) legs: Vec<Leg>,
}

impl NetworkSnapshot {
    /// A snapshot from explicit positions: SU 0 is the infected source, SU 1
    /// the destination.
    pub fn from_positions(pts: Vec<Point>, prs: Vec<Point>, sus: Vec<Point>) -> Self {
        assert_eq!(pts.len(), prs.len(), "every PT needs a PR");
        assert!(sus.len() >= 2, "need a source and a destination");
        let n = sus.len();
        let mut states = vec![NodeState::Susceptible; n];
        states[0] = NodeState::Infected;
        Self {
            pt_positions: pts,
            pr_positions: prs,
            su_positions: sus,
            states,
            active: vec![false; n],
            source: 0,
            destination: 1,
            delivered_at: None,
            clock: 0,
            legs: vec![Leg::expired(); n],
        }
    }

    pub fn su_count(&self) -> usize {
        self.su_positions.len()
    }

    pub fn count(&self, state: NodeState) -> usize {
        self.states.iter().filter(|&&s| s == state).count()
    }

    pub fn is_delivered(&self) -> bool {
        self.delivered_at.is_some()
    }

    pub fn position(&self, node: NodeRef) -> Point {
        match node {
            NodeRef::Su(k) => self.su_positions[k],
            NodeRef::Pt(k) => self.pt_positions[k],
            NodeRef::Pr(k) => self.pr_positions[k],
        }
    }

    /// Whether SU `k` transmits in the current slot: active and holding a
    /// packet, or (with vaccine recovery) an antipacket.
    pub fn is_transmitting(&self, k: usize, vaccine: bool) -> bool {
        self.active[k]
            && match self.states[k] {
                NodeState::Infected => true,
                NodeState::Recovered => vaccine,
                NodeState::Susceptible => false,
            }
    }

    /// Whether `p` lies within `radius` of any PR.
    pub fn in_avoidance_region(&self, p: Point, radius: f64) -> bool {
        let r2 = radius * radius;
        radius > 0.0 && self.pr_positions.iter().any(|pr| pr.dist2(p) < r2)
    }
}

fn uniform_in_square(rng: &mut impl Rng, side: f64) -> Point {
    Point::new(rng.random::<f64>() * side, rng.random::<f64>() * side)
}

fn poisson_count(rng: &mut impl Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite mean");
    dist.sample(rng) as usize
}

/// One PPP deployment over the square region. Source and destination are
/// distinct uniformly chosen SUs; the source starts infected.
pub fn sample_network(cfg: &SimConfig, rng: &mut impl Rng) -> Result<NetworkSnapshot> {
    let p = &cfg.params;
    let side = p.region_side;
    let area = p.region_area();
    let n_pt = poisson_count(rng, p.lambda_pt * area);
    let n_su = poisson_count(rng, p.lambda_su * area);
    let mut pts = Vec::with_capacity(n_pt);
    let mut prs = Vec::with_capacity(n_pt);
    for _ in 0..n_pt {
        let pt = uniform_in_square(rng, side);
        pts.push(pt);
        prs.push(pt.offset(p.r_pt, rng.random::<f64>() * TAU));
    }
    let sus: Vec<Point> = (0..n_su).map(|_| uniform_in_square(rng, side)).collect();
    if n_su < 2 {
        return Err(Error::DegenerateDraw(n_su));
    }
    let source = rng.random_range(0..n_su);
    let mut destination = rng.random_range(0..n_su - 1);
    if destination >= source {
        destination += 1;
    }
    let mut states = vec![NodeState::Susceptible; n_su];
    states[source] = NodeState::Infected;
    Ok(NetworkSnapshot {
        pt_positions: pts,
        pr_positions: prs,
        su_positions: sus,
        states,
        active: vec![false; n_su],
        source,
        destination,
        delivered_at: None,
        clock: 0,
        legs: vec![Leg::expired(); n_su],
    })
}

/// Redraws degenerate deployments (fewer than two SUs).
pub fn sample_network_retrying(cfg: &SimConfig, rng: &mut impl Rng) -> Result<NetworkSnapshot> {
    const ATTEMPTS: usize = 1000;
    let mut last = Error::DegenerateDraw(0);
    for _ in 0..ATTEMPTS {
        match sample_network(cfg, rng) {
            Ok(s) => return Ok(s),
            Err(e @ Error::DegenerateDraw(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidemic::{Recovery, Scheme};
    use crate::params::SystemParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SimConfig {
        let p = SystemParams::reference().validate().unwrap();
        SimConfig::new(p, Scheme::Static, Recovery::HybridVaccineTimeout, 65, 1, 1).unwrap()
    }

    #[test]
    fn su_count_matches_poisson_mean() {
        let cfg = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 1000;
        let total: usize = (0..draws)
            .map(|_| sample_network(&cfg, &mut rng).unwrap().su_count())
            .sum();
        let mean = total as f64 / draws as f64;
        // Standard error of the mean is sqrt(640 / 1000) ≈ 0.8.
        assert!(
            (mean - 640.0).abs() < 3.0 * (640.0f64 / 1000.0).sqrt(),
            "{mean}"
        );
    }

    #[test]
    fn receivers_sit_at_link_distance() {
        let cfg = cfg();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = sample_network(&cfg, &mut rng).unwrap();
            assert_eq!(s.pt_positions.len(), s.pr_positions.len());
            for (pt, pr) in s.pt_positions.iter().zip(&s.pr_positions) {
                assert!((pt.dist2(*pr).sqrt() - 15.0).abs() < 1e-9);
            }
            assert_ne!(s.source, s.destination);
            assert_eq!(s.count(NodeState::Infected), 1);
            assert_eq!(s.states[s.source], NodeState::Infected);
        }
    }

    #[test]
    fn sparse_deployments_are_rejected() {
        let p = SystemParams {
            lambda_su: 1.0 / 640_000.0,
            ..SystemParams::reference()
        }
        .validate()
        .unwrap();
        let mut cfg = cfg();
        cfg.params = p;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let degenerate = (0..200)
            .filter(|_| {
                matches!(
                    sample_network(&cfg, &mut rng),
                    Err(Error::DegenerateDraw(_))
                )
            })
            .count();
        assert!(degenerate > 100, "{degenerate}");
        let ok = sample_network_retrying(&cfg, &mut rng).unwrap();
        assert!(ok.su_count() >= 2);
    }
}
