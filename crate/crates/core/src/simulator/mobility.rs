//! Random-direction mobility with reflecting boundaries.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use super::network::{NetworkSnapshot, Point};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityConfig {
    /// Speed range (m/frame).
    pub v_min: f64,
    pub v_max: f64,
    /// Leg duration range (frames, inclusive).
    pub leg_min: u32,
    pub leg_max: u32,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        Self {
            v_min: 1.0,
            v_max: 5.0,
            leg_min: 1,
            leg_max: 10,
        }
    }
}

impl MobilityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_min >= 0.0 && self.v_min <= self.v_max && self.v_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "speed range [{}, {}] is not valid",
                self.v_min, self.v_max
            )));
        }
        if self.leg_min < 1 || self.leg_min > self.leg_max {
            return Err(Error::InvalidArgument(format!(
                "leg duration range [{}, {}] is not valid",
                self.leg_min, self.leg_max
            )));
        }
        Ok(())
    }
}

/// Current travel leg of one SU.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leg {
    pub heading: f64,
    pub speed: f64,
    pub remaining: u32,
}

impl Leg {
    pub(crate) fn expired() -> Self {
        Self {
            heading: 0.0,
            speed: 0.0,
            remaining: 0,
        }
    }
}

/// Reflects one coordinate into `[0, side]`, returning whether it bounced.
fn reflect(coord: &mut f64, side: f64) -> bool {
    let mut bounced = false;
    // Loop covers steps longer than the region (never with sane speeds).
    while *coord < 0.0 || *coord > side {
        if *coord < 0.0 {
            *coord = -*coord;
        } else {
            *coord = 2.0 * side - *coord;
        }
        bounced = !bounced;
    }
    bounced
}

/// Advances every SU by one frame. SUs whose leg expired first draw a new
/// heading, speed and duration.
pub fn step_mobility(
    snapshot: &mut NetworkSnapshot,
    mobility: &MobilityConfig,
    side: f64,
    rng: &mut impl Rng,
) {
    for (pos, leg) in snapshot
        .su_positions
        .iter_mut()
        .zip(snapshot.legs.iter_mut())
    {
        if leg.remaining == 0 {
            leg.heading = rng.random::<f64>() * TAU;
            leg.speed = if mobility.v_max > mobility.v_min {
                rng.random_range(mobility.v_min..=mobility.v_max)
            } else {
                mobility.v_min
            };
            leg.remaining = rng.random_range(mobility.leg_min..=mobility.leg_max);
        }
        let mut next = Point::new(
            pos.x + leg.speed * leg.heading.cos(),
            pos.y + leg.speed * leg.heading.sin(),
        );
        if reflect(&mut next.x, side) {
            leg.heading = PI - leg.heading;
        }
        if reflect(&mut next.y, side) {
            leg.heading = -leg.heading;
        }
        *pos = next;
        leg.remaining -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lone_node(at: Point) -> NetworkSnapshot {
        NetworkSnapshot::from_positions(vec![], vec![], vec![at, Point::new(0.0, 0.0)])
    }

    #[test]
    fn leg_displacement_is_speed_times_duration() {
        let mob = MobilityConfig {
            v_min: 2.0,
            v_max: 2.0,
            leg_min: 7,
            leg_max: 7,
        };
        let mut snap = lone_node(Point::new(400.0, 400.0));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let start = snap.su_positions[0];
        for _ in 0..7 {
            step_mobility(&mut snap, &mob, 800.0, &mut rng);
        }
        let d = snap.su_positions[0].dist2(start).sqrt();
        assert!((d - 14.0).abs() < 1e-9, "{d}");
        assert_eq!(snap.legs[0].remaining, 0);
    }

    #[test]
    fn zero_speed_never_moves() {
        let mob = MobilityConfig {
            v_min: 0.0,
            v_max: 0.0,
            ..MobilityConfig::default()
        };
        let mut snap = lone_node(Point::new(10.0, 20.0));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            step_mobility(&mut snap, &mob, 800.0, &mut rng);
        }
        assert_eq!(snap.su_positions[0], Point::new(10.0, 20.0));
    }

    #[test]
    fn nodes_stay_inside_region() {
        let mob = MobilityConfig {
            v_min: 30.0,
            v_max: 60.0,
            ..MobilityConfig::default()
        };
        let mut snap = lone_node(Point::new(5.0, 795.0));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            step_mobility(&mut snap, &mob, 800.0, &mut rng);
            for p in &snap.su_positions {
                assert!((0.0..=800.0).contains(&p.x) && (0.0..=800.0).contains(&p.y));
            }
        }
    }

    #[test]
    fn rejects_inverted_speed_range() {
        let mob = MobilityConfig {
            v_min: 5.0,
            v_max: 1.0,
            ..MobilityConfig::default()
        };
        assert!(mob.validate().is_err());
    }
}
