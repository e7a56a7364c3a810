//! Two-layer subsumption wander behaviour.
//!
//! The bottom layer drives straight ahead at cruise speed. The avoidance
//! layer subsumes it when anything in the front half-plane (laser or
//! sonar) comes within `d_turn`: first by slowing and steering away, then,
//! inside `d_stop`, by stopping and rotating in place toward open space.
//! Priority is strictly stop, then turn, then cruise.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::transducer::RangeReading;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WanderParams {
    /// mm, measured from the sensor origin
    pub d_stop: f64,
    /// mm
    pub d_turn: f64,
    /// mm/s
    pub v_cruise: f64,
    /// mm/s while steering away
    pub v_turn: f64,
    /// rad/s
    pub turn_rate: f64,
    /// Upper bound on the random extra rotation after the front clears, s.
    pub max_extra_turn_s: f64,
}

impl Default for WanderParams {
    fn default() -> Self {
        Self {
            d_stop: 350.0,
            d_turn: 700.0,
            v_cruise: 300.0,
            v_turn: 150.0,
            turn_rate: 1.0,
            max_extra_turn_s: 1.5,
        }
    }
}

impl WanderParams {
    pub fn validate(&self) -> crate::Result<()> {
        let ok = [
            self.d_stop,
            self.d_turn,
            self.v_cruise,
            self.v_turn,
            self.turn_rate,
            self.max_extra_turn_s,
        ]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0)
            && self.d_stop > 0.0
            && self.d_turn >= self.d_stop
            && self.turn_rate > 0.0;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::InvalidConfig(
                "controller: need 0 < d_stop <= d_turn, turn_rate > 0, all values finite".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Behavior {
    Cruise,
    Avoid,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Command {
    pub v: f64,
    pub theta_dot: f64,
    pub behavior: Behavior,
}

/// Closest return (distance, bearing) in the front half-plane over both
/// sensors.
pub fn nearest_front(lrf: &[RangeReading], sonar: &[RangeReading]) -> Option<(f64, f64)> {
    const HALF_PLANE: f64 = std::f64::consts::FRAC_PI_2 + 1e-9;
    lrf.iter()
        .chain(sonar)
        .filter(|r| r.angle.abs() <= HALF_PLANE)
        .filter_map(|r| r.distance.map(|d| (d, r.angle)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

/// Turn direction away from a return at `bearing`: obstacles on the left
/// (positive bearing) make the robot turn right (negative rate).
fn away_from(bearing: f64) -> f64 {
    if bearing > 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Stateless single step of the layered controller.
pub fn wander_step(params: &WanderParams, lrf: &[RangeReading], sonar: &[RangeReading]) -> Command {
    match nearest_front(lrf, sonar) {
        Some((d, bearing)) if d < params.d_stop => Command {
            v: 0.0,
            theta_dot: away_from(bearing) * params.turn_rate,
            behavior: Behavior::Stop,
        },
        Some((d, bearing)) if d < params.d_turn => {
            // steer harder the closer and the more head-on the return is
            let closeness = (params.d_turn - d) / (params.d_turn - params.d_stop).max(1e-9);
            let headon = bearing.cos().max(0.0);
            Command {
                v: params.v_turn,
                theta_dot: away_from(bearing)
                    * params.turn_rate
                    * (0.5 + 0.5 * closeness * headon).min(1.0),
                behavior: Behavior::Avoid,
            }
        }
        _ => Command {
            v: params.v_cruise,
            theta_dot: 0.0,
            behavior: Behavior::Cruise,
        },
    }
}

/// [`wander_step`] plus the small amount of state that keeps the robot
/// from dithering: the rotation direction is held for as long as it stays
/// stopped, and a random extra rotation follows each stop so repeated
/// approaches do not settle into a fixed loop.
#[derive(Debug, Clone)]
pub struct WanderController {
    params: WanderParams,
    held_direction: Option<f64>,
    extra_ticks: u32,
}

impl WanderController {
    pub fn new(params: WanderParams) -> Self {
        Self {
            params,
            held_direction: None,
            extra_ticks: 0,
        }
    }

    pub fn params(&self) -> &WanderParams {
        &self.params
    }

    pub fn step<R: Rng + ?Sized>(
        &mut self,
        lrf: &[RangeReading],
        sonar: &[RangeReading],
        dt: f64,
        rng: &mut R,
    ) -> Command {
        let base = wander_step(&self.params, lrf, sonar);
        match base.behavior {
            Behavior::Stop => {
                let dir = *self.held_direction.get_or_insert(base.theta_dot.signum());
                if self.extra_ticks == 0 {
                    let max_ticks = (self.params.max_extra_turn_s / dt).round() as u32;
                    self.extra_ticks = rng.random_range(0..=max_ticks);
                }
                Command {
                    theta_dot: dir * self.params.turn_rate,
                    ..base
                }
            }
            _ if self.held_direction.is_some() && self.extra_ticks > 0 => {
                self.extra_ticks -= 1;
                Command {
                    v: 0.0,
                    theta_dot: self.held_direction.unwrap_or(1.0) * self.params.turn_rate,
                    behavior: Behavior::Stop,
                }
            }
            _ => {
                self.held_direction = None;
                self.extra_ticks = 0;
                base
            }
        }
    }
}
