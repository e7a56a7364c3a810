use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

/// Planar pose in the pen frame. Millimetres, heading in radians measured
/// counter-clockwise from the +x axis and kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            heading: normalize_heading(heading),
        }
    }

    pub fn distance_to(&self, other: &Pose) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Wraps any angle into `[0, 2π)`.
pub fn normalize_heading(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Wraps any angle into `(-π, π]`.
pub fn wrap_pi(angle: f64) -> f64 {
    let a = normalize_heading(angle);
    if a > PI {
        a - TAU
    } else {
        a
    }
}
