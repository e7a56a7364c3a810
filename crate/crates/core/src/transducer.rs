//! Sensor readings to bounded DCA input signals.
//!
//! Laser and sonar ranges go through the same distance-to-strength lookup
//! table, restricted to a forward window. The camera's largest pink blob
//! area is scaled and clamped into the PAMP range.

use serde::{Deserialize, Serialize};

use crate::dca::{SignalVector, SIGNAL_MAX};
use crate::error::{check_finite, Error, Result};

/// A single range return: bearing in the robot frame (radians, 0 straight
/// ahead, positive to the left) and distance in mm. `None` means nothing
/// within the sensor's maximum range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeReading {
    pub angle: f64,
    pub distance: Option<f64>,
}

/// Piecewise-linear distance (mm) to strength mapping. Beyond the last
/// knot the last strength holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct RangeLookup {
    knots: Vec<(f64, f64)>,
}

impl RangeLookup {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidConfig(
                "range lookup needs at least one knot".into(),
            ));
        }
        for &(d, s) in &knots {
            check_finite("lookup distance", d)?;
            check_finite("lookup strength", s)?;
            if !(0.0..=SIGNAL_MAX).contains(&s) {
                return Err(Error::OutOfRange {
                    name: "lookup strength",
                    value: s,
                    min: 0.0,
                    max: SIGNAL_MAX,
                });
            }
        }
        if knots[0].0 != 0.0 {
            return Err(Error::InvalidConfig(
                "range lookup must start at 0 mm".into(),
            ));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidConfig(
                    "range lookup distances must be strictly increasing".into(),
                ));
            }
            if w[1].1 > w[0].1 {
                return Err(Error::InvalidConfig(
                    "range lookup strengths must be non-increasing".into(),
                ));
            }
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Distance at which the table's strength first reaches its final value.
    pub fn horizon(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    pub fn eval(&self, d: f64) -> Result<f64> {
        check_finite("distance", d)?;
        if d < 0.0 {
            return Err(Error::OutOfRange {
                name: "distance",
                value: d,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        // first knot strictly beyond d
        let i = self.knots.partition_point(|&(x, _)| x <= d);
        if i == self.knots.len() {
            return Ok(self.knots[i - 1].1);
        }
        let (x0, y0) = self.knots[i - 1];
        let (x1, y1) = self.knots[i];
        Ok(y0 + (d - x0) * (y1 - y0) / (x1 - x0))
    }
}

impl Default for RangeLookup {
    fn default() -> Self {
        Self {
            knots: vec![
                (0.0, 100.0),
                (300.0, 90.0),
                (600.0, 50.0),
                (900.0, 20.0),
                (1200.0, 0.0),
            ],
        }
    }
}

impl TryFrom<Vec<(f64, f64)>> for RangeLookup {
    type Error = Error;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RangeLookup> for Vec<(f64, f64)> {
    fn from(t: RangeLookup) -> Self {
        t.knots
    }
}

/// Inclusive bearing window in the robot frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FovWindow {
    min_angle: f64,
    max_angle: f64,
}

impl FovWindow {
    pub fn new(min_angle: f64, max_angle: f64) -> Result<Self> {
        check_finite("fov min_angle", min_angle)?;
        check_finite("fov max_angle", max_angle)?;
        if min_angle >= max_angle {
            return Err(Error::InvalidConfig(format!(
                "fov min_angle {min_angle} must be below max_angle {max_angle}"
            )));
        }
        Ok(Self {
            min_angle,
            max_angle,
        })
    }

    pub fn symmetric_degrees(half_width_deg: f64) -> Result<Self> {
        let h = half_width_deg.to_radians();
        Self::new(-h, h)
    }

    pub fn min_angle(&self) -> f64 {
        self.min_angle
    }

    pub fn max_angle(&self) -> f64 {
        self.max_angle
    }

    pub fn contains(&self, angle: f64) -> bool {
        // tolerate float noise from degree conversions at the edges
        const EPS: f64 = 1e-9;
        angle >= self.min_angle - EPS && angle <= self.max_angle + EPS
    }
}

impl Default for FovWindow {
    fn default() -> Self {
        Self::symmetric_degrees(22.0).expect("static window")
    }
}

pub fn strength_from_distance(table: &RangeLookup, d: f64) -> Result<f64> {
    table.eval(d)
}

/// Nearest in-window distance, or `None` if no beam in the window hit.
pub fn nearest_in_fov(scan: &[RangeReading], fov: &FovWindow) -> Result<Option<f64>> {
    if scan.is_empty() {
        return Err(Error::EmptyScan);
    }
    let mut best: Option<f64> = None;
    for r in scan.iter().filter(|r| fov.contains(r.angle)) {
        if let Some(d) = r.distance {
            check_finite("range", d)?;
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
    }
    Ok(best)
}

fn ranged_strength(scan: &[RangeReading], fov: &FovWindow, table: &RangeLookup) -> Result<f64> {
    match nearest_in_fov(scan, fov)? {
        Some(d) => table.eval(d),
        None => Ok(0.0),
    }
}

/// Safe signal from the laser: strength of the closest in-window return.
pub fn safe_from_lrf(scan: &[RangeReading], fov: &FovWindow, table: &RangeLookup) -> Result<f64> {
    ranged_strength(scan, fov, table)
}

/// Danger signal from the sonar ring, same window and table as the laser.
pub fn danger_from_sonar(
    ranges: &[RangeReading],
    fov: &FovWindow,
    table: &RangeLookup,
) -> Result<f64> {
    ranged_strength(ranges, fov, table)
}

/// PAMP signal from blob area: `min(100, area * scale)`.
pub fn pamp_from_blob(area: f64, scale: f64) -> Result<f64> {
    check_finite("blob area", area)?;
    check_finite("pamp scale", scale)?;
    if area < 0.0 {
        return Err(Error::OutOfRange {
            name: "blob area",
            value: area,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    if scale <= 0.0 {
        return Err(Error::OutOfRange {
            name: "pamp scale",
            value: scale,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    Ok((area * scale).min(SIGNAL_MAX))
}

/// The three transducers bundled with their shared parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalProcessor {
    pub fov: FovWindow,
    pub table: RangeLookup,
    pub pamp_scale: f64,
}

impl SignalProcessor {
    pub fn process(
        &self,
        lrf: &[RangeReading],
        sonar: &[RangeReading],
        blob_area: f64,
    ) -> Result<SignalVector> {
        SignalVector::new(
            pamp_from_blob(blob_area, self.pamp_scale)?,
            danger_from_sonar(sonar, &self.fov, &self.table)?,
            safe_from_lrf(lrf, &self.fov, &self.table)?,
        )
    }
}
