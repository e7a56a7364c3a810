//! Pose to antigen encoding and speed-dependent antigen multiplicity.
//!
//! An antigen type names one 300 mm grid square of the pen together with
//! one of twelve 30 degree heading segments, so
//! `id = (row * n_cols + col) * 12 + segment`. Segment 0 spans headings
//! `[0, 30)` degrees measured from the pen's +x axis.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

pub use crate::dca::AntigenType;
use crate::error::{check_finite, Error, Result};
use crate::pose::Pose;

pub const CELL_SIZE_MM: f64 = 300.0;
pub const SEGMENTS_PER_CELL: u32 = 12;
const SEGMENT_WIDTH: f64 = TAU / SEGMENTS_PER_CELL as f64;

/// Smallest and largest copy counts the multiplicity function can return.
pub const MIN_MULTIPLICITY: usize = 2;
pub const MAX_MULTIPLICITY: usize = 102;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenGrid {
    width_mm: f64,
    height_mm: f64,
    n_cols: u32,
    n_rows: u32,
}

impl PenGrid {
    pub fn new(width_mm: f64, height_mm: f64) -> Result<Self> {
        let cells = |name: &str, v: f64| -> Result<u32> {
            check_finite("pen dimension", v)?;
            let n = v / CELL_SIZE_MM;
            if v <= 0.0 || n.fract() != 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "pen {name} {v} mm must be a positive multiple of {CELL_SIZE_MM} mm"
                )));
            }
            Ok(n as u32)
        };
        Ok(Self {
            width_mm,
            height_mm,
            n_cols: cells("width", width_mm)?,
            n_rows: cells("height", height_mm)?,
        })
    }

    pub fn n_cols(&self) -> u32 {
        self.n_cols
    }

    pub fn n_rows(&self) -> u32 {
        self.n_rows
    }

    pub fn width_mm(&self) -> f64 {
        self.width_mm
    }

    pub fn height_mm(&self) -> f64 {
        self.height_mm
    }

    pub fn total_types(&self) -> u32 {
        self.n_cols * self.n_rows * SEGMENTS_PER_CELL
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..self.width_mm).contains(&x) && (0.0..self.height_mm).contains(&y)
    }

    pub fn all_types(&self) -> impl Iterator<Item = AntigenType> {
        (0..self.total_types()).map(AntigenType)
    }

    pub fn encode(&self, pose: &Pose) -> Result<AntigenType> {
        if !(pose.x.is_finite() && pose.y.is_finite() && self.contains(pose.x, pose.y)) {
            return Err(Error::OutsidePen {
                x: pose.x,
                y: pose.y,
                width: self.width_mm,
                height: self.height_mm,
            });
        }
        let heading = check_finite("heading", pose.heading)?.rem_euclid(TAU);
        let col = (pose.x / CELL_SIZE_MM) as u32;
        let row = (pose.y / CELL_SIZE_MM) as u32;
        let segment = ((heading / SEGMENT_WIDTH) as u32).min(SEGMENTS_PER_CELL - 1);
        Ok(AntigenType(
            (row * self.n_cols + col) * SEGMENTS_PER_CELL + segment,
        ))
    }

    /// Representative pose for an antigen type: the centre of its grid
    /// square facing the middle of its heading segment.
    pub fn decode(&self, id: AntigenType) -> Result<Pose> {
        if id.0 >= self.total_types() {
            return Err(Error::AntigenOutOfRange {
                id: id.0,
                total: self.total_types(),
            });
        }
        let segment = id.0 % SEGMENTS_PER_CELL;
        let cell = id.0 / SEGMENTS_PER_CELL;
        let (row, col) = (cell / self.n_cols, cell % self.n_cols);
        Ok(Pose::new(
            (col as f64 + 0.5) * CELL_SIZE_MM,
            (row as f64 + 0.5) * CELL_SIZE_MM,
            (segment as f64 + 0.5) * SEGMENT_WIDTH,
        ))
    }
}

/// Speed limits used to normalise the multiplicity function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityLimits {
    /// mm/s
    pub v_max: f64,
    /// rad/s
    pub theta_dot_max: f64,
}

impl VelocityLimits {
    pub fn new(v_max: f64, theta_dot_max: f64) -> Result<Self> {
        check_finite("v_max", v_max)?;
        check_finite("theta_dot_max", theta_dot_max)?;
        if v_max <= 0.0 || theta_dot_max <= 0.0 {
            return Err(Error::InvalidConfig(
                "velocity limits must be positive".into(),
            ));
        }
        Ok(Self {
            v_max,
            theta_dot_max,
        })
    }
}

/// Number of antigen copies to emit at the given speeds: slow, straight
/// motion emits most (102), full speed while turning at full rate emits
/// least (2). The weighted score is floored to an integer count.
pub fn multiplicity(v: f64, theta_dot: f64, limits: &VelocityLimits) -> Result<usize> {
    check_finite("v", v)?;
    check_finite("theta_dot", theta_dot)?;
    if v.abs() > limits.v_max {
        return Err(Error::OutOfRange {
            name: "v",
            value: v,
            min: -limits.v_max,
            max: limits.v_max,
        });
    }
    if theta_dot.abs() > limits.theta_dot_max {
        return Err(Error::OutOfRange {
            name: "theta_dot",
            value: theta_dot,
            min: -limits.theta_dot_max,
            max: limits.theta_dot_max,
        });
    }
    let w = 75.0 * (1.0 - (v / limits.v_max).abs())
        + 1.0
        + 25.0 * (1.0 - (theta_dot / limits.theta_dot_max).abs())
        + 1.0;
    Ok((w.floor() as usize).clamp(MIN_MULTIPLICITY, MAX_MULTIPLICITY))
}

/// A batch of identical antigen copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AntigenBatch {
    pub antigen: AntigenType,
    pub copies: usize,
}

/// Encodes `pose` and pairs it with the speed-dependent copy count.
/// Poses outside the pen are rejected so the caller can skip them.
pub fn emit_antigen(
    pose: &Pose,
    v: f64,
    theta_dot: f64,
    grid: &PenGrid,
    limits: &VelocityLimits,
) -> Result<AntigenBatch> {
    let antigen = grid.encode(pose)?;
    let copies = multiplicity(v, theta_dot, limits)?;
    Ok(AntigenBatch { antigen, copies })
}
