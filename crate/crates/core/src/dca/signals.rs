use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};

/// Upper bound shared by every input signal.
pub const SIGNAL_MAX: f64 = 100.0;

/// One cycle's worth of input signals, each in `[0, 100]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SignalVector {
    pub pamp: f64,
    pub danger: f64,
    pub safe: f64,
}

impl SignalVector {
    pub fn new(pamp: f64, danger: f64, safe: f64) -> Result<Self> {
        let s = Self { pamp, danger, safe };
        s.validate()?;
        Ok(s)
    }

    pub const fn zero() -> Self {
        Self {
            pamp: 0.0,
            danger: 0.0,
            safe: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("pamp", self.pamp),
            ("danger", self.danger),
            ("safe", self.safe),
        ] {
            check_finite(name, v)?;
            if !(0.0..=SIGNAL_MAX).contains(&v) {
                return Err(Error::OutOfRange {
                    name,
                    value: v,
                    min: 0.0,
                    max: SIGNAL_MAX,
                });
            }
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.pamp, self.danger, self.safe]
    }
}

/// Output signals of one fusion step: costimulation (CSM), the semi-mature
/// cytokine and the mature cytokine.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CellOutputs {
    pub csm: f64,
    pub semi: f64,
    pub mature: f64,
}

/// Fusion weights. Rows are outputs `(csm, semi, mature)`, columns are
/// inputs `(pamp, danger, safe)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct WeightMatrix([[f64; 3]; 3]);

impl WeightMatrix {
    pub const CSM: usize = 0;
    pub const SEMI: usize = 1;
    pub const MATURE: usize = 2;

    /// Checks the sign pattern every usable matrix needs: CSM is driven by
    /// all three inputs, the semi-mature output only by safe, and the mature
    /// output up by PAMP/danger and down by safe.
    pub fn new(rows: [[f64; 3]; 3]) -> Result<Self> {
        for row in &rows {
            for &w in row {
                check_finite("weight", w)?;
            }
        }
        let [csm, semi, mat] = rows;
        if csm.iter().any(|&w| w <= 0.0) {
            return Err(Error::InvalidWeights(
                "csm row must be strictly positive".into(),
            ));
        }
        if semi[0] != 0.0 || semi[1] != 0.0 || semi[2] <= 0.0 {
            return Err(Error::InvalidWeights("semi row must be (0, 0, >0)".into()));
        }
        if mat[0] <= 0.0 || mat[1] <= 0.0 || mat[2] >= 0.0 {
            return Err(Error::InvalidWeights(
                "mature row must be (>0, >0, <0)".into(),
            ));
        }
        Ok(Self(rows))
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    /// Weighted sum of the inputs for each output row.
    pub fn fuse(&self, s: &SignalVector) -> CellOutputs {
        let input = s.as_array();
        let row = |i: usize| -> f64 { self.0[i].iter().zip(input).map(|(w, x)| w * x).sum() };
        CellOutputs {
            csm: row(Self::CSM),
            semi: row(Self::SEMI),
            mature: row(Self::MATURE),
        }
    }
}

impl Default for WeightMatrix {
    fn default() -> Self {
        Self([[2.0, 1.0, 2.0], [0.0, 0.0, 1.0], [2.0, 1.0, -3.0]])
    }
}

impl TryFrom<[[f64; 3]; 3]> for WeightMatrix {
    type Error = Error;

    fn try_from(rows: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<WeightMatrix> for [[f64; 3]; 3] {
    fn from(w: WeightMatrix) -> Self {
        w.0
    }
}

/// Validates `s` and returns the fused outputs.
pub fn fuse_signals(weights: &WeightMatrix, s: &SignalVector) -> Result<CellOutputs> {
    s.validate()?;
    Ok(weights.fuse(s))
}
