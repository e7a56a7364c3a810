use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::signals::CellOutputs;
use crate::error::{check_finite, Error, Result};

/// Integer antigen identifier. The engine never looks inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AntigenType(pub u32);

impl fmt::Display for AntigenType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Terminal state of a migrated cell, written as 0 / 1 in presentation logs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Context {
    SemiMature = 0,
    Mature = 1,
}

impl Context {
    pub fn as_u8(self) -> u8 {
        self as u8
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Self::SemiMature),
            1 => Some(Self::Mature),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Presentation {
    pub antigen: AntigenType,
    pub context: Context,
}

/// Uniform migration-threshold distribution on
/// `[median * (1 - spread), median * (1 + spread)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSampler {
    median: f64,
    spread_fraction: f64,
}

impl ThresholdSampler {
    pub fn new(median: f64, spread_fraction: f64) -> Result<Self> {
        check_finite("median", median)?;
        check_finite("spread_fraction", spread_fraction)?;
        if median <= 0.0 {
            return Err(Error::OutOfRange {
                name: "median",
                value: median,
                min: f64::MIN_POSITIVE,
                max: f64::INFINITY,
            });
        }
        if !(0.0..1.0).contains(&spread_fraction) {
            return Err(Error::OutOfRange {
                name: "spread_fraction",
                value: spread_fraction,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(Self {
            median,
            spread_fraction,
        })
    }

    pub fn median(&self) -> f64 {
        self.median
    }

    pub fn bounds(&self) -> (f64, f64) {
        (
            self.median * (1.0 - self.spread_fraction),
            self.median * (1.0 + self.spread_fraction),
        )
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (lo, hi) = self.bounds();
        if lo == hi {
            return lo;
        }
        rng.random_range(lo..=hi)
    }
}

/// One member of the population. Sums fused outputs and holds sampled
/// antigen until its CSM total passes its migration threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct DendriticCell {
    pub id: usize,
    pub migration_threshold: f64,
    pub cum_csm: f64,
    pub cum_semi: f64,
    pub cum_mat: f64,
    pub antigen_store: Vec<AntigenType>,
}

impl DendriticCell {
    pub fn new(id: usize, migration_threshold: f64) -> Self {
        Self {
            id,
            migration_threshold,
            cum_csm: 0.0,
            cum_semi: 0.0,
            cum_mat: 0.0,
            antigen_store: Vec::new(),
        }
    }

    pub fn accumulate(&mut self, o: &CellOutputs) {
        self.cum_csm += o.csm;
        self.cum_semi += o.semi;
        self.cum_mat += o.mature;
    }

    /// Migration needs the CSM total to strictly exceed the threshold.
    pub fn should_migrate(&self) -> bool {
        self.cum_csm > self.migration_threshold
    }

    pub fn reset(&mut self, migration_threshold: f64) {
        self.migration_threshold = migration_threshold;
        self.cum_csm = 0.0;
        self.cum_semi = 0.0;
        self.cum_mat = 0.0;
        self.antigen_store.clear();
    }
}

/// Semi-mature unless the mature output total is strictly larger; ties
/// go to semi-mature.
pub fn maturation_context(cell: &DendriticCell) -> Context {
    if cell.cum_semi < cell.cum_mat {
        Context::Mature
    } else {
        Context::SemiMature
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cell_with(semi: f64, mat: f64) -> DendriticCell {
        DendriticCell {
            cum_semi: semi,
            cum_mat: mat,
            ..DendriticCell::new(0, 1.0)
        }
    }

    #[test]
    fn maturation_branches() {
        assert_eq!(
            maturation_context(&cell_with(100.0, -300.0)),
            Context::SemiMature
        );
        assert_eq!(maturation_context(&cell_with(0.0, 200.0)), Context::Mature);
        assert_eq!(
            maturation_context(&cell_with(50.0, 50.0)),
            Context::SemiMature
        );
    }

    #[test]
    fn migration_is_strict() {
        let mut c = DendriticCell::new(0, 10.0);
        c.cum_csm = 10.0;
        assert!(!c.should_migrate());
        c.cum_csm = 10.000001;
        assert!(c.should_migrate());
    }

    #[test]
    fn reset_clears_everything() {
        let mut c = cell_with(3.0, 4.0);
        c.cum_csm = 9.0;
        c.antigen_store.push(AntigenType(4));
        c.reset(22.0);
        assert_eq!(c, DendriticCell::new(0, 22.0));
    }

    #[test]
    fn sampler_rejects_bad_parameters() {
        assert!(ThresholdSampler::new(0.0, 0.5).is_err());
        assert!(ThresholdSampler::new(-3.0, 0.5).is_err());
        assert!(ThresholdSampler::new(10.0, 1.0).is_err());
        assert!(ThresholdSampler::new(10.0, -0.1).is_err());
        assert!(ThresholdSampler::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn degenerate_spread_returns_median() {
        let s = ThresholdSampler::new(42.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| s.sample(&mut rng) == 42.0));
    }

    #[test]
    fn context_codes() {
        assert_eq!(Context::SemiMature.as_u8(), 0);
        assert_eq!(Context::Mature.as_u8(), 1);
        assert_eq!(Context::from_u8(1), Some(Context::Mature));
        assert_eq!(Context::from_u8(2), None);
    }
}
