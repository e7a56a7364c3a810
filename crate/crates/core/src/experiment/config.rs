use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dca::{DcaConfig, DEFAULT_MCAV_THRESHOLD};
use crate::error::{check_finite, io_err, Error, Result};
use crate::oracle::RateWeighting;
use crate::sim::PenConfig;
use crate::transducer::{FovWindow, RangeLookup};

/// Everything needed to reproduce a sweep. Serialized as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub medians: Vec<f64>,
    pub runs_per_median: usize,
    /// Simulated seconds per run.
    pub duration_s: f64,
    pub mcav_threshold: f64,
    pub base_seed: u64,
    /// Simulation tick, seconds.
    pub tick_s: f64,
    /// DCA cycle and metrics cadence, seconds. Must be a whole number of ticks.
    pub cycle_s: f64,
    /// Encode antigen from the true pose instead of dead reckoning.
    pub perfect_localization: bool,
    pub rate_weighting: RateWeighting,
    /// Half-width of the forward window shared by safe and danger, degrees.
    pub signal_half_fov_deg: f64,
    pub range_lookup: RangeLookup,
    /// Blob area to PAMP factor. Derived from the pen when absent.
    pub pamp_scale: Option<f64>,
    pub out_dir: PathBuf,
    pub dca: DcaConfig,
    /// Pen file; when set it replaces the inline `pen` table on load.
    pub pen_file: Option<PathBuf>,
    pub pen: PenConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            medians: vec![15.0, 30.0, 60.0, 120.0, 240.0],
            runs_per_median: 3,
            duration_s: 600.0,
            mcav_threshold: DEFAULT_MCAV_THRESHOLD,
            base_seed: 20070101,
            tick_s: 0.1,
            cycle_s: 1.0,
            perfect_localization: false,
            rate_weighting: RateWeighting::PerType,
            signal_half_fov_deg: 22.0,
            range_lookup: RangeLookup::default(),
            pamp_scale: None,
            out_dir: PathBuf::from("out"),
            dca: DcaConfig::default(),
            pen_file: None,
            pen: PenConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Reads a config file. A relative `pen_file` is resolved against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let mut cfg: Self = toml::from_str(&text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if let Some(pen_file) = cfg.pen_file.take() {
            let resolved = if pen_file.is_relative() {
                path.parent().unwrap_or(Path::new(".")).join(&pen_file)
            } else {
                pen_file
            };
            cfg.pen = PenConfig::load(&resolved)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// The effective config with the pen inlined, suitable for re-reading.
    pub fn to_toml(&self) -> String {
        let mut inlined = self.clone();
        inlined.pen_file = None;
        toml::to_string(&inlined).expect("experiment config always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.medians.is_empty() {
            return bad("at least one migration median is required".into());
        }
        for &m in &self.medians {
            if !(m.is_finite() && m > 0.0) {
                return bad(format!("migration median {m} must be positive"));
            }
        }
        if self.runs_per_median == 0 {
            return bad("runs_per_median must be >= 1".into());
        }
        check_finite("duration_s", self.duration_s)?;
        if self.duration_s < 0.0 {
            return bad("duration_s must be >= 0".into());
        }
        check_finite("mcav_threshold", self.mcav_threshold)?;
        if !(0.0..=1.0).contains(&self.mcav_threshold) {
            return bad("mcav_threshold must lie in [0, 1]".into());
        }
        check_finite("tick_s", self.tick_s)?;
        check_finite("cycle_s", self.cycle_s)?;
        if self.tick_s <= 0.0 || self.cycle_s <= 0.0 {
            return bad("tick_s and cycle_s must be positive".into());
        }
        let ratio = self.cycle_s / self.tick_s;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
            return bad("cycle_s must be a whole number of ticks".into());
        }
        self.signal_fov()?;
        if let Some(s) = self.pamp_scale {
            if !(s.is_finite() && s > 0.0) {
                return bad("pamp_scale must be positive".into());
            }
        }
        if self.dca.population_size == 0 {
            return bad("population_size must be >= 1".into());
        }
        if !(0.0..1.0).contains(&self.dca.spread_fraction) {
            return bad("spread_fraction must lie in [0, 1)".into());
        }
        self.pen.validate()?;
        crate::antigen::PenGrid::new(self.pen.width, self.pen.height)?;
        Ok(())
    }

    pub fn signal_fov(&self) -> Result<FovWindow> {
        FovWindow::symmetric_degrees(self.signal_half_fov_deg)
    }

    pub fn ticks_per_cycle(&self) -> u64 {
        (self.cycle_s / self.tick_s).round() as u64
    }

    pub fn total_ticks(&self) -> u64 {
        (self.duration_s / self.tick_s).round() as u64
    }

    /// PAMP scale: explicit if configured, otherwise chosen so the blob of
    /// the (first) anomalous obstacle seen from the controller's stopping
    /// distance maps to exactly 100.
    pub fn effective_pamp_scale(&self) -> f64 {
        if let Some(s) = self.pamp_scale {
            return s;
        }
        let pen = &self.pen;
        let target = pen
            .anomalous_obstacles()
            .next()
            .or_else(|| pen.obstacles.iter().find(|o| o.pink));
        match target {
            Some(o) => {
                let d = pen.controller.d_stop + o.radius;
                crate::dca::SIGNAL_MAX / pen.sensors.blob_area(o.radius, o.height, d)
            }
            None => 1.0,
        }
    }
}
