//! Geometric ground truth and cumulative error rates.
//!
//! Each antigen type is decoded to its representative pose and labelled
//! anomalous when, looking across the forward signal window, the closest
//! thing on some ray is an anomalous obstacle within the lookup table's
//! zero-strength horizon.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::antigen::{AntigenType, PenGrid};
use crate::dca::{classify_value, Label, McavTable, TimedPresentation};
use crate::error::Result;
use crate::sim::{HitTarget, Pen, LASER_PLANE_HEIGHT_MM};
use crate::transducer::FovWindow;

/// Parameters of the geometric labelling model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthModel {
    pub fov: FovWindow,
    /// mm; beyond this nothing contributes signal
    pub horizon: f64,
    pub ray_step_deg: f64,
    pub laser_height: f64,
}

impl Default for TruthModel {
    fn default() -> Self {
        Self {
            fov: FovWindow::default(),
            horizon: 1200.0,
            ray_step_deg: 1.0,
            laser_height: LASER_PLANE_HEIGHT_MM,
        }
    }
}

/// Label of every antigen type in the pen, indexed by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoreticalLabeling {
    labels: Vec<Label>,
}

impl TheoreticalLabeling {
    pub fn from_pen(pen: &Pen, grid: &PenGrid, model: &TruthModel) -> Result<Self> {
        let labels = grid
            .all_types()
            .map(|id| theoretical_label(id, pen, grid, model))
            .collect::<Result<_>>()?;
        Ok(Self { labels })
    }

    /// Builds a labelling directly, mainly for tests and synthetic streams.
    pub fn from_labels(labels: Vec<Label>) -> Self {
        Self { labels }
    }

    pub fn get(&self, id: AntigenType) -> Option<Label> {
        self.labels.get(id.0 as usize).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AntigenType, Label)> + '_ {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (AntigenType(i as u32), l))
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

pub fn theoretical_label(
    id: AntigenType,
    pen: &Pen,
    grid: &PenGrid,
    model: &TruthModel,
) -> Result<Label> {
    let pose = grid.decode(id)?;
    let lo = model.fov.min_angle();
    let hi = model.fov.max_angle();
    let n = ((hi - lo) / model.ray_step_deg.to_radians())
        .round()
        .max(1.0) as usize;
    for k in 0..=n {
        let bearing = lo + (hi - lo) * k as f64 / n as f64;
        let Some(hit) = pen.raycast(pose.x, pose.y, pose.heading + bearing, 0.0) else {
            continue;
        };
        if hit.distance > model.horizon {
            continue;
        }
        if let HitTarget::Obstacle(i) = hit.target {
            if pen.obstacles()[i].is_anomalous(model.laser_height) {
                return Ok(Label::Anomalous);
            }
        }
    }
    Ok(Label::Normal)
}

/// How each presented type contributes to the rates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateWeighting {
    /// Every presented type counts once.
    #[default]
    PerType,
    /// Each type counts as many times as it was presented.
    PerPresentation,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorRates {
    pub fp_rate: f64,
    pub fn_rate: f64,
    pub false_positives: f64,
    pub false_negatives: f64,
    pub negatives: f64,
    pub positives: f64,
    /// No truly-normal type was presented; `fp_rate` is reported as 0.
    pub no_negatives: bool,
    /// No truly-anomalous type was presented; `fn_rate` is reported as 0.
    pub no_positives: bool,
}

impl ErrorRates {
    pub fn total(&self) -> f64 {
        self.fp_rate + self.fn_rate
    }

    fn finish(mut self) -> Self {
        self.no_negatives = self.negatives == 0.0;
        self.no_positives = self.positives == 0.0;
        self.fp_rate = if self.no_negatives {
            0.0
        } else {
            self.false_positives / self.negatives
        };
        self.fn_rate = if self.no_positives {
            0.0
        } else {
            self.false_negatives / self.positives
        };
        self
    }

    fn add(&mut self, predicted: Label, truth: Label, weight: f64) {
        match truth {
            Label::Normal => {
                self.negatives += weight;
                if predicted == Label::Anomalous {
                    self.false_positives += weight;
                }
            }
            Label::Anomalous => {
                self.positives += weight;
                if predicted == Label::Normal {
                    self.false_negatives += weight;
                }
            }
        }
    }
}

/// Per-type false positive and false negative rates over the presented
/// types (the keys of `predicted`). Types unknown to `truth` are skipped.
pub fn error_rates(
    predicted: &BTreeMap<AntigenType, Label>,
    truth: &TheoreticalLabeling,
) -> ErrorRates {
    let mut r = ErrorRates::default();
    for (&id, &p) in predicted {
        if let Some(t) = truth.get(id) {
            r.add(p, t, 1.0);
        }
    }
    r.finish()
}

/// Classifies `table` at `threshold` and scores it with the chosen weighting.
pub fn table_error_rates(
    table: &McavTable,
    truth: &TheoreticalLabeling,
    threshold: f64,
    weighting: RateWeighting,
) -> ErrorRates {
    let mut r = ErrorRates::default();
    for (id, e) in table.iter() {
        let Some(t) = truth.get(id) else { continue };
        let w = match weighting {
            RateWeighting::PerType => 1.0,
            RateWeighting::PerPresentation => e.total_count as f64,
        };
        r.add(classify_value(e.mcav(), threshold), t, w);
    }
    r.finish()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub t: f64,
    pub rates: ErrorRates,
    pub n_presented_types: usize,
}

/// Cumulative error rates sampled every `interval` seconds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorSeries {
    pub rows: Vec<ErrorRow>,
}

impl ErrorSeries {
    pub fn last(&self) -> Option<&ErrorRow> {
        self.rows.last()
    }

    /// Row at the first boundary at or after `t`.
    pub fn at(&self, t: f64) -> Option<&ErrorRow> {
        self.rows.iter().find(|r| r.t >= t - 1e-9)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub interval: f64,
    pub threshold: f64,
    pub weighting: RateWeighting,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            interval: 1.0,
            threshold: crate::dca::DEFAULT_MCAV_THRESHOLD,
            weighting: RateWeighting::PerType,
        }
    }
}

/// Error series over `[0, end]`: at each boundary `k * interval` the MCAV
/// table of every presentation with `t <= boundary` is classified and
/// scored. `end = None` stops at the last presentation; an empty log then
/// gives an empty series.
pub fn series(
    log: &[TimedPresentation],
    truth: &TheoreticalLabeling,
    opts: &SeriesOptions,
    end: Option<f64>,
) -> ErrorSeries {
    let end = match (end, log.last()) {
        (Some(e), _) => e,
        (None, Some(p)) => p.t,
        (None, None) => return ErrorSeries::default(),
    };
    let mut rows = Vec::new();
    let mut table = McavTable::new();
    let mut next = 0;
    let mut k = 1u64;
    loop {
        let boundary = k as f64 * opts.interval;
        if boundary > end + opts.interval - 1e-9 {
            break;
        }
        while next < log.len() && log[next].t <= boundary + 1e-9 {
            table.record(&log[next].presentation());
            next += 1;
        }
        rows.push(ErrorRow {
            t: boundary,
            rates: table_error_rates(&table, truth, opts.threshold, opts.weighting),
            n_presented_types: table.len(),
        });
        k += 1;
    }
    ErrorSeries { rows }
}
