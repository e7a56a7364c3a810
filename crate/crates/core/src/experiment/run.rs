use std::collections::BTreeMap;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::antigen::{emit_antigen, AntigenType, PenGrid};
use crate::dca::stream::{replay, StreamRecord};
use crate::dca::{
    classify, AntigenLedger, DcaEngine, Label, McavTable, SignalVector, TimedPresentation,
};
use crate::error::{Error, Result};
use crate::oracle::{series, ErrorSeries, SeriesOptions, TheoreticalLabeling, TruthModel};
use crate::sim::{TrajectoryRow, World};
use crate::transducer::SignalProcessor;

/// SplitMix64 finaliser; the stable mixing function behind every derived seed.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for run `run_index` of migration median `median`.
pub fn run_seed(base_seed: u64, median: f64, run_index: usize) -> u64 {
    base_seed ^ splitmix64(median.to_bits() ^ splitmix64(run_index as u64))
}

fn substream(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

const WORLD_STREAM: u64 = 1;
const DCA_STREAM: u64 = 2;

/// Per-type MCAV snapshot, written whenever a type received presentations
/// during a cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McavRow {
    pub t: f64,
    pub antigen: AntigenType,
    pub mature_count: u64,
    pub total_count: u64,
}

impl McavRow {
    pub fn mcav(&self) -> f64 {
        self.mature_count as f64 / self.total_count as f64
    }
}

fn record_cycle(
    t: f64,
    presented: &[crate::dca::Presentation],
    table: &mut McavTable,
    log: &mut Vec<TimedPresentation>,
    mcav_rows: &mut Vec<McavRow>,
) {
    for p in presented {
        table.record(p);
        log.push(TimedPresentation::new(t, *p));
    }
    let touched: std::collections::BTreeSet<AntigenType> =
        presented.iter().map(|p| p.antigen).collect();
    for id in touched {
        let e = table.get(id).expect("just recorded");
        mcav_rows.push(McavRow {
            t,
            antigen: id,
            mature_count: e.mature_count,
            total_count: e.total_count,
        });
    }
}

/// Fused inputs and emitted antigen for one DCA cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalRow {
    pub t: f64,
    pub signals: SignalVector,
    /// `None` when the encoding pose fell outside the pen.
    pub antigen: Option<AntigenType>,
    pub copies: usize,
}

/// Everything one simulated run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub median: f64,
    pub run_index: usize,
    pub seed: u64,
    pub presentations: Vec<TimedPresentation>,
    pub mcav: Vec<McavRow>,
    pub errors: ErrorSeries,
    pub trajectory: Vec<TrajectoryRow>,
    pub signals: Vec<SignalRow>,
    pub final_table: McavTable,
    pub ledger: AntigenLedger,
    /// Cycles at which emitted != queued + held + presented.
    pub ledger_violations: u64,
    pub collisions: u64,
    pub min_clearance: f64,
    /// Cycles whose encoding pose fell outside the pen; no antigen emitted.
    pub outside_pen_events: u64,
}

impl RunResult {
    /// `M30` style name for the median.
    pub fn label(&self) -> String {
        format!("M{}", self.median)
    }
}

/// Pen-derived pieces shared by every run of a sweep.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub grid: PenGrid,
    pub truth: TheoreticalLabeling,
    pub processor: SignalProcessor,
}

impl RunContext {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let pen = config.pen.pen()?;
        let grid = PenGrid::new(config.pen.width, config.pen.height)?;
        let model = TruthModel {
            fov: config.signal_fov()?,
            horizon: config.range_lookup.horizon(),
            laser_height: config.pen.sensors.lrf_min_visible_height,
            ..TruthModel::default()
        };
        Ok(Self {
            truth: TheoreticalLabeling::from_pen(&pen, &grid, &model)?,
            grid,
            processor: SignalProcessor {
                fov: model.fov,
                table: config.range_lookup.clone(),
                pamp_scale: config.effective_pamp_scale(),
            },
        })
    }
}

/// One seeded run: simulate, transduce, encode, run the DCA every cycle,
/// and score the cumulative classification once per cycle.
pub fn run_single(config: &ExperimentConfig, median: f64, run_index: usize) -> Result<RunResult> {
    let ctx = RunContext::new(config)?;
    run_with_context(config, &ctx, median, run_index)
}

pub fn run_with_context(
    config: &ExperimentConfig,
    ctx: &RunContext,
    median: f64,
    run_index: usize,
) -> Result<RunResult> {
    let seed = run_seed(config.base_seed, median, run_index);
    let limits = config.pen.robot.limits()?;
    let mut world = World::new(&config.pen, substream(seed, WORLD_STREAM))?;
    let mut engine = DcaEngine::new(config.dca, median, substream(seed, DCA_STREAM))?;

    let ticks_per_cycle = config.ticks_per_cycle();
    let total_ticks = config.total_ticks();
    let mut trajectory = Vec::with_capacity(total_ticks as usize);
    let mut log = Vec::new();
    let mut mcav = Vec::new();
    let mut signal_log = Vec::with_capacity((total_ticks / ticks_per_cycle) as usize);
    let mut table = McavTable::new();
    let mut ledger_violations = 0;
    let mut outside_pen_events = 0;

    for tick in 1..=total_ticks {
        world.step(config.tick_s);
        // rounded so times print as 0.3 rather than 0.30000000000000004
        let t = (tick as f64 * config.tick_s * 1e9).round() / 1e9;
        trajectory.push(TrajectoryRow {
            t,
            ..world.trajectory_row()
        });
        if tick % ticks_per_cycle != 0 {
            continue;
        }
        let readings = world.readings();
        let signals = ctx
            .processor
            .process(&readings.lrf, &readings.sonar, readings.blob_area)?;
        let pose = if config.perfect_localization {
            world.true_pose()
        } else {
            world.odom_pose()
        };
        let (v, theta_dot) = world.velocity();
        let mut row = SignalRow {
            t,
            signals,
            antigen: None,
            copies: 0,
        };
        match emit_antigen(&pose, v, theta_dot, &ctx.grid, &limits) {
            Ok(batch) => {
                engine.add_antigen(batch.antigen, batch.copies);
                row.antigen = Some(batch.antigen);
                row.copies = batch.copies;
            }
            Err(Error::OutsidePen { .. }) => outside_pen_events += 1,
            Err(e) => return Err(e),
        }
        signal_log.push(row);
        engine.set_signals(signals)?;
        let presented = engine.cycle();
        record_cycle(t, &presented, &mut table, &mut log, &mut mcav);
        if !engine.ledger().is_conserved() {
            ledger_violations += 1;
        }
    }

    let opts = SeriesOptions {
        interval: config.cycle_s,
        threshold: config.mcav_threshold,
        weighting: config.rate_weighting,
    };
    let end = (total_ticks as f64 * config.tick_s * 1e9).round() / 1e9;
    let errors = series(&log, &ctx.truth, &opts, Some(end));
    Ok(RunResult {
        median,
        run_index,
        seed,
        presentations: log,
        mcav,
        errors,
        trajectory,
        signals: signal_log,
        final_table: table,
        ledger: engine.ledger(),
        ledger_violations,
        collisions: world.collisions(),
        min_clearance: world.min_clearance(),
        outside_pen_events,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub median: f64,
    pub t: f64,
    pub mean_fp: f64,
    pub mean_fn: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ordered by median (as configured), then run index.
    pub runs: Vec<RunResult>,
    pub summary: Vec<SummaryRow>,
    pub truth: TheoreticalLabeling,
}

impl SweepResult {
    pub fn summary_for(&self, median: f64) -> impl Iterator<Item = &SummaryRow> + '_ {
        self.summary.iter().filter(move |r| r.median == median)
    }

    /// Averaged row for `median` at the first boundary at or after `t`.
    pub fn summary_at(&self, median: f64, t: f64) -> Option<&SummaryRow> {
        self.summary_for(median).find(|r| r.t >= t - 1e-9)
    }

    pub fn final_summary(&self, median: f64) -> Option<&SummaryRow> {
        self.summary_for(median).last()
    }
}

/// Averages the error series of runs that share a median, row by row.
pub fn average_series(median: f64, runs: &[&RunResult]) -> Vec<SummaryRow> {
    let n = runs.len() as f64;
    let rows = runs.iter().map(|r| r.errors.rows.len()).min().unwrap_or(0);
    (0..rows)
        .map(|i| {
            let (fp, fneg) = runs.iter().fold((0.0, 0.0), |(a, b), r| {
                let rates = r.errors.rows[i].rates;
                (a + rates.fp_rate, b + rates.fn_rate)
            });
            SummaryRow {
                median,
                t: runs[0].errors.rows[i].t,
                mean_fp: fp / n,
                mean_fn: fneg / n,
            }
        })
        .collect()
}

/// Every (median, run) pair, executed in parallel. Results do not depend
/// on scheduling: each run owns its seed and state.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    sweep_impl(config, true)
}

/// [`run_sweep`] on the calling thread only.
pub fn run_sweep_serial(config: &ExperimentConfig) -> Result<SweepResult> {
    sweep_impl(config, false)
}

fn sweep_impl(config: &ExperimentConfig, parallel: bool) -> Result<SweepResult> {
    let ctx = RunContext::new(config)?;
    let jobs: Vec<(f64, usize)> = config
        .medians
        .iter()
        .flat_map(|&m| (0..config.runs_per_median).map(move |i| (m, i)))
        .collect();
    let exec = |&(median, run_index): &(f64, usize)| {
        run_with_context(config, &ctx, median, run_index).map_err(|e| Error::RunFailed {
            median,
            run_index,
            seed: run_seed(config.base_seed, median, run_index),
            source: Box::new(e),
        })
    };
    let results: Vec<Result<RunResult>> = if parallel {
        jobs.par_iter().map(exec).collect()
    } else {
        jobs.iter().map(exec).collect()
    };
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut summary = Vec::new();
    for &m in &config.medians {
        let group: Vec<&RunResult> = runs.iter().filter(|r| r.median == m).collect();
        summary.extend(average_series(m, &group));
    }
    Ok(SweepResult {
        runs,
        summary,
        truth: ctx.truth,
    })
}

/// Outcome of replaying a synthetic stream through the engine.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticResult {
    pub median: f64,
    pub presentations: Vec<TimedPresentation>,
    pub mcav: Vec<McavRow>,
    pub table: McavTable,
    pub classification: BTreeMap<AntigenType, Label>,
    pub ledger: AntigenLedger,
}

/// Feeds `records` straight into a fresh engine, bypassing the simulator
/// and the transducers.
pub fn run_synthetic(
    records: &[StreamRecord],
    config: &ExperimentConfig,
    median: f64,
) -> Result<SyntheticResult> {
    let seed = substream(run_seed(config.base_seed, median, 0), DCA_STREAM);
    let mut engine = DcaEngine::new(config.dca, median, seed)?;
    let presentations = replay(&mut engine, records)?;

    let mut table = McavTable::new();
    let mut mcav = Vec::new();
    let mut replayed = Vec::new();
    let mut i = 0;
    while i < presentations.len() {
        let t = presentations[i].t;
        let j = presentations[i..]
            .iter()
            .position(|p| p.t != t)
            .map_or(presentations.len(), |k| i + k);
        let batch: Vec<_> = presentations[i..j]
            .iter()
            .map(|p| p.presentation())
            .collect();
        record_cycle(t, &batch, &mut table, &mut replayed, &mut mcav);
        i = j;
    }
    let classification = classify(&table, config.mcav_threshold)?;
    Ok(SyntheticResult {
        median,
        presentations,
        mcav,
        table,
        classification,
        ledger: engine.ledger(),
    })
}
