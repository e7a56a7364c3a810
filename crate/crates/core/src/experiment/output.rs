//! CSV and TOML artifacts. Every file has a header row and a fixed column
//! order; floats use Rust's shortest round-trip formatting so repeated runs
//! produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::run::{McavRow, RunResult, SignalRow, SummaryRow, SweepResult, SyntheticResult};
use crate::dca::stream::write_presentations;
use crate::error::{io_err, Result};
use crate::oracle::{ErrorSeries, TheoreticalLabeling};
use crate::sim::TrajectoryRow;

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn finish(mut w: csv::Writer<BufWriter<File>>, path: &Path) -> Result<()> {
    w.flush().map_err(io_err(path))
}

pub fn write_mcav(path: &Path, rows: &[McavRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "antigen_id", "mature_count", "total_count", "mcav"])?;
    for r in rows {
        w.write_record(&[
            r.t.to_string(),
            r.antigen.to_string(),
            r.mature_count.to_string(),
            r.total_count.to_string(),
            r.mcav().to_string(),
        ])?;
    }
    finish(w, path)
}

pub fn write_errors(path: &Path, series: &ErrorSeries) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "fp_rate", "fn_rate", "n_presented_types"])?;
    for r in &series.rows {
        w.write_record(&[
            r.t.to_string(),
            r.rates.fp_rate.to_string(),
            r.rates.fn_rate.to_string(),
            r.n_presented_types.to_string(),
        ])?;
    }
    finish(w, path)
}

pub fn write_signals(path: &Path, rows: &[SignalRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["t", "pamp", "danger", "safe", "antigen_id", "copies"])?;
    for r in rows {
        w.write_record(&[
            r.t.to_string(),
            r.signals.pamp.to_string(),
            r.signals.danger.to_string(),
            r.signals.safe.to_string(),
            r.antigen.map(|a| a.0.to_string()).unwrap_or_default(),
            r.copies.to_string(),
        ])?;
    }
    finish(w, path)
}

pub fn write_trajectory(path: &Path, rows: &[TrajectoryRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "t",
        "true_x",
        "true_y",
        "true_heading",
        "odom_x",
        "odom_y",
        "odom_heading",
        "v",
        "theta_dot",
    ])?;
    for r in rows {
        w.write_record(&[
            r.t.to_string(),
            r.true_pose.x.to_string(),
            r.true_pose.y.to_string(),
            r.true_pose.heading.to_string(),
            r.odom_pose.x.to_string(),
            r.odom_pose.y.to_string(),
            r.odom_pose.heading.to_string(),
            r.v.to_string(),
            r.theta_dot.to_string(),
        ])?;
    }
    finish(w, path)
}

pub fn write_truth(path: &Path, truth: &TheoreticalLabeling) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["antigen_id", "label"])?;
    for (id, label) in truth.iter() {
        w.write_record(&[id.to_string(), label.as_u8().to_string()])?;
    }
    finish(w, path)
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["median", "t", "mean_fp", "mean_fn"])?;
    for r in rows {
        w.write_record(&[
            r.median.to_string(),
            r.t.to_string(),
            r.mean_fp.to_string(),
            r.mean_fn.to_string(),
        ])?;
    }
    finish(w, path)
}

pub fn write_config(path: &Path, config: &ExperimentConfig) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(config.to_toml().as_bytes())
        .map_err(io_err(path))?;
    f.flush().map_err(io_err(path))
}

fn write_presentations_file(path: &Path, run: &[crate::dca::TimedPresentation]) -> Result<()> {
    let mut f = create(path)?;
    write_presentations(&mut f, run)?;
    f.flush().map_err(io_err(path))
}

/// Writes the four per-run artifacts, named `M<median>_run<i>_<kind>.csv`.
pub fn write_run(dir: &Path, run: &RunResult) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let stem = format!("{}_run{}", run.label(), run.run_index);
    let path = |kind: &str| dir.join(format!("{stem}_{kind}.csv"));
    let files = vec![
        path("presentations"),
        path("mcav"),
        path("errors"),
        path("trajectory"),
        path("signals"),
    ];
    write_presentations_file(&files[0], &run.presentations)?;
    write_mcav(&files[1], &run.mcav)?;
    write_errors(&files[2], &run.errors)?;
    write_trajectory(&files[3], &run.trajectory)?;
    write_signals(&files[4], &run.signals)?;
    Ok(files)
}

/// Writes every run, the averaged summary, the truth table and the
/// effective configuration.
pub fn write_sweep(
    dir: &Path,
    config: &ExperimentConfig,
    sweep: &SweepResult,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files = Vec::new();
    for run in &sweep.runs {
        files.extend(write_run(dir, run)?);
    }
    let summary = dir.join("summary.csv");
    write_summary(&summary, &sweep.summary)?;
    let truth = dir.join("truth.csv");
    write_truth(&truth, &sweep.truth)?;
    let cfg = dir.join("config.toml");
    write_config(&cfg, config)?;
    files.extend([summary, truth, cfg]);
    Ok(files)
}

/// Writes `synthetic_M<median>_presentations.csv`, `..._mcav.csv` and
/// `..._classification.csv` (`antigen_id, mcav, label`).
pub fn write_synthetic(dir: &Path, result: &SyntheticResult) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let stem = format!("synthetic_M{}", result.median);
    let pres = dir.join(format!("{stem}_presentations.csv"));
    write_presentations_file(&pres, &result.presentations)?;
    let mcav = dir.join(format!("{stem}_mcav.csv"));
    write_mcav(&mcav, &result.mcav)?;
    let class = dir.join(format!("{stem}_classification.csv"));
    let mut w = csv_writer(&class)?;
    w.write_record(["antigen_id", "mcav", "label"])?;
    for (id, label) in &result.classification {
        let m = result.table.mcav(*id).unwrap_or(0.0);
        w.write_record(&[id.to_string(), m.to_string(), label.as_u8().to_string()])?;
    }
    finish(w, &class)?;
    Ok(vec![pres, mcav, class])
}
