//! The full experiment: every migration median, several seeded runs each,
//! averaged false positive and false negative rates over time.
//!
//! cargo run --release --example migration_sweep [-- seconds [out_dir]]

use robodca::experiment::{output, run_sweep, ExperimentConfig};

fn main() -> robodca::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut config = ExperimentConfig::default();
    if let Some(d) = args.next().and_then(|s| s.parse().ok()) {
        config.duration_s = d;
    }
    let sweep = run_sweep(&config)?;

    let marks: Vec<f64> = [60.0, 120.0, 300.0, 600.0]
        .into_iter()
        .filter(|&t| t <= config.duration_s)
        .collect();
    println!("mean fp / fn per median");
    for &m in &config.medians {
        let cells: Vec<String> = marks
            .iter()
            .filter_map(|&t| sweep.summary_at(m, t))
            .map(|s| format!("t{:<4} {:.3}/{:.3}", s.t, s.mean_fp, s.mean_fn))
            .collect();
        println!("M{m:<4} {}", cells.join("   "));
    }
    let collisions: u64 = sweep.runs.iter().map(|r| r.collisions).sum();
    println!("{} runs, {collisions} collisions", sweep.runs.len());

    if let Some(dir) = args.next() {
        let files = output::write_sweep(dir.as_ref(), &config, &sweep)?;
        println!("wrote {} files to {dir}", files.len());
    }
    Ok(())
}
