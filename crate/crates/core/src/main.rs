use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use robodca::dca::stream::parse_stream;
use robodca::experiment::{output, run_sweep, run_synthetic, ExperimentConfig};
use robodca::Result;

/// Run the wander-and-classify experiment, or replay a synthetic stream
/// through the DCA engine.
#[derive(Debug, Parser)]
#[command(name = "robodca", version)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated migration medians, e.g. 15,30,60.
    #[arg(long, value_delimiter = ',')]
    median: Option<Vec<f64>>,
    /// Runs per median.
    #[arg(long)]
    runs: Option<usize>,
    /// Simulated seconds per run.
    #[arg(long)]
    duration: Option<f64>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Odometry noise level.
    #[arg(long = "noise-sigma")]
    noise_sigma: Option<f64>,
    /// Encode antigen from the true pose.
    #[arg(long = "perfect-localization")]
    perfect_localization: bool,
    /// Replay this stream file instead of simulating.
    #[arg(long)]
    synthetic: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(m) = &cli.median {
        cfg.medians = m.clone();
    }
    if let Some(r) = cli.runs {
        cfg.runs_per_median = r;
    }
    if let Some(d) = cli.duration {
        cfg.duration_s = d;
    }
    if let Some(s) = cli.seed {
        cfg.base_seed = s;
    }
    if let Some(n) = cli.noise_sigma {
        cfg.pen.noise_sigma = n;
    }
    if cli.perfect_localization {
        cfg.perfect_localization = true;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = build_config(cli)?;
    if let Some(path) = &cli.synthetic {
        let file = File::open(path).map_err(|source| robodca::Error::Io {
            path: path.clone(),
            source,
        })?;
        let records = parse_stream(BufReader::new(file))?;
        for &median in &cfg.medians {
            let result = run_synthetic(&records, &cfg, median)?;
            output::write_synthetic(&cfg.out_dir, &result)?;
            let anomalous = result
                .classification
                .values()
                .filter(|l| l.as_u8() == 1)
                .count();
            println!(
                "M{median}: {} presentations, {} types, {anomalous} anomalous",
                result.presentations.len(),
                result.table.len(),
            );
        }
        return Ok(());
    }

    let sweep = run_sweep(&cfg)?;
    output::write_sweep(&cfg.out_dir, &cfg, &sweep)?;
    for r in &sweep.runs {
        let (fp, fneg) = r
            .errors
            .last()
            .map_or((0.0, 0.0), |row| (row.rates.fp_rate, row.rates.fn_rate));
        println!(
            "{} run {} seed {}: final fp {fp:.4} fn {fneg:.4}, {} presentations, {} collisions",
            r.label(),
            r.run_index,
            r.seed,
            r.presentations.len(),
            r.collisions,
        );
    }
    println!("wrote {}", cfg.out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
