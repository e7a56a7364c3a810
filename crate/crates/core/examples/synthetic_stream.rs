//! Replay a text stream of signals and antigen through the engine for
//! every migration median, without the simulator.
//!
//! cargo run --example synthetic_stream [-- path/to/stream.txt]

use std::fs::File;
use std::io::BufReader;

use robodca::dca::stream::parse_stream;
use robodca::experiment::{run_synthetic, ExperimentConfig};

fn main() -> robodca::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../configs/separation_stream.txt"
        )
        .to_string()
    });
    let file = File::open(&path).map_err(|source| robodca::Error::Io {
        path: path.clone().into(),
        source,
    })?;
    let records = parse_stream(BufReader::new(file))?;
    println!("{} records from {path}", records.len());

    let config = ExperimentConfig::default();
    for &median in &config.medians {
        let res = run_synthetic(&records, &config, median)?;
        let row: Vec<String> = res
            .table
            .iter()
            .map(|(id, e)| format!("{id}:{:.2}", e.mcav()))
            .collect();
        println!("M{median:<4} mcav {}", row.join("  "));
    }
    Ok(())
}
