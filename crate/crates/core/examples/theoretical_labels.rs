//! Compute the geometric ground truth for every antigen type and print a
//! map of how many headings in each grid square face the anomalous cylinder.
//!
//! cargo run --example theoretical_labels

use robodca::antigen::PenGrid;
use robodca::dca::{AntigenType, Label};
use robodca::oracle::{TheoreticalLabeling, TruthModel};
use robodca::sim::PenConfig;

fn main() -> robodca::Result<()> {
    let config = PenConfig::default();
    let pen = config.pen()?;
    let grid = PenGrid::new(config.width, config.height)?;
    let truth = TheoreticalLabeling::from_pen(&pen, &grid, &TruthModel::default())?;
    println!(
        "{} types: {} anomalous, {} normal",
        truth.len(),
        truth.count(Label::Anomalous),
        truth.count(Label::Normal)
    );
    println!("anomalous headings per square (top row is the far wall):");
    for row in (0..grid.n_rows()).rev() {
        let line: String = (0..grid.n_cols())
            .map(|col| {
                let base = (row * grid.n_cols() + col) * 12;
                let n = (0..12)
                    .filter(|s| truth.get(AntigenType(base + s)) == Some(Label::Anomalous))
                    .count();
                if n == 0 {
                    " .".to_string()
                } else {
                    format!("{n:2}")
                }
            })
            .collect();
        println!("{line}");
    }
    Ok(())
}
