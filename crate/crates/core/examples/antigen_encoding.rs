//! Encode robot poses as antigen types and show how speed sets the number
//! of copies emitted.
//!
//! cargo run --example antigen_encoding

use robodca::antigen::{emit_antigen, multiplicity, PenGrid, VelocityLimits};
use robodca::pose::Pose;

fn main() -> robodca::Result<()> {
    let grid = PenGrid::new(4200.0, 3000.0)?;
    println!(
        "{} x {} cells, {} antigen types",
        grid.n_cols(),
        grid.n_rows(),
        grid.total_types()
    );

    for (x, y, deg) in [
        (150.0, 150.0, 0.0),
        (600.0, 600.0, 45.0),
        (3000.0, 2200.0, 359.0),
        (4199.0, 2999.0, 180.0),
    ] {
        let pose = Pose::new(x, y, f64::to_radians(deg));
        let id = grid.encode(&pose)?;
        let back = grid.decode(id)?;
        println!(
            "({x:6.0}, {y:6.0}, {deg:3.0} deg) -> {id:5} -> centre ({:.0}, {:.0}, {:.0} deg)",
            back.x,
            back.y,
            back.heading.to_degrees()
        );
    }

    let limits = VelocityLimits::new(400.0, 1.5)?;
    println!("\ncopies by speed (rows mm/s, columns rad/s)");
    print!("{:>6}", "");
    let turns = [0.0, 0.5, 1.0, 1.5];
    for w in turns {
        print!("{w:>6}");
    }
    println!();
    for v in [0.0, 100.0, 200.0, 300.0, 400.0] {
        print!("{v:>6}");
        for w in turns {
            print!("{:>6}", multiplicity(v, w, &limits)?);
        }
        println!();
    }

    let batch = emit_antigen(&Pose::new(1000.0, 1000.0, 0.3), 300.0, 0.0, &grid, &limits)?;
    println!(
        "\ncruising at 300 mm/s: {} copies of antigen {}",
        batch.copies, batch.antigen
    );
    Ok(())
}
