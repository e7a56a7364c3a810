//! Turn range readings and a blob area into PAMP, danger and safe signals.
//!
//! cargo run --example signal_lookup

use robodca::transducer::{
    nearest_in_fov, strength_from_distance, FovWindow, RangeLookup, RangeReading, SignalProcessor,
};

fn main() -> robodca::Result<()> {
    let table = RangeLookup::default();
    println!("distance -> strength");
    for d in (0..=1500).step_by(150) {
        println!(
            "{d:5} mm  {:6.2}",
            strength_from_distance(&table, d as f64)?
        );
    }

    // a wall ahead at 1 m, a short obstacle 500 mm away at 10 degrees that
    // only the sonar sees, and something close but outside the window
    let fov = FovWindow::symmetric_degrees(22.0)?;
    let reading = |deg: f64, d: Option<f64>| RangeReading {
        angle: deg.to_radians(),
        distance: d,
    };
    let lrf: Vec<_> = (-90..=90)
        .map(|a| reading(a as f64, Some(if a == 60 { 300.0 } else { 1000.0 })))
        .collect();
    let sonar = vec![
        reading(0.0, Some(1000.0)),
        reading(10.0, Some(500.0)),
        reading(60.0, Some(300.0)),
    ];
    println!(
        "nearest laser hit in window: {:?}",
        nearest_in_fov(&lrf, &fov)?
    );
    println!(
        "nearest sonar hit in window: {:?}",
        nearest_in_fov(&sonar, &fov)?
    );

    let processor = SignalProcessor {
        fov,
        table,
        pamp_scale: 0.03,
    };
    let s = processor.process(&lrf, &sonar, 1500.0)?;
    println!(
        "pamp {:.1}  danger {:.1}  safe {:.1}",
        s.pamp, s.danger, s.safe
    );
    Ok(())
}
