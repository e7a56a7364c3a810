//! Let the robot wander the default pen and report where it went, what its
//! sensors saw and how far dead reckoning drifted.
//!
//! cargo run --release --example wander_sim [-- seconds [seed]]

use robodca::sim::{Behavior, PenConfig, World};

fn main() -> robodca::Result<()> {
    let mut args = std::env::args().skip(1);
    let seconds: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(120.0);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let pen = PenConfig::default();
    let mut world = World::new(&pen, seed)?;
    let dt = 0.1;
    let ticks = (seconds / dt).round() as usize;
    let (mut cruise, mut avoid, mut stop) = (0, 0, 0);
    let mut visited = std::collections::BTreeSet::new();
    for tick in 1..=ticks {
        world.step(dt);
        match world.behavior() {
            Behavior::Cruise => cruise += 1,
            Behavior::Avoid => avoid += 1,
            Behavior::Stop => stop += 1,
        }
        let p = world.true_pose();
        visited.insert(((p.x / 300.0) as i32, (p.y / 300.0) as i32));
        if tick % 100 == 0 {
            let o = world.odom_pose();
            let r = world.readings();
            println!(
                "t {:5.0}s  true ({:6.0}, {:6.0}, {:4.0} deg)  drift {:5.1} mm  blob {:7.1}",
                tick as f64 * dt,
                p.x,
                p.y,
                p.heading.to_degrees(),
                p.distance_to(&o),
                r.blob_area
            );
        }
    }
    println!(
        "cruise {cruise} / avoid {avoid} / stop {stop} ticks, {} grid squares visited, {} collisions, min clearance {:.0} mm",
        visited.len(),
        world.collisions(),
        world.min_clearance()
    );
    Ok(())
}
