//! Dead-reckoning error over a ten-minute wander for several noise levels,
//! averaged over seeds.
//!
//! cargo run --release --example odometry_drift

use robodca::sim::{PenConfig, World};

fn main() -> robodca::Result<()> {
    let checkpoints = [60, 120, 300, 600];
    println!(
        "sigma  {}",
        checkpoints.map(|t| format!("{t:>7}s")).join("")
    );
    for sigma in [0.0, 0.025, 0.05, 0.1, 0.2] {
        let pen = PenConfig {
            noise_sigma: sigma,
            ..PenConfig::default()
        };
        let mut mean = [0.0; 4];
        let seeds = 10;
        for seed in 0..seeds {
            let mut world = World::new(&pen, seed)?;
            for tick in 1..=6000 {
                world.step(0.1);
                if let Some(i) = checkpoints.iter().position(|&t| t * 10 == tick) {
                    mean[i] += world.true_pose().distance_to(&world.odom_pose()) / seeds as f64;
                }
            }
        }
        println!(
            "{sigma:<6} {}",
            mean.map(|m| format!("{m:>7.0}mm")).join("")
        );
    }
    Ok(())
}
