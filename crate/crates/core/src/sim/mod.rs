//! Deterministic 2D simulation of the test pen and the wandering robot.

mod controller;
mod geometry;
mod kinematics;
mod sensors;
mod world;

pub use controller::{
    nearest_front, wander_step, Behavior, Command, WanderController, WanderParams,
};
pub use geometry::{ray_circle, HitTarget, Obstacle, Pen, RayHit};
pub use kinematics::{integrate, odometry_step};
pub use sensors::{
    camera_blob, lrf_scan, sonar_scan, SensorConfig, SensorNoise, LASER_PLANE_HEIGHT_MM,
};
pub use world::{PenConfig, RobotParams, SensorReadings, StartPose, TrajectoryRow, World};
