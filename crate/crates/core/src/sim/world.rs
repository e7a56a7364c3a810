use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::controller::{Behavior, WanderController, WanderParams};
use super::geometry::{Obstacle, Pen};
use super::kinematics::{integrate, odometry_step};
use super::sensors::{camera_blob, lrf_scan, sonar_scan, SensorConfig, LASER_PLANE_HEIGHT_MM};
use crate::antigen::VelocityLimits;
use crate::error::{check_finite, io_err, Error, Result};
use crate::pose::Pose;
use crate::transducer::RangeReading;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartPose {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub heading_deg: f64,
}

impl StartPose {
    pub fn pose(&self) -> Pose {
        Pose::new(self.x, self.y, self.heading_deg.to_radians())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotParams {
    pub v_max: f64,
    pub theta_dot_max: f64,
    pub body_radius: f64,
}

impl Default for RobotParams {
    fn default() -> Self {
        Self {
            v_max: 400.0,
            theta_dot_max: 1.5,
            body_radius: 220.0,
        }
    }
}

impl RobotParams {
    pub fn limits(&self) -> Result<VelocityLimits> {
        VelocityLimits::new(self.v_max, self.theta_dot_max)
    }
}

/// Contents of a pen configuration file: geometry, robot start, robot and
/// sensor parameters, controller tuning and odometry noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PenConfig {
    pub width: f64,
    pub height: f64,
    pub wall_height: f64,
    pub noise_sigma: f64,
    pub start: StartPose,
    pub obstacles: Vec<Obstacle>,
    pub robot: RobotParams,
    pub sensors: SensorConfig,
    pub controller: WanderParams,
}

impl Default for PenConfig {
    fn default() -> Self {
        Self {
            width: 4200.0,
            height: 3000.0,
            wall_height: 500.0,
            noise_sigma: 0.05,
            start: StartPose {
                x: 600.0,
                y: 600.0,
                heading_deg: 0.0,
            },
            obstacles: vec![
                // A: short, pink, anomalous
                Obstacle {
                    x: 3000.0,
                    y: 2200.0,
                    radius: 100.0,
                    height: 300.0,
                    pink: true,
                },
                // B: tall, pink, normal
                Obstacle {
                    x: 1200.0,
                    y: 800.0,
                    radius: 100.0,
                    height: 500.0,
                    pink: true,
                },
            ],
            robot: RobotParams::default(),
            sensors: SensorConfig::default(),
            controller: WanderParams::default(),
        }
    }
}

impl PenConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("pen config always serializes")
    }

    pub fn pen(&self) -> Result<Pen> {
        Pen::new(
            self.width,
            self.height,
            self.wall_height,
            self.obstacles.clone(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let pen = self.pen()?;
        if pen.wall_height() < self.sensors.lrf_min_visible_height {
            return Err(Error::InvalidConfig(
                "walls must be tall enough for the laser to see".into(),
            ));
        }
        check_finite("noise_sigma", self.noise_sigma)?;
        if self.noise_sigma < 0.0 {
            return Err(Error::InvalidConfig("noise_sigma must be >= 0".into()));
        }
        self.robot.limits()?;
        check_finite("body_radius", self.robot.body_radius)?;
        if self.robot.body_radius <= 0.0 {
            return Err(Error::InvalidConfig("body_radius must be positive".into()));
        }
        self.sensors.validate()?;
        self.controller.validate()?;
        if self.controller.v_cruise > self.robot.v_max
            || self.controller.v_turn > self.robot.v_max
            || self.controller.turn_rate > self.robot.theta_dot_max
        {
            return Err(Error::InvalidConfig(
                "controller speeds exceed the robot's limits".into(),
            ));
        }
        let s = self.start.pose();
        if pen.clearance(s.x, s.y) < self.robot.body_radius {
            return Err(Error::InvalidConfig(
                "start pose collides with the pen geometry".into(),
            ));
        }
        Ok(())
    }

    /// Obstacles that are pink and shorter than the laser plane.
    pub fn anomalous_obstacles(&self) -> impl Iterator<Item = &Obstacle> + '_ {
        self.obstacles
            .iter()
            .filter(|o| o.is_anomalous(LASER_PLANE_HEIGHT_MM))
    }
}

/// Latest output of every sensor.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorReadings {
    pub lrf: Vec<RangeReading>,
    pub sonar: Vec<RangeReading>,
    pub blob_area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub true_pose: Pose,
    pub odom_pose: Pose,
    pub v: f64,
    pub theta_dot: f64,
}

/// The pen, the robot and its sensors, advanced one tick at a time.
#[derive(Debug, Clone)]
pub struct World {
    pen: Pen,
    config: PenConfig,
    controller: WanderController,
    rng: ChaCha8Rng,
    sensor_rng: ChaCha8Rng,
    t: f64,
    true_pose: Pose,
    odom_pose: Pose,
    v: f64,
    theta_dot: f64,
    readings: SensorReadings,
    behavior: Behavior,
    collisions: u64,
    min_clearance: f64,
}

impl World {
    pub fn new(config: &PenConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let pen = config.pen()?;
        let start = config.start.pose();
        let mut sensor_rng = ChaCha8Rng::seed_from_u64(seed);
        sensor_rng.set_stream(1);
        let readings = sense(&pen, &start, &config.sensors, &mut sensor_rng);
        Ok(Self {
            min_clearance: pen.clearance(start.x, start.y),
            pen,
            config: config.clone(),
            controller: WanderController::new(config.controller),
            rng: ChaCha8Rng::seed_from_u64(seed),
            sensor_rng,
            t: 0.0,
            true_pose: start,
            odom_pose: start,
            v: 0.0,
            theta_dot: 0.0,
            readings,
            behavior: Behavior::Cruise,
            collisions: 0,
        })
    }

    pub fn pen(&self) -> &Pen {
        &self.pen
    }

    pub fn config(&self) -> &PenConfig {
        &self.config
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn true_pose(&self) -> Pose {
        self.true_pose
    }

    pub fn odom_pose(&self) -> Pose {
        self.odom_pose
    }

    pub fn velocity(&self) -> (f64, f64) {
        (self.v, self.theta_dot)
    }

    pub fn readings(&self) -> &SensorReadings {
        &self.readings
    }

    pub fn behavior(&self) -> Behavior {
        self.behavior
    }

    /// Ticks on which the commanded motion would have brought the body
    /// into contact with the pen geometry and the guard had to block it.
    pub fn collisions(&self) -> u64 {
        self.collisions
    }

    /// Smallest centre-to-surface distance seen so far.
    pub fn min_clearance(&self) -> f64 {
        self.min_clearance
    }

    pub fn trajectory_row(&self) -> TrajectoryRow {
        TrajectoryRow {
            t: self.t,
            true_pose: self.true_pose,
            odom_pose: self.odom_pose,
            v: self.v,
            theta_dot: self.theta_dot,
        }
    }

    /// Sense, decide, move the true pose (with a collision guard), update
    /// dead reckoning, then refresh the sensors at the new pose.
    pub fn step(&mut self, dt: f64) {
        assert!(dt > 0.0 && dt.is_finite(), "dt must be positive");
        let robot = self.config.robot;
        let cmd = self
            .controller
            .step(&self.readings.lrf, &self.readings.sonar, dt, &mut self.rng);
        let mut v = cmd.v.clamp(-robot.v_max, robot.v_max);
        let mut theta_dot = cmd
            .theta_dot
            .clamp(-robot.theta_dot_max, robot.theta_dot_max);

        let mut next = integrate(&self.true_pose, v, theta_dot, dt);
        if self.pen.clearance(next.x, next.y) < robot.body_radius {
            self.collisions += 1;
            v = 0.0;
            if theta_dot == 0.0 {
                theta_dot = self.config.controller.turn_rate.min(robot.theta_dot_max);
            }
            next = integrate(&self.true_pose, 0.0, theta_dot, dt);
        }

        self.odom_pose = odometry_step(
            &self.odom_pose,
            v,
            theta_dot,
            dt,
            self.config.noise_sigma,
            &mut self.rng,
        );
        self.true_pose = next;
        self.v = v;
        self.theta_dot = theta_dot;
        self.behavior = cmd.behavior;
        self.t += dt;
        self.min_clearance = self.min_clearance.min(self.pen.clearance(next.x, next.y));
        self.readings = sense(
            &self.pen,
            &self.true_pose,
            &self.config.sensors,
            &mut self.sensor_rng,
        );
    }
}

fn sense(pen: &Pen, pose: &Pose, sensors: &SensorConfig, rng: &mut ChaCha8Rng) -> SensorReadings {
    let mut r = SensorReadings {
        lrf: lrf_scan(pen, pose, sensors),
        sonar: sonar_scan(pen, pose, sensors),
        blob_area: camera_blob(pen, pose, sensors),
    };
    sensors
        .noise
        .apply(sensors, &mut r.lrf, &mut r.sonar, &mut r.blob_area, rng);
    r
}
