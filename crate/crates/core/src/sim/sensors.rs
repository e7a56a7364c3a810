//! Ranged sensors and the pink-blob camera.
//!
//! The laser scans a horizontal plane, so it only sees obstacles at least
//! `min_visible_height` tall. The sonar cones reach the floor and see
//! everything. The camera reports an inverse-square apparent area for the
//! largest visible pink obstacle.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::geometry::{ray_circle, Pen};
use crate::pose::{wrap_pi, Pose};
use crate::transducer::RangeReading;

/// Height of the laser plane: anything shorter is invisible to the laser.
pub const LASER_PLANE_HEIGHT_MM: f64 = 330.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    pub lrf_half_span_deg: f64,
    pub lrf_resolution_deg: f64,
    pub lrf_max_range: f64,
    pub lrf_min_visible_height: f64,
    pub sonar_count: usize,
    pub sonar_half_angle_deg: f64,
    pub sonar_rays: usize,
    pub sonar_max_range: f64,
    pub camera_half_fov_deg: f64,
    /// Surface distance beyond which a pink region is too small to detect.
    pub camera_max_range: f64,
    pub camera_gain: f64,
    pub noise: SensorNoise,
}

/// Measurement noise applied on top of the ideal readings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorNoise {
    /// Standard deviation of laser ranges, mm.
    pub lrf_sd: f64,
    /// Standard deviation of sonar ranges as a fraction of the range.
    pub sonar_sd_frac: f64,
    /// Probability that a transducer loses its echo and reports nothing.
    pub sonar_dropout: f64,
    /// Standard deviation of the blob area as a fraction of the area.
    pub camera_area_sd_frac: f64,
    /// Probability per frame of a spurious pink region.
    pub camera_false_rate: f64,
    /// Spurious regions are uniform in `[0, camera_false_area]`.
    pub camera_false_area: f64,
}

impl Default for SensorNoise {
    fn default() -> Self {
        Self {
            lrf_sd: 10.0,
            sonar_sd_frac: 0.05,
            sonar_dropout: 0.05,
            camera_area_sd_frac: 0.2,
            camera_false_rate: 0.0,
            camera_false_area: 0.0,
        }
    }
}

impl SensorNoise {
    pub const fn none() -> Self {
        Self {
            lrf_sd: 0.0,
            sonar_sd_frac: 0.0,
            sonar_dropout: 0.0,
            camera_area_sd_frac: 0.0,
            camera_false_rate: 0.0,
            camera_false_area: 0.0,
        }
    }

    pub fn is_none(&self) -> bool {
        *self == Self::none()
    }

    fn validate(&self) -> crate::Result<()> {
        let all = [
            self.lrf_sd,
            self.sonar_sd_frac,
            self.sonar_dropout,
            self.camera_area_sd_frac,
            self.camera_false_rate,
            self.camera_false_area,
        ];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0)
            || self.sonar_dropout > 1.0
            || self.camera_false_rate > 1.0
        {
            return Err(crate::Error::InvalidConfig(
                "sensor noise: values must be finite, non-negative, probabilities at most 1".into(),
            ));
        }
        Ok(())
    }

    /// Perturbs one set of ideal readings in place. Ranges stay non-negative
    /// and within `max_range`; a reading pushed past it becomes no return.
    pub fn apply<R: Rng + ?Sized>(
        &self,
        cfg: &SensorConfig,
        lrf: &mut [RangeReading],
        sonar: &mut [RangeReading],
        blob_area: &mut f64,
        rng: &mut R,
    ) {
        if self.is_none() {
            return;
        }
        let unit = Normal::new(0.0, 1.0).expect("unit normal");
        for r in lrf.iter_mut() {
            if let Some(d) = r.distance {
                let d = (d + self.lrf_sd * unit.sample(rng)).max(0.0);
                r.distance = (d <= cfg.lrf_max_range).then_some(d);
            }
        }
        for r in sonar.iter_mut() {
            if let Some(d) = r.distance {
                if rng.random::<f64>() < self.sonar_dropout {
                    r.distance = None;
                    continue;
                }
                let d = (d * (1.0 + self.sonar_sd_frac * unit.sample(rng))).max(0.0);
                r.distance = (d <= cfg.sonar_max_range).then_some(d);
            }
        }
        let mut area = (*blob_area * (1.0 + self.camera_area_sd_frac * unit.sample(rng))).max(0.0);
        if rng.random::<f64>() < self.camera_false_rate {
            area = area.max(rng.random::<f64>() * self.camera_false_area);
        }
        *blob_area = area;
    }
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            lrf_half_span_deg: 90.0,
            lrf_resolution_deg: 1.0,
            lrf_max_range: 8000.0,
            lrf_min_visible_height: LASER_PLANE_HEIGHT_MM,
            sonar_count: 16,
            sonar_half_angle_deg: 15.0,
            sonar_rays: 7,
            sonar_max_range: 5000.0,
            camera_half_fov_deg: 30.0,
            camera_max_range: 1200.0,
            camera_gain: 1.0e4,
            noise: SensorNoise::default(),
        }
    }
}

impl SensorConfig {
    pub fn validate(&self) -> crate::Result<()> {
        let bad = |m: &str| Err(crate::Error::InvalidConfig(format!("sensors: {m}")));
        let finite = [
            self.lrf_half_span_deg,
            self.lrf_resolution_deg,
            self.lrf_max_range,
            self.lrf_min_visible_height,
            self.sonar_half_angle_deg,
            self.sonar_max_range,
            self.camera_half_fov_deg,
            self.camera_max_range,
            self.camera_gain,
        ];
        if finite.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return bad("all parameters must be finite and non-negative");
        }
        if self.lrf_resolution_deg <= 0.0 || self.lrf_half_span_deg <= 0.0 {
            return bad("laser span and resolution must be positive");
        }
        if self.sonar_count == 0 || self.sonar_rays == 0 {
            return bad("sonar needs at least one transducer and one ray");
        }
        if self.camera_gain <= 0.0 {
            return bad("camera gain must be positive");
        }
        self.noise.validate()
    }

    /// Camera area for an obstacle of the given size seen at `distance`
    /// (centre to centre).
    pub fn blob_area(&self, radius: f64, height: f64, distance: f64) -> f64 {
        self.camera_gain * 2.0 * radius * height / (distance * distance)
    }

    /// Bearings of the sonar transducers in the robot frame, first one
    /// straight ahead.
    pub fn sonar_bearings(&self) -> Vec<f64> {
        let step = std::f64::consts::TAU / self.sonar_count as f64;
        (0..self.sonar_count)
            .map(|i| wrap_pi(i as f64 * step))
            .collect()
    }
}

fn range_or_none(d: Option<f64>, max_range: f64) -> Option<f64> {
    d.filter(|&d| d <= max_range)
}

/// One beam per resolution step across the laser span.
pub fn lrf_scan(pen: &Pen, pose: &Pose, cfg: &SensorConfig) -> Vec<RangeReading> {
    let n = (2.0 * cfg.lrf_half_span_deg / cfg.lrf_resolution_deg).round() as usize;
    (0..=n)
        .map(|i| {
            let bearing = (-cfg.lrf_half_span_deg + i as f64 * cfg.lrf_resolution_deg).to_radians();
            let hit = pen.raycast(
                pose.x,
                pose.y,
                pose.heading + bearing,
                cfg.lrf_min_visible_height,
            );
            RangeReading {
                angle: bearing,
                distance: range_or_none(hit.map(|h| h.distance), cfg.lrf_max_range),
            }
        })
        .collect()
}

/// Each transducer reports the minimum over a fan of rays across its cone.
pub fn sonar_scan(pen: &Pen, pose: &Pose, cfg: &SensorConfig) -> Vec<RangeReading> {
    let half = cfg.sonar_half_angle_deg.to_radians();
    cfg.sonar_bearings()
        .into_iter()
        .map(|axis| {
            let nearest = (0..cfg.sonar_rays)
                .filter_map(|k| {
                    let offset = if cfg.sonar_rays == 1 {
                        0.0
                    } else {
                        -half + 2.0 * half * k as f64 / (cfg.sonar_rays - 1) as f64
                    };
                    pen.raycast(pose.x, pose.y, pose.heading + axis + offset, 0.0)
                        .map(|h| h.distance)
                })
                .reduce(f64::min);
            RangeReading {
                angle: axis,
                distance: range_or_none(nearest, cfg.sonar_max_range),
            }
        })
        .collect()
}

/// Largest apparent pink area in the camera's field of view. An obstacle
/// is occluded when the line to its centre first meets another obstacle at
/// least as tall.
pub fn camera_blob(pen: &Pen, pose: &Pose, cfg: &SensorConfig) -> f64 {
    let half_fov = cfg.camera_half_fov_deg.to_radians();
    pen.obstacles()
        .iter()
        .enumerate()
        .filter(|(_, o)| o.pink)
        .filter_map(|(i, o)| {
            let (dx, dy) = (o.x - pose.x, o.y - pose.y);
            let world_bearing = dy.atan2(dx);
            if wrap_pi(world_bearing - pose.heading).abs() > half_fov {
                return None;
            }
            let distance = dx.hypot(dy);
            if distance - o.radius > cfg.camera_max_range {
                return None;
            }
            let occluded = pen
                .obstacles()
                .iter()
                .enumerate()
                .filter(|&(j, b)| j != i && b.height >= o.height)
                .filter_map(|(_, b)| ray_circle(pose.x, pose.y, world_bearing, b))
                .any(|d| d < distance);
            (!occluded).then(|| cfg.blob_area(o.radius, o.height, distance))
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::super::geometry::Obstacle;
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cyl(x: f64, y: f64, h: f64, pink: bool) -> Obstacle {
        Obstacle {
            x,
            y,
            radius: 100.0,
            height: h,
            pink,
        }
    }

    fn forward(scan: &[RangeReading]) -> Option<f64> {
        scan.iter().find(|r| r.angle.abs() < 1e-9).unwrap().distance
    }

    #[test]
    fn lrf_sees_tall_cylinder() {
        let pen = Pen::new(4200.0, 3000.0, 500.0, vec![cyl(1200.0, 800.0, 500.0, true)]).unwrap();
        let pose = Pose::new(500.0, 800.0, 0.0);
        let scan = lrf_scan(&pen, &pose, &SensorConfig::default());
        assert_eq!(scan.len(), 181);
        assert_relative_eq!(forward(&scan).unwrap(), 600.0, epsilon = 1e-9);
        for r in scan.iter().filter(|r| r.angle.abs() <= 22f64.to_radians()) {
            let d = r.distance.unwrap();
            assert!(d >= 600.0 - 1e-9);
        }
    }

    #[test]
    fn lrf_blind_to_short_cylinder() {
        let pen = Pen::new(
            4200.0,
            3000.0,
            500.0,
            vec![cyl(3000.0, 2200.0, 300.0, true)],
        )
        .unwrap();
        let pose = Pose::new(2400.0, 2200.0, 0.0);
        let scan = lrf_scan(&pen, &pose, &SensorConfig::default());
        assert_relative_eq!(forward(&scan).unwrap(), 1800.0, epsilon = 1e-9);
    }

    #[test]
    fn lrf_empty_pen_matches_rectangle() {
        let pen = Pen::new(4200.0, 3000.0, 500.0, vec![]).unwrap();
        let pose = Pose::new(1000.0, 1000.0, 0.0);
        for r in lrf_scan(&pen, &pose, &SensorConfig::default()) {
            let (s, c) = r.angle.sin_cos();
            let tx = (4200.0 - 1000.0) / c;
            let ty = if s > 0.0 {
                2000.0 / s
            } else if s < 0.0 {
                1000.0 / -s
            } else {
                f64::INFINITY
            };
            assert_relative_eq!(r.distance.unwrap(), tx.min(ty), max_relative = 1e-9);
        }
    }

    #[test]
    fn sonar_sees_short_cylinder_ahead() {
        let pen = Pen::new(
            4200.0,
            3000.0,
            500.0,
            vec![cyl(3000.0, 2200.0, 300.0, true)],
        )
        .unwrap();
        let pose = Pose::new(2500.0, 2200.0, 0.0);
        let scan = sonar_scan(&pen, &pose, &SensorConfig::default());
        assert_eq!(scan.len(), 16);
        assert_relative_eq!(forward(&scan).unwrap(), 400.0, epsilon = 1e-9);
    }

    #[test]
    fn sonar_cone_catches_off_axis_object() {
        // 12 degrees off-axis, outside a pencil beam but inside the cone
        let bearing = 12f64.to_radians();
        let (x, y) = (
            1000.0 + 800.0 * bearing.cos(),
            1500.0 + 800.0 * bearing.sin(),
        );
        let pen = Pen::new(4200.0, 3000.0, 500.0, vec![cyl(x, y, 200.0, false)]).unwrap();
        let scan = sonar_scan(
            &pen,
            &Pose::new(1000.0, 1500.0, 0.0),
            &SensorConfig::default(),
        );
        let d = forward(&scan).unwrap();
        assert!(d < 800.0 && d > 650.0, "{d}");
    }

    #[test]
    fn sonar_rear_transducer_only() {
        let pen = Pen::new(
            4200.0,
            3000.0,
            500.0,
            vec![cyl(1600.0, 1500.0, 200.0, false)],
        )
        .unwrap();
        let pose = Pose::new(2000.0, 1500.0, 0.0);
        let scan = sonar_scan(&pen, &pose, &SensorConfig::default());
        let rear = scan
            .iter()
            .find(|r| (r.angle.abs() - PI).abs() < 1e-9)
            .unwrap();
        assert_relative_eq!(rear.distance.unwrap(), 300.0, epsilon = 1e-9);
        let ahead = forward(&scan).unwrap();
        assert_relative_eq!(ahead, 2200.0, epsilon = 1e-6);
    }

    #[test]
    fn camera_inverse_square() {
        let cfg = SensorConfig::default();
        let pen = Pen::new(
            4200.0,
            3000.0,
            500.0,
            vec![cyl(3000.0, 1500.0, 300.0, true)],
        )
        .unwrap();
        let near = camera_blob(&pen, &Pose::new(2500.0, 1500.0, 0.0), &cfg);
        let far = camera_blob(&pen, &Pose::new(2000.0, 1500.0, 0.0), &cfg);
        assert!(near > 0.0);
        assert_relative_eq!(near / far, 4.0, epsilon = 1e-9);
        // beyond detection range
        assert_eq!(
            camera_blob(&pen, &Pose::new(1500.0, 1500.0, 0.0), &cfg),
            0.0
        );
        assert_relative_eq!(
            near,
            1e4 * 2.0 * 100.0 * 300.0 / 500.0f64.powi(2),
            epsilon = 1e-9
        );
    }

    #[test]
    fn camera_ignores_out_of_view_and_non_pink() {
        let cfg = SensorConfig::default();
        let pen = Pen::new(
            4200.0,
            3000.0,
            500.0,
            vec![
                cyl(3000.0, 1500.0, 300.0, true),
                cyl(1000.0, 1000.0, 300.0, false),
            ],
        )
        .unwrap();
        // facing away from the pink one, towards the grey one
        assert_eq!(camera_blob(&pen, &Pose::new(2000.0, 1500.0, PI), &cfg), 0.0);
    }

    #[test]
    fn camera_occlusion() {
        let cfg = SensorConfig::default();
        let pen = Pen::new(
            4200.0,
            3000.0,
            500.0,
            vec![
                cyl(3000.0, 1500.0, 300.0, true),
                cyl(2500.0, 1500.0, 600.0, false),
            ],
        )
        .unwrap();
        assert_eq!(
            camera_blob(&pen, &Pose::new(2000.0, 1500.0, 0.0), &cfg),
            0.0
        );
        // a shorter grey obstacle does not hide it
        let pen = Pen::new(
            4200.0,
            3000.0,
            500.0,
            vec![
                cyl(3000.0, 1500.0, 300.0, true),
                cyl(2500.0, 1500.0, 100.0, false),
            ],
        )
        .unwrap();
        assert!(camera_blob(&pen, &Pose::new(2000.0, 1500.0, 0.0), &cfg) > 0.0);
    }

    #[test]
    fn camera_area_strictly_decreases_with_distance() {
        let cfg = SensorConfig::default();
        let cfg = SensorConfig {
            camera_max_range: 5000.0,
            ..cfg
        };
        let pen = Pen::new(
            4200.0,
            3000.0,
            500.0,
            vec![cyl(3800.0, 1500.0, 300.0, true)],
        )
        .unwrap();
        let mut last = f64::INFINITY;
        for x in (300..3400).step_by(50).rev() {
            let a = camera_blob(&pen, &Pose::new(x as f64, 1500.0, 0.0), &cfg);
            assert!(a < last);
            last = a;
        }
    }

    fn ideal() -> (SensorConfig, Vec<RangeReading>, Vec<RangeReading>, f64) {
        let cfg = SensorConfig::default();
        let pen = Pen::new(
            4200.0,
            3000.0,
            500.0,
            vec![cyl(3000.0, 1500.0, 300.0, true)],
        )
        .unwrap();
        let pose = Pose::new(2200.0, 1500.0, 0.0);
        let lrf = lrf_scan(&pen, &pose, &cfg);
        let sonar = sonar_scan(&pen, &pose, &cfg);
        let blob = camera_blob(&pen, &pose, &cfg);
        (cfg, lrf, sonar, blob)
    }

    #[test]
    fn zero_noise_leaves_readings_untouched() {
        use rand::SeedableRng;
        let (cfg, lrf, sonar, blob) = ideal();
        let (mut l, mut s, mut b) = (lrf.clone(), sonar.clone(), blob);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        SensorNoise::none().apply(&cfg, &mut l, &mut s, &mut b, &mut rng);
        assert_eq!((l, s, b), (lrf, sonar, blob));
    }

    #[test]
    fn full_dropout_silences_sonar() {
        use rand::SeedableRng;
        let (cfg, mut lrf, mut sonar, mut blob) = ideal();
        let noise = SensorNoise {
            sonar_dropout: 1.0,
            ..SensorNoise::default()
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        noise.apply(&cfg, &mut lrf, &mut sonar, &mut blob, &mut rng);
        assert!(sonar.iter().all(|r| r.distance.is_none()));
        assert!(lrf.iter().any(|r| r.distance.is_some()));
    }

    #[test]
    fn noisy_readings_stay_physical_and_seeded() {
        use rand::SeedableRng;
        let (cfg, lrf, sonar, blob) = ideal();
        let noise = SensorNoise {
            lrf_sd: 500.0,
            sonar_sd_frac: 0.5,
            camera_area_sd_frac: 2.0,
            camera_false_rate: 0.5,
            camera_false_area: 1000.0,
            ..SensorNoise::default()
        };
        let run = |seed| {
            let (mut l, mut s, mut b) = (lrf.clone(), sonar.clone(), blob);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            noise.apply(&cfg, &mut l, &mut s, &mut b, &mut rng);
            (l, s, b)
        };
        for seed in 0..50 {
            let (l, s, b) = run(seed);
            assert!(b >= 0.0);
            assert!(l
                .iter()
                .filter_map(|r| r.distance)
                .all(|d| (0.0..=cfg.lrf_max_range).contains(&d)));
            assert!(s
                .iter()
                .filter_map(|r| r.distance)
                .all(|d| (0.0..=cfg.sonar_max_range).contains(&d)));
        }
        assert_eq!(run(7), run(7));
        assert_ne!(run(7), run(8));
    }

    #[test]
    fn noise_validation() {
        let mut cfg = SensorConfig::default();
        cfg.validate().unwrap();
        cfg.noise.sonar_dropout = 1.5;
        assert!(cfg.validate().is_err());
        cfg.noise = SensorNoise {
            lrf_sd: -1.0,
            ..SensorNoise::default()
        };
        assert!(cfg.validate().is_err());
    }
}
