use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};

/// Upright cylinder standing in the pen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub height: f64,
    #[serde(default)]
    pub pink: bool,
}

impl Obstacle {
    /// Pink and short enough to slip under the laser plane.
    pub fn is_anomalous(&self, laser_height: f64) -> bool {
        self.pink && self.height < laser_height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitTarget {
    Wall,
    Obstacle(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub distance: f64,
    pub target: HitTarget,
}

/// Rectangular pen `[0, width] x [0, height]` with walls on all four sides.
#[derive(Debug, Clone, PartialEq)]
pub struct Pen {
    width: f64,
    height: f64,
    wall_height: f64,
    obstacles: Vec<Obstacle>,
}

impl Pen {
    pub fn new(
        width: f64,
        height: f64,
        wall_height: f64,
        obstacles: Vec<Obstacle>,
    ) -> Result<Self> {
        for v in [width, height, wall_height] {
            check_finite("pen dimension", v)?;
            if v <= 0.0 {
                return Err(Error::InvalidConfig(
                    "pen dimensions must be positive".into(),
                ));
            }
        }
        for (i, o) in obstacles.iter().enumerate() {
            for v in [o.x, o.y, o.radius, o.height] {
                check_finite("obstacle field", v)?;
            }
            if o.radius <= 0.0 || o.height <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "obstacle {i}: radius and height must be positive"
                )));
            }
            if o.x - o.radius < 0.0
                || o.x + o.radius > width
                || o.y - o.radius < 0.0
                || o.y + o.radius > height
            {
                return Err(Error::InvalidConfig(format!(
                    "obstacle {i} is not inside the pen"
                )));
            }
            for (j, p) in obstacles.iter().enumerate().take(i) {
                if (o.x - p.x).hypot(o.y - p.y) < o.radius + p.radius {
                    return Err(Error::InvalidConfig(format!(
                        "obstacles {j} and {i} overlap"
                    )));
                }
            }
        }
        Ok(Self {
            width,
            height,
            wall_height,
            obstacles,
        })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn wall_height(&self) -> f64 {
        self.wall_height
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.width).contains(&x) && (0.0..=self.height).contains(&y)
    }

    /// Distance from `(x, y)` to the nearest wall or obstacle surface.
    /// Negative inside an obstacle.
    pub fn clearance(&self, x: f64, y: f64) -> f64 {
        let walls = x.min(self.width - x).min(y).min(self.height - y);
        self.obstacles
            .iter()
            .map(|o| (x - o.x).hypot(y - o.y) - o.radius)
            .fold(walls, f64::min)
    }

    /// First surface hit by a ray from `(x, y)` along world bearing `angle`,
    /// ignoring anything shorter than `min_height`. An origin inside a
    /// visible obstacle reports a hit at distance 0.
    pub fn raycast(&self, x: f64, y: f64, angle: f64, min_height: f64) -> Option<RayHit> {
        let (dy, dx) = angle.sin_cos();
        let mut best: Option<RayHit> = None;
        let mut consider = |distance: f64, target: HitTarget| {
            if distance >= 0.0 && best.is_none_or(|b| distance < b.distance) {
                best = Some(RayHit { distance, target });
            }
        };

        if self.wall_height >= min_height {
            let tx = if dx > 0.0 {
                (self.width - x) / dx
            } else if dx < 0.0 {
                -x / dx
            } else {
                f64::INFINITY
            };
            let ty = if dy > 0.0 {
                (self.height - y) / dy
            } else if dy < 0.0 {
                -y / dy
            } else {
                f64::INFINITY
            };
            consider(tx.min(ty).max(0.0), HitTarget::Wall);
        }

        for (i, o) in self.obstacles.iter().enumerate() {
            if o.height < min_height {
                continue;
            }
            if let Some(d) = ray_circle(x, y, angle, o) {
                consider(d, HitTarget::Obstacle(i));
            }
        }
        best
    }
}

/// Distance along the ray from `(x, y)` at bearing `angle` to the surface
/// of `o`, or 0 if the origin is already inside it.
pub fn ray_circle(x: f64, y: f64, angle: f64, o: &Obstacle) -> Option<f64> {
    let (dy, dx) = angle.sin_cos();
    let (ox, oy) = (x - o.x, y - o.y);
    let c = ox * ox + oy * oy - o.radius * o.radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    let b = dx * ox + dy * oy;
    let disc = b * b - c;
    if disc < 0.0 || b > 0.0 {
        return None;
    }
    Some(-b - disc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cylinder(x: f64, y: f64, h: f64) -> Obstacle {
        Obstacle {
            x,
            y,
            radius: 100.0,
            height: h,
            pink: true,
        }
    }

    fn pen() -> Pen {
        Pen::new(
            4200.0,
            3000.0,
            500.0,
            vec![
                cylinder(3000.0, 2200.0, 300.0),
                cylinder(1200.0, 800.0, 500.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn flat_wall_perpendicular() {
        let p = Pen::new(4200.0, 3000.0, 500.0, vec![]).unwrap();
        let hit = p.raycast(1000.0, 1500.0, PI, 0.0).unwrap();
        assert_relative_eq!(hit.distance, 1000.0, epsilon = 1e-9);
        assert_eq!(hit.target, HitTarget::Wall);
        let hit = p.raycast(1000.0, 1500.0, FRAC_PI_2, 0.0).unwrap();
        assert_relative_eq!(hit.distance, 1500.0, epsilon = 1e-9);
    }

    #[test]
    fn short_cylinder_invisible_to_high_plane() {
        let p = pen();
        // from (2400, 2200) looking +x: A surface at 500, east wall at 1800
        let laser = p.raycast(2400.0, 2200.0, 0.0, 330.0).unwrap();
        assert_eq!(laser.target, HitTarget::Wall);
        assert_relative_eq!(laser.distance, 1800.0, epsilon = 1e-9);
        let sonar = p.raycast(2400.0, 2200.0, 0.0, 0.0).unwrap();
        assert_eq!(sonar.target, HitTarget::Obstacle(0));
        assert_relative_eq!(sonar.distance, 500.0, epsilon = 1e-9);
    }

    #[test]
    fn tall_cylinder_seen_by_both() {
        let p = pen();
        let hit = p.raycast(600.0, 800.0, 0.0, 330.0).unwrap();
        assert_eq!(hit.target, HitTarget::Obstacle(1));
        assert_relative_eq!(hit.distance, 500.0, epsilon = 1e-9);
    }

    #[test]
    fn oblique_circle_hit_matches_brute_force_march() {
        let p = pen();
        let (x, y, a) = (2500.0, 1900.0, 0.55f64);
        let hit = p.raycast(x, y, a, 0.0).unwrap();
        let mut t = 0.0;
        while p.clearance(x + t * a.cos(), y + t * a.sin()) > 0.0 {
            t += 0.01;
        }
        assert!((hit.distance - t).abs() < 0.02, "{} vs {t}", hit.distance);
    }

    #[test]
    fn above_walls_nothing_to_hit() {
        let p = Pen::new(1200.0, 1200.0, 500.0, vec![]).unwrap();
        assert!(p.raycast(600.0, 600.0, 0.3, 600.0).is_none());
    }

    #[test]
    fn inside_obstacle_hits_at_zero() {
        let p = pen();
        assert_eq!(p.raycast(3000.0, 2200.0, 1.0, 0.0).unwrap().distance, 0.0);
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(Pen::new(1000.0, 1000.0, 500.0, vec![cylinder(50.0, 500.0, 300.0)]).is_err());
        assert!(Pen::new(
            1000.0,
            1000.0,
            500.0,
            vec![cylinder(500.0, 500.0, 300.0), cylinder(650.0, 500.0, 300.0)]
        )
        .is_err());
        assert!(Pen::new(-1.0, 1000.0, 500.0, vec![]).is_err());
    }

    #[test]
    fn clearance_values() {
        let p = pen();
        assert_relative_eq!(p.clearance(600.0, 1500.0), 600.0);
        assert_relative_eq!(p.clearance(600.0, 600.0), 600f64.hypot(200.0) - 100.0);
        assert_relative_eq!(p.clearance(1200.0, 600.0), 100.0);
    }
}
