use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::pose::Pose;

/// Exact constant-twist (unicycle) update over `dt` seconds.
pub fn integrate(pose: &Pose, v: f64, theta_dot: f64, dt: f64) -> Pose {
    let h0 = pose.heading;
    let h1 = h0 + theta_dot * dt;
    let (x, y) = if theta_dot.abs() < 1e-12 {
        (pose.x + v * dt * h0.cos(), pose.y + v * dt * h0.sin())
    } else {
        let r = v / theta_dot;
        (
            pose.x + r * (h1.sin() - h0.sin()),
            pose.y - r * (h1.cos() - h0.cos()),
        )
    };
    Pose::new(x, y, h1)
}

/// Dead-reckoning update: integrates velocities perturbed as
/// `v * (1 + e_v)` and `theta_dot + e_theta`, with both errors drawn from
/// a zero-mean Gaussian of standard deviation `noise_sigma * sqrt(dt)`.
/// With `noise_sigma == 0` no random draws happen and the result equals
/// [`integrate`].
pub fn odometry_step<R: Rng + ?Sized>(
    odom: &Pose,
    v: f64,
    theta_dot: f64,
    dt: f64,
    noise_sigma: f64,
    rng: &mut R,
) -> Pose {
    if noise_sigma <= 0.0 {
        return integrate(odom, v, theta_dot, dt);
    }
    let normal = Normal::new(0.0, noise_sigma * dt.sqrt()).expect("finite positive sigma");
    let e_v = normal.sample(rng);
    let e_theta = normal.sample(rng);
    integrate(odom, v * (1.0 + e_v), theta_dot + e_theta, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    #[test]
    fn straight_line() {
        let p = integrate(&Pose::new(100.0, 200.0, 0.0), 300.0, 0.0, 1.0);
        assert_relative_eq!(p.x, 400.0);
        assert_relative_eq!(p.y, 200.0);
        let p = integrate(&Pose::new(0.0, 0.0, FRAC_PI_2), 300.0, 0.0, 1.0);
        assert_relative_eq!(p.y, 300.0, epsilon = 1e-9);
    }

    #[test]
    fn rotation_in_place() {
        let p = integrate(&Pose::new(10.0, 20.0, 0.0), 0.0, FRAC_PI_2, 1.0);
        assert_eq!((p.x, p.y), (10.0, 20.0));
        assert_relative_eq!(p.heading, FRAC_PI_2);
    }

    #[test]
    fn full_circle_returns_home() {
        let start = Pose::new(1000.0, 1000.0, 0.3);
        let p = integrate(&start, 300.0, TAU, 1.0);
        assert_relative_eq!(p.x, start.x, epsilon = 1e-9);
        assert_relative_eq!(p.y, start.y, epsilon = 1e-9);
        let dh = (p.heading - start.heading).rem_euclid(TAU);
        assert!(dh < 1e-9 || TAU - dh < 1e-9);
    }

    #[test]
    fn half_circle_diameter() {
        // radius v / w = 300 / PI, ends a diameter to the left
        let p = integrate(&Pose::new(0.0, 0.0, 0.0), 300.0, PI, 1.0);
        assert_relative_eq!(p.x, 0.0, epsilon = 1e-9);
        assert_relative_eq!(p.y, 600.0 / PI, epsilon = 1e-9);
    }

    #[test]
    fn noiseless_odometry_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut truth = Pose::new(500.0, 500.0, 0.0);
        let mut odom = truth;
        for i in 0..1000 {
            let (v, w) = (250.0, ((i as f64) * 0.01).sin());
            truth = integrate(&truth, v, w, 0.1);
            odom = odometry_step(&odom, v, w, 0.1, 0.0, &mut rng);
        }
        assert_eq!(truth, odom);
    }

    #[test]
    fn seeded_odometry_repeats() {
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let mut p = Pose::new(0.0, 0.0, 0.0);
            for _ in 0..500 {
                p = odometry_step(&p, 300.0, 0.2, 0.1, 0.05, &mut rng);
            }
            p
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn drift_envelope_grows_with_time() {
        // mean position error over 20 seeded runs at 60 s checkpoints
        let dt = 0.1;
        let checkpoints = [600usize, 1800, 3600, 6000];
        let mut mean_err = [0.0; 4];
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut truth = Pose::new(0.0, 0.0, 0.0);
            let mut odom = truth;
            let mut k = 0;
            for step in 1..=6000 {
                let w = 0.3 * ((step as f64) * 0.013).sin();
                truth = integrate(&truth, 300.0, w, dt);
                odom = odometry_step(&odom, 300.0, w, dt, 0.05, &mut rng);
                if step == checkpoints[k] {
                    mean_err[k] += truth.distance_to(&odom) / 20.0;
                    k += 1;
                    if k == checkpoints.len() {
                        break;
                    }
                }
            }
        }
        for w in mean_err.windows(2) {
            assert!(w[1] > w[0], "{mean_err:?}");
        }
    }
}
