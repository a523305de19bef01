//! Robust single rotation averaging under the chordal metric.
//!
//! The average is the chordal L1 median `argmin_R Σ ‖R_i − R‖_F`, computed by a
//! Weiszfeld iteration on SO(3) seeded at the projected elementwise median.

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::geom::{chordal_distance, geodesic_distance, project_to_so3, RotationMatrix};
use crate::scalar::Real;

/// A rotation together with the correspondence index that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationSample<T: Real> {
    pub rotation: RotationMatrix<T>,
    pub source_index: usize,
}

impl<T: Real> RotationSample<T> {
    pub fn new(rotation: RotationMatrix<T>, source_index: usize) -> Self {
        Self {
            rotation,
            source_index,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AveragingConfig {
    pub max_iterations: usize,
    /// Stop once an update moves the estimate by less than this geodesic angle.
    pub step_tolerance: f64,
    /// Lower bound on sample distances in the Weiszfeld weights.
    pub distance_floor: f64,
}

impl Default for AveragingConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10,
            step_tolerance: 1e-6,
            distance_floor: 1e-5,
        }
    }
}

/// `θ = 2√2 sin(θ_geo / 2)`.
pub fn chordal_threshold_from_geodesic<T: Real>(theta_geo: T) -> T {
    T::lit(2.0 * std::f64::consts::SQRT_2) * (theta_geo / T::lit(2.0)).sin()
}

/// Source indices of the samples strictly within chordal distance `theta` of
/// `center`, in input order.
pub fn chordal_consensus<T: Real>(
    samples: &[RotationSample<T>],
    center: &RotationMatrix<T>,
    theta: T,
) -> Vec<usize> {
    samples
        .iter()
        .filter(|s| chordal_distance(&s.rotation, center) < theta)
        .map(|s| s.source_index)
        .collect()
}

pub fn robust_lee_chordal<T: Real>(samples: &[RotationSample<T>]) -> Result<RotationMatrix<T>> {
    robust_lee_chordal_with(samples, &AveragingConfig::default())
}

pub fn robust_lee_chordal_with<T: Real>(
    samples: &[RotationSample<T>],
    config: &AveragingConfig,
) -> Result<RotationMatrix<T>> {
    match samples.len() {
        0 => return Err(Error::EmptyInput),
        1 => return Ok(samples[0].rotation),
        _ => {}
    }

    let mut estimate = match project_to_so3(&elementwise_median(samples)) {
        Ok(r) => r,
        Err(_) => medoid(samples),
    };

    let floor = T::lit(config.distance_floor);
    let tol = T::lit(config.step_tolerance);
    for _ in 0..config.max_iterations {
        let mut acc = Matrix3::zeros();
        for s in samples {
            let d = chordal_distance(&s.rotation, &estimate).max(floor);
            acc += s.rotation.matrix() / d;
        }
        let next = match project_to_so3(&acc) {
            Ok(r) => r,
            Err(_) => break,
        };
        let step = geodesic_distance(&estimate, &next);
        estimate = next;
        if step < tol {
            break;
        }
    }

    Ok(snap_to_sample(samples, estimate))
}

fn elementwise_median<T: Real>(samples: &[RotationSample<T>]) -> Matrix3<T> {
    let mut column = Vec::with_capacity(samples.len());
    Matrix3::from_fn(|r, c| {
        column.clear();
        column.extend(samples.iter().map(|s| s.rotation.matrix()[(r, c)]));
        column.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let m = column.len();
        if m % 2 == 1 {
            column[m / 2]
        } else {
            (column[m / 2 - 1] + column[m / 2]) / T::lit(2.0)
        }
    })
}

fn medoid<T: Real>(samples: &[RotationSample<T>]) -> RotationMatrix<T> {
    let cost = |r: &RotationMatrix<T>| {
        samples
            .iter()
            .fold(T::zero(), |acc, s| acc + chordal_distance(&s.rotation, r))
    };
    let mut best = samples[0].rotation;
    let mut best_cost = cost(&best);
    for s in &samples[1..] {
        let c = cost(&s.rotation);
        if c < best_cost {
            best = s.rotation;
            best_cost = c;
        }
    }
    best
}

/// The floored Weiszfeld iteration only approaches a sample asymptotically.
/// When the sample nearest the estimate satisfies the geometric-median
/// optimality condition (pull of all other samples no larger than its
/// multiplicity), that sample is the exact minimizer and is returned instead.
fn snap_to_sample<T: Real>(samples: &[RotationSample<T>], estimate: RotationMatrix<T>) -> RotationMatrix<T> {
    let nearest = samples
        .iter()
        .map(|s| (chordal_distance(&s.rotation, &estimate), s.rotation))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(_, r)| r)
        .expect("non-empty");

    let coincide = T::lit(T::DEGENERACY_TOL.sqrt());
    let mut multiplicity = T::zero();
    let mut pull = Matrix3::zeros();
    for s in samples {
        let diff = s.rotation.matrix() - nearest.matrix();
        let d = diff.norm();
        if d <= coincide {
            multiplicity += T::one();
        } else {
            pull += diff / d;
        }
    }
    if pull.norm() <= multiplicity {
        nearest
    } else {
        estimate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{random_rotation, Vec3};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn samples(rs: &[RotationMatrix<f64>]) -> Vec<RotationSample<f64>> {
        rs.iter().enumerate().map(|(i, r)| RotationSample::new(*r, i)).collect()
    }

    fn perturb(rng: &mut ChaCha8Rng, r: &RotationMatrix<f64>, angle: f64) -> RotationMatrix<f64> {
        let axis = Vec3::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        *r * RotationMatrix::from_axis_angle(&axis, angle)
    }

    fn chordal_cost(s: &[RotationSample<f64>], r: &RotationMatrix<f64>) -> f64 {
        s.iter().map(|x| chordal_distance(&x.rotation, r)).sum()
    }

    #[test]
    fn unanimity_and_single_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r0: RotationMatrix<f64> = random_rotation(&mut rng);
        let avg = robust_lee_chordal(&samples(&[r0; 9])).unwrap();
        assert!(geodesic_distance(&avg, &r0) < 1e-9);
        assert_eq!(robust_lee_chordal(&samples(&[r0])).unwrap(), r0);
        assert_eq!(robust_lee_chordal::<f64>(&[]), Err(Error::EmptyInput));
    }

    /// Brute-force minimization of the chordal L1 cost over a grid of
    /// rotation vectors around the estimate.
    fn grid_minimum(s: &[RotationSample<f64>], center: &RotationMatrix<f64>, radius: f64, steps: i32) -> f64 {
        let mut best = f64::INFINITY;
        for a in -steps..=steps {
            for b in -steps..=steps {
                for c in -steps..=steps {
                    let w = Vec3::new(a as f64, b as f64, c as f64) * (radius / steps as f64);
                    let r = *center * RotationMatrix::exp(&w);
                    best = best.min(chordal_cost(s, &r));
                }
            }
        }
        best
    }

    #[test]
    fn majority_copies_beat_random_outliers() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let r0: RotationMatrix<f64> = random_rotation(&mut rng);
            let mut rs = vec![r0; 7];
            rs.extend((0..3).map(|_| random_rotation::<f64, _>(&mut rng)));
            let s = samples(&rs);
            let avg = robust_lee_chordal(&s).unwrap();
            assert!(geodesic_distance(&avg, &r0) < 1e-6);
            // a coarse grid over a neighborhood of SO(3) finds nothing better
            let grid = grid_minimum(&s, &r0, 0.6, 6);
            assert!(chordal_cost(&s, &avg) <= grid + 1e-9);
        }
    }

    #[test]
    fn breakdown_with_bare_majority() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut ok = 0;
        for _ in 0..100 {
            let r0: RotationMatrix<f64> = random_rotation(&mut rng);
            let mut rs: Vec<_> = (0..51).map(|_| { let a = rng.random::<f64>() * 0.01; perturb(&mut rng, &r0, a) }).collect();
            rs.extend((0..50).map(|_| random_rotation::<f64, _>(&mut rng)));
            let avg = robust_lee_chordal(&samples(&rs)).unwrap();
            if geodesic_distance(&avg, &r0) < 0.05 {
                ok += 1;
            }
        }
        assert!(ok >= 95, "{ok}/100");
    }

    #[test]
    fn noisy_cluster_average_is_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r0: RotationMatrix<f64> = random_rotation(&mut rng);
        let rs: Vec<_> = (0..40).map(|_| perturb(&mut rng, &r0, 0.02)).collect();
        let avg = robust_lee_chordal(&samples(&rs)).unwrap();
        assert!(geodesic_distance(&avg, &r0) < 0.02);
    }

    #[test]
    fn averaging_500_rotations_is_fast() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r0: RotationMatrix<f64> = random_rotation(&mut rng);
        let mut rs: Vec<_> = (0..300).map(|_| perturb(&mut rng, &r0, 0.01)).collect();
        rs.extend((0..200).map(|_| random_rotation::<f64, _>(&mut rng)));
        let s = samples(&rs);
        let start = std::time::Instant::now();
        let avg = robust_lee_chordal(&s).unwrap();
        let elapsed = start.elapsed();
        assert!(geodesic_distance(&avg, &r0) < 0.01);
        assert!(elapsed.as_secs_f64() < 0.01, "{elapsed:?}");
    }

    #[test]
    fn threshold_conversion() {
        assert_eq!(chordal_threshold_from_geodesic(0.0f64), 0.0);
        assert_abs_diff_eq!(chordal_threshold_from_geodesic(0.1f64), 0.141_362_3, epsilon = 1e-6);
        assert_abs_diff_eq!(
            chordal_threshold_from_geodesic(std::f64::consts::PI),
            2.0 * 2f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn consensus_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c: RotationMatrix<f64> = random_rotation(&mut rng);
        let all = samples(&[c; 4]);
        assert_eq!(chordal_consensus(&all, &c, 0.01), vec![0, 1, 2, 3]);

        let far = samples(&[perturb(&mut rng, &c, 1.0), perturb(&mut rng, &c, 2.0)]);
        assert!(chordal_consensus(&far, &c, 0.15).is_empty());

        // geodesic 0.02 → chordal 0.0283; geodesic 0.2 → chordal 0.2825
        let mixed: Vec<_> = [0.02, 0.2, 0.02, 0.2, 0.2, 0.02]
            .iter()
            .map(|&a| perturb(&mut rng, &c, a))
            .collect();
        assert_eq!(chordal_consensus(&samples(&mixed), &c, 0.15), vec![0, 2, 5]);
    }

    #[test]
    fn consensus_is_left_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c: RotationMatrix<f64> = random_rotation(&mut rng);
        let rs: Vec<_> = (0..60).map(|_| { let a = rng.random::<f64>() * 0.3; perturb(&mut rng, &c, a) }).collect();
        let g: RotationMatrix<f64> = random_rotation(&mut rng);
        let moved: Vec<_> = rs.iter().map(|r| g * *r).collect();
        assert_eq!(
            chordal_consensus(&samples(&rs), &c, 0.15),
            chordal_consensus(&samples(&moved), &(g * c), 0.15)
        );
    }
}
