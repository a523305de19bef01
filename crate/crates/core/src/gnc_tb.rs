//! Graduated non-convexity with the Tukey's Biweight kernel over an inlier
//! candidate set.
//!
//! Each iteration alternates a weighted SVD rotation fit with the closed-form
//! TB weight update, then shrinks `mu` by a constant factor. Large `mu` starts
//! with a lenient, nearly convex surrogate; `mu → 1` recovers plain TB
//! truncation at `xi`.

use crate::error::{Error, Result};
use crate::geom::{weighted_alignment_subset, weighted_centroids, CorrespondenceSet, RotationMatrix, Vec3, WeightedAlignment};
use crate::robust_cost::{tb_objective, tb_weight, GncParams};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GncConfig {
    pub mu0: f64,
    pub decay: f64,
    /// Converged when no weight moves by this much in one update.
    pub weight_tolerance: f64,
}

impl Default for GncConfig {
    fn default() -> Self {
        Self {
            mu0: 100.0,
            decay: 1.2,
            weight_tolerance: 1e-6,
        }
    }
}

/// Objective values recorded around the two half-steps of one iteration, all
/// at the iteration's `mu`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GncIterate<T: Real> {
    pub mu: T,
    /// Previous weights and previous transform; absent on the first iteration.
    pub objective_before: Option<T>,
    /// Previous weights, refitted transform.
    pub objective_after_rotation: T,
    /// Updated weights, refitted transform.
    pub objective_after_weights: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GncTrace<T: Real> {
    pub iterations: usize,
    /// `mu` after the last decay step.
    pub final_mu: T,
    /// One weight per candidate, in candidate order.
    pub final_weights: Vec<T>,
    pub rotation: RotationMatrix<T>,
    /// Centroids of the candidates under `final_weights`.
    pub centroid_p: Vec3<T>,
    pub centroid_q: Vec3<T>,
    pub history: Vec<GncIterate<T>>,
}

impl<T: Real> GncTrace<T> {
    /// Translation implied by the final rotation and weighted centroids.
    pub fn translation(&self) -> Vec3<T> {
        self.centroid_q - self.rotation * self.centroid_p
    }
}

pub fn solve_gnc_tb<T: Real>(set: &CorrespondenceSet<T>, candidate: &[usize], xi: T) -> Result<GncTrace<T>> {
    solve_gnc_tb_with(set, candidate, xi, &GncConfig::default(), None)
}

/// As [`solve_gnc_tb`], optionally starting from `initial_weights` instead of
/// all ones.
pub fn solve_gnc_tb_with<T: Real>(
    set: &CorrespondenceSet<T>,
    candidate: &[usize],
    xi: T,
    config: &GncConfig,
    initial_weights: Option<&[T]>,
) -> Result<GncTrace<T>> {
    validate_candidate(set, candidate)?;
    if !(config.mu0 > 0.0) || !(config.decay > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need mu0 > 0 and decay > 1, got {} and {}",
            config.mu0, config.decay
        )));
    }
    let mut weights = match initial_weights {
        Some(w) if w.len() == candidate.len() => w.to_vec(),
        Some(w) => {
            return Err(Error::InvalidParameter(format!(
                "{} initial weights for {} candidates",
                w.len(),
                candidate.len()
            )))
        }
        None => vec![T::one(); candidate.len()],
    };

    let decay = T::lit(config.decay);
    let tol = T::lit(config.weight_tolerance);
    let mut mu = T::lit(config.mu0);
    let mut history = Vec::new();
    let mut previous: Option<WeightedAlignment<T>> = None;
    let mut residuals = vec![T::zero(); candidate.len()];

    loop {
        let params = GncParams::new(mu, xi)?;
        let objective = |align: &WeightedAlignment<T>, w: &[T], out: Option<&mut [T]>| {
            let mut total = T::zero();
            let mut out = out;
            for (slot, (&i, &wk)) in candidate.iter().zip(w).enumerate() {
                let r = (align.rotation * (set.p(i) - align.centroid_p) - (set.q(i) - align.centroid_q)).norm();
                if let Some(o) = out.as_deref_mut() {
                    o[slot] = r;
                }
                total += tb_objective(r, wk, &params);
            }
            total
        };

        let objective_before = previous.as_ref().map(|a| objective(a, &weights, None));
        let alignment =
            weighted_alignment_subset(set, candidate, &weights).map_err(|_| Error::DegenerateCandidate)?;
        let objective_after_rotation = objective(&alignment, &weights, Some(&mut residuals));

        let mut max_change = T::zero();
        for (w, &r) in weights.iter_mut().zip(&residuals) {
            let next = tb_weight(r, &params);
            max_change = max_change.max((next - *w).abs());
            *w = next;
        }
        let objective_after_weights = objective(&alignment, &weights, None);
        history.push(GncIterate {
            mu,
            objective_before,
            objective_after_rotation,
            objective_after_weights,
        });
        previous = Some(alignment);
        mu /= decay;

        if weights.iter().filter(|w| **w > T::zero()).count() < 3 {
            return Err(Error::DegenerateCandidate);
        }
        if max_change < tol || mu < T::one() {
            break;
        }
    }

    let alignment = previous.expect("at least one iteration");
    let (centroid_p, centroid_q) = weighted_centroids(
        candidate
            .iter()
            .zip(weights.iter().copied())
            .map(|(&i, w)| (set.p(i), set.q(i), w)),
    )
    .ok_or(Error::DegenerateCandidate)?;

    Ok(GncTrace {
        iterations: history.len(),
        final_mu: mu,
        final_weights: weights,
        rotation: alignment.rotation,
        centroid_p,
        centroid_q,
        history,
    })
}

fn validate_candidate<T: Real>(set: &CorrespondenceSet<T>, candidate: &[usize]) -> Result<()> {
    if candidate.len() < 3 {
        return Err(Error::DegenerateCandidate);
    }
    let mut seen = vec![false; set.len()];
    for &i in candidate {
        if i >= set.len() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidParameter(format!(
                "candidate index {i} is out of range or repeated"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{geodesic_distance, random_rotation, weighted_svd_rotation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn cube(rng: &mut ChaCha8Rng) -> Vec3<f64> {
        Vec3::new(rng.random::<f64>(), rng.random(), rng.random()) - Vec3::repeat(0.5)
    }

    /// `inliers` noisy pairs then `outliers` gross ones.
    fn instance(inliers: usize, outliers: usize, sigma: f64, seed: u64) -> (CorrespondenceSet<f64>, RotationMatrix<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r: RotationMatrix<f64> = random_rotation(&mut rng);
        let t = Vec3::new(0.3, 0.2, -2.0);
        let noise = Normal::new(0.0, sigma).unwrap();
        let n = inliers + outliers;
        let p: Vec<_> = (0..n).map(|_| cube(&mut rng)).collect();
        let q = p
            .iter()
            .enumerate()
            .map(|(i, x)| {
                if i < inliers {
                    &r * x + t + Vec3::from_fn(|_, _| noise.sample(&mut rng))
                } else {
                    cube(&mut rng) * 2.0 + t
                }
            })
            .collect();
        (CorrespondenceSet::new(p, q, sigma.max(1e-9)).unwrap(), r)
    }

    #[test]
    fn noiseless_candidates_keep_unit_weights() {
        let (set, r0) = instance(20, 0, 0.0, 1);
        let cand: Vec<usize> = (0..20).collect();
        let trace = solve_gnc_tb(&set, &cand, 0.05).unwrap();
        assert!(geodesic_distance(&trace.rotation, &r0) < 1e-9);
        assert!(trace.final_weights.iter().all(|&w| w == 1.0));
        assert_eq!(trace.iterations, 1);
    }

    #[test]
    fn gross_outliers_get_zero_weight() {
        let sigma = 0.01;
        let (set, r0) = instance(40, 10, sigma, 2);
        let cand: Vec<usize> = (0..50).collect();
        let trace = solve_gnc_tb(&set, &cand, 5.0 * sigma).unwrap();
        assert!(trace.final_weights[40..].iter().all(|&w| w == 0.0), "{:?}", &trace.final_weights[40..]);
        assert!(trace.final_weights[..40].iter().all(|&w| w > 0.0));

        let mut oracle = vec![0.0; 50];
        oracle[..40].fill(1.0);
        let reference = weighted_svd_rotation(&set, &oracle).unwrap();
        assert!(geodesic_distance(&trace.rotation, &reference) < 0.01);
        assert!(geodesic_distance(&trace.rotation, &r0) < 0.03);
    }

    #[test]
    fn mu_schedule_alone_takes_26_iterations() {
        let mut mu = 100.0f64;
        let mut k = 0;
        while mu >= 1.0 {
            mu /= 1.2;
            k += 1;
        }
        assert_eq!(k, 26);
        assert_eq!((100f64.ln() / 1.2f64.ln()).ceil() as usize, 26);

        // a tolerance of zero never converges, so only the schedule stops it
        let (set, _) = instance(30, 5, 0.01, 3);
        let cand: Vec<usize> = (0..35).collect();
        let cfg = GncConfig {
            weight_tolerance: 0.0,
            ..GncConfig::default()
        };
        let trace = solve_gnc_tb_with(&set, &cand, 0.05, &cfg, None).unwrap();
        assert_eq!(trace.iterations, 26);
        assert!(trace.final_mu < 1.0 && trace.final_mu > 0.0);
    }

    #[test]
    fn objective_descends_within_each_iteration() {
        for seed in 0..10 {
            let (set, _) = instance(30, 12, 0.01, 10 + seed);
            let cand: Vec<usize> = (0..42).collect();
            let cfg = GncConfig {
                weight_tolerance: 0.0,
                ..GncConfig::default()
            };
            let trace = solve_gnc_tb_with(&set, &cand, 0.05, &cfg, None).unwrap();
            for it in &trace.history {
                if let Some(before) = it.objective_before {
                    assert!(it.objective_after_rotation <= before + 1e-9, "{it:?}");
                }
                assert!(it.objective_after_weights <= it.objective_after_rotation + 1e-12, "{it:?}");
            }
        }
    }

    #[test]
    fn weights_stay_in_unit_interval_and_truncate() {
        let (set, _) = instance(25, 8, 0.01, 4);
        let cand: Vec<usize> = (0..33).collect();
        let trace = solve_gnc_tb(&set, &cand, 0.05).unwrap();
        assert!(trace.final_weights.iter().all(|w| (0.0..=1.0).contains(w)));
    }

    #[test]
    fn rerun_from_own_weights_is_a_fixed_point() {
        let (set, _) = instance(20, 6, 0.0, 5);
        let cand: Vec<usize> = (0..26).collect();
        let first = solve_gnc_tb(&set, &cand, 0.05).unwrap();
        let again = solve_gnc_tb_with(&set, &cand, 0.05, &GncConfig::default(), Some(&first.final_weights)).unwrap();
        assert!(geodesic_distance(&first.rotation, &again.rotation) < 1e-9);
    }

    #[test]
    fn deterministic() {
        let (set, _) = instance(30, 10, 0.01, 6);
        let cand: Vec<usize> = (0..40).collect();
        assert_eq!(solve_gnc_tb(&set, &cand, 0.05).unwrap(), solve_gnc_tb(&set, &cand, 0.05).unwrap());
    }

    #[test]
    fn degenerate_candidates() {
        let (set, _) = instance(10, 0, 0.01, 7);
        assert_eq!(solve_gnc_tb(&set, &[0, 1], 0.05), Err(Error::DegenerateCandidate));
        assert!(matches!(solve_gnc_tb(&set, &[0, 1, 1], 0.05), Err(Error::InvalidParameter(_))));
        assert!(matches!(solve_gnc_tb(&set, &[0, 1, 99], 0.05), Err(Error::InvalidParameter(_))));

        let p = vec![Vec3::new(0.0, 0.0, 0.0); 4];
        let set = CorrespondenceSet::new(p.clone(), p, 0.01).unwrap();
        assert_eq!(solve_gnc_tb(&set, &[0, 1, 2, 3], 0.05), Err(Error::DegenerateCandidate));
    }
}
