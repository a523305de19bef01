//! Correspondence ranking by pairwise scale-invariant voting.
//!
//! For two inliers of the same rigid motion the distances `‖p_i − p_j‖` and
//! `‖q_i − q_j‖` agree up to twice the noise bound, so every pair votes for
//! both of its members with a kernel of the gap between those distances.

use crate::error::Result;
use crate::geom::{CorrespondenceSet, Vec3};
use crate::robust_cost::VoteKernel;
use crate::scalar::Real;

/// `S_ij = | ‖q_i − q_j‖ − ‖p_i − p_j‖ |`.
#[inline]
pub fn pairwise_scale_gap<T: Real>(pi: &Vec3<T>, qi: &Vec3<T>, pj: &Vec3<T>, qj: &Vec3<T>) -> T {
    ((qi - qj).norm() - (pi - pj).norm()).abs()
}

/// Early termination of voting once inliers are evidently plentiful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EarlyExit {
    /// Only the first `probe_rows` outer rows may trigger the exit.
    pub probe_rows: usize,
    /// A row triggers the exit when its vote total reaches `vote_fraction * N`.
    pub vote_fraction: f64,
}

impl Default for EarlyExit {
    fn default() -> Self {
        Self {
            probe_rows: 20,
            vote_fraction: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VoteTable<T: Real> {
    /// Accumulated vote per correspondence.
    pub votes: Vec<T>,
    /// Correspondence indices by descending vote, ties by ascending index.
    pub order: Vec<usize>,
    /// Voting stopped early because some correspondence collected enough votes.
    pub enough_inliers: bool,
}

impl<T: Real> VoteTable<T> {
    /// 1-based position of correspondence `index` in [`VoteTable::order`].
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.order.len()];
        for (pos, &idx) in self.order.iter().enumerate() {
            rank[idx] = pos + 1;
        }
        rank
    }

    pub fn max_vote(&self) -> T {
        self.order.first().map(|&i| self.votes[i]).unwrap_or_else(T::zero)
    }

    pub fn min_vote(&self) -> T {
        self.order.last().map(|&i| self.votes[i]).unwrap_or_else(T::zero)
    }
}

/// Votes over all pairs with `kernel` and the default early exit.
pub fn voting_tb<T: Real>(set: &CorrespondenceSet<T>, kernel: &VoteKernel<T>) -> Result<VoteTable<T>> {
    voting_tb_with(set, kernel, Some(EarlyExit::default()))
}

pub fn voting_tb_with<T: Real>(
    set: &CorrespondenceSet<T>,
    kernel: &VoteKernel<T>,
    early_exit: Option<EarlyExit>,
) -> Result<VoteTable<T>> {
    set.ensure_len(2)?;
    let n = set.len();
    let p = set.points_p();
    let q = set.points_q();
    let mut votes = vec![T::zero(); n];
    let mut enough_inliers = false;
    let exit_votes = early_exit.map(|e| (e.probe_rows, T::lit(e.vote_fraction * n as f64)));

    for i in 0..n - 1 {
        let (pi, qi) = (&p[i], &q[i]);
        let mut row = T::zero();
        for j in i + 1..n {
            let inc = kernel.increment(pairwise_scale_gap(pi, qi, &p[j], &q[j]));
            row += inc;
            votes[j] += inc;
        }
        votes[i] += row;
        if let Some((rows, threshold)) = exit_votes {
            if i < rows && votes[i] >= threshold {
                enough_inliers = true;
                break;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps ascending index among ties
    order.sort_by(|&a, &b| votes[b].partial_cmp(&votes[a]).unwrap_or(std::cmp::Ordering::Equal));
    Ok(VoteTable {
        votes,
        order,
        enough_inliers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{random_rotation, RotationMatrix};
    use crate::robust_cost::{vote_increment, GncParams, VoteKernelKind};
    use crate::Error;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_cube(rng: &mut ChaCha8Rng) -> Vec3<f64> {
        Vec3::new(rng.random::<f64>(), rng.random(), rng.random()) - Vec3::repeat(0.5)
    }

    /// `k` noiseless inliers followed by `n - k` random outliers.
    fn instance(n: usize, k: usize, seed: u64) -> CorrespondenceSet<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r: RotationMatrix<f64> = random_rotation(&mut rng);
        let t = Vec3::new(0.5, -1.0, 2.0);
        let p: Vec<_> = (0..n).map(|_| unit_cube(&mut rng)).collect();
        let q = p
            .iter()
            .enumerate()
            .map(|(i, x)| if i < k { &r * x + t } else { unit_cube(&mut rng) * 2.0 + t })
            .collect();
        CorrespondenceSet::new(p, q, 0.01).unwrap()
    }

    #[test]
    fn scale_gap_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r: RotationMatrix<f64> = random_rotation(&mut rng);
        let t = Vec3::new(3.0, 1.0, -2.0);
        for _ in 0..100 {
            let (pi, pj) = (unit_cube(&mut rng), unit_cube(&mut rng));
            let s = pairwise_scale_gap(&pi, &(r * pi + t), &pj, &(r * pj + t));
            assert!(s < 1e-12);
        }
        let s = pairwise_scale_gap(
            &Vec3::new(0.0, 0.0, 0.0),
            &Vec3::new(5.0, 5.0, 5.0),
            &Vec3::new(1.0, 0.0, 0.0),
            &Vec3::new(5.0, 6.3, 5.0),
        );
        assert_abs_diff_eq!(s, 0.3, epsilon = 1e-12);
        let (a, b, c, d) = (unit_cube(&mut rng), unit_cube(&mut rng), unit_cube(&mut rng), unit_cube(&mut rng));
        assert_eq!(pairwise_scale_gap(&a, &b, &c, &d), pairwise_scale_gap(&c, &d, &a, &b));
    }

    #[test]
    fn noiseless_inliers_collect_at_least_k_minus_one() {
        let set = instance(200, 15, 9);
        let kernel = VoteKernel::tukey(1.5, 0.03).unwrap();
        let table = voting_tb_with(&set, &kernel, None).unwrap();
        for i in 0..15 {
            assert!(table.votes[i] >= 14.0 - 1e-9, "inlier {i} has {}", table.votes[i]);
        }
    }

    #[test]
    fn all_inlier_set_exits_after_first_row() {
        let set = instance(100, 100, 4);
        let kernel = VoteKernel::tukey(1.5, 0.03).unwrap();
        let table = voting_tb(&set, &kernel).unwrap();
        assert!(table.enough_inliers);
        assert_abs_diff_eq!(table.votes[0], 99.0, epsilon = 1e-9);
        // only row 0 was processed
        for j in 1..100 {
            assert_abs_diff_eq!(table.votes[j], 1.0, epsilon = 1e-9);
        }
        assert_eq!(table.order[0], 0);
    }

    #[test]
    fn two_far_pairs_get_no_votes() {
        let p = vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)];
        let q = vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)];
        let set = CorrespondenceSet::new(p, q, 0.01).unwrap();
        let table = voting_tb(&set, &VoteKernel::tukey(1.5, 0.03).unwrap()).unwrap();
        assert_eq!(table.votes, vec![0.0, 0.0]);
        assert_eq!(table.order, vec![0, 1]);
        assert!(!table.enough_inliers);
    }

    #[test]
    fn needs_two_correspondences() {
        let set = CorrespondenceSet::new(vec![Vec3::zeros()], vec![Vec3::zeros()], 0.01).unwrap();
        assert_eq!(
            voting_tb(&set, &VoteKernel::tukey(1.5, 0.03).unwrap()),
            Err(Error::InsufficientCorrespondences { required: 2, got: 1 })
        );
    }

    #[test]
    fn vote_total_is_twice_pair_sum_without_early_exit() {
        let set = instance(120, 10, 21);
        for kind in VoteKernelKind::ALL {
            let kernel = VoteKernel::new(kind, GncParams::new(1.5, 0.05).unwrap());
            let table = voting_tb_with(&set, &kernel, None).unwrap();
            let mut pair_sum = 0.0;
            for i in 0..set.len() {
                for j in i + 1..set.len() {
                    let s = pairwise_scale_gap(set.p(i), set.q(i), set.p(j), set.q(j));
                    pair_sum += vote_increment(s, &kernel);
                }
            }
            let total: f64 = table.votes.iter().sum();
            assert_abs_diff_eq!(total, 2.0 * pair_sum, epsilon = 1e-9);
        }
    }

    #[test]
    fn order_is_descending_permutation_with_index_tiebreak() {
        let set = instance(150, 40, 33);
        let table = voting_tb_with(&set, &VoteKernel::tukey(1.5, 0.03).unwrap(), None).unwrap();
        let mut seen = table.order.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..150).collect::<Vec<_>>());
        for w in table.order.windows(2) {
            let (a, b) = (table.votes[w[0]], table.votes[w[1]]);
            assert!(a > b || (a == b && w[0] < w[1]));
        }
        let ranks = table.ranks();
        for (pos, &i) in table.order.iter().enumerate() {
            assert_eq!(ranks[i], pos + 1);
        }
        // noiseless inliers lead the ranking
        assert!(table.order[..40].iter().all(|&i| i < 40));
    }

    #[test]
    fn voting_is_deterministic() {
        let set = instance(300, 6, 77);
        let k = VoteKernel::tukey(1.5, 0.03).unwrap();
        assert_eq!(voting_tb(&set, &k).unwrap(), voting_tb(&set, &k).unwrap());
    }
}
