//! End-to-end registration: vote, maximize rotation consensus, refine with
//! GNC-TB, then recover the full inlier set and refit. Also hosts the error
//! metrics and a plain RANSAC baseline used by the benchmark harness.

use std::time::Instant;

use rand::seq::index;
use rand::Rng;

use crate::consensus::{max_rot_consensus, min_inlier_schedule, ConsensusConfig, ConsensusStats};
use crate::error::{Error, Result};
use crate::geom::{
    geodesic_distance, triad_rotation, weighted_alignment_subset, CorrespondenceSet, RigidTransform,
    RotationMatrix, Vec3,
};
use crate::gnc_tb::{solve_gnc_tb_with, GncConfig};
use crate::robust_cost::VoteKernel;
use crate::scalar::Real;
use crate::voting::{voting_tb_with, EarlyExit};

/// Refit rounds used to settle the final inlier set.
const REFIT_ROUNDS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VocraConfig<T: Real> {
    pub sigma: T,
    /// Voting noise bound, `3σ` by default.
    pub xi1: T,
    /// Consensus and refinement noise bound, `5σ` by default.
    pub xi2: T,
    /// Chordal consensus radius.
    pub theta: T,
    pub vote_mu: T,
    pub gnc: GncConfig,
    /// Overrides [`min_inlier_schedule`] when set.
    pub min_inliers: Option<usize>,
    pub early_exit: Option<EarlyExit>,
}

impl<T: Real> VocraConfig<T> {
    pub fn new(sigma: T, theta: T) -> Result<Self> {
        Self::with_multipliers(sigma, theta, T::lit(3.0), T::lit(5.0))
    }

    pub fn with_multipliers(sigma: T, theta: T, xi1_mult: T, xi2_mult: T) -> Result<Self> {
        let cfg = Self {
            sigma,
            xi1: xi1_mult * sigma,
            xi2: xi2_mult * sigma,
            theta,
            vote_mu: T::lit(1.5),
            gnc: GncConfig::default(),
            min_inliers: None,
            early_exit: Some(EarlyExit::default()),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.sigma, self.xi1, self.xi2, self.theta, self.vote_mu];
        if positive.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "sigma, xi1, xi2, theta and vote_mu must be positive".into(),
            ));
        }
        if !(self.xi1 < self.xi2) {
            return Err(Error::InvalidParameter(format!(
                "xi1 ({}) must be below xi2 ({})",
                self.xi1, self.xi2
            )));
        }
        if !(self.gnc.mu0 > 0.0) || !(self.gnc.decay > 1.0) {
            return Err(Error::InvalidParameter("gnc mu0 must be positive and decay above 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VotingSummary<T: Real> {
    pub max_vote: T,
    pub min_vote: T,
    pub enough_inliers: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsensusSummary<T: Real> {
    pub min_inliers: usize,
    pub candidates: usize,
    pub consensus_size: usize,
    pub early_break: bool,
    pub averaged_rotation: RotationMatrix<T>,
    pub stats: ConsensusStats,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GncSummary<T: Real> {
    pub iterations: usize,
    pub final_mu: T,
    pub rotation: RotationMatrix<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RansacSummary {
    pub iterations: usize,
    pub hypothesis_support: usize,
}

/// Stage-level summaries kept alongside the final estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics<T: Real> {
    pub voting: Option<VotingSummary<T>>,
    pub consensus: Option<ConsensusSummary<T>>,
    pub gnc: Option<GncSummary<T>>,
    pub ransac: Option<RansacSummary>,
}

impl<T: Real> Default for Diagnostics<T> {
    fn default() -> Self {
        Self {
            voting: None,
            consensus: None,
            gnc: None,
            ransac: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegistrationResult<T: Real> {
    pub transform: RigidTransform<T>,
    /// Ascending correspondence indices with residual at most the inlier bound.
    pub inliers: Vec<usize>,
    pub diagnostics: Diagnostics<T>,
    pub runtime_seconds: f64,
}

pub fn vocra<T: Real>(set: &CorrespondenceSet<T>, config: &VocraConfig<T>) -> Result<RegistrationResult<T>> {
    let start = Instant::now();
    config.validate()?;
    set.ensure_len(3)?;

    let kernel = VoteKernel::tukey(config.vote_mu, config.xi1)?;
    let table = voting_tb_with(set, &kernel, config.early_exit)?;
    let voting = VotingSummary {
        max_vote: table.max_vote(),
        min_vote: table.min_vote(),
        enough_inliers: table.enough_inliers,
    };

    let min_inliers = config.min_inliers.unwrap_or_else(|| min_inlier_schedule(set.len()));
    let cc = ConsensusConfig::new(config.xi2, config.theta, min_inliers, table.enough_inliers)?;
    let cons = max_rot_consensus(set, &table.order, &cc)?;
    let consensus = ConsensusSummary {
        min_inliers,
        candidates: cons.inlier_candidates.len(),
        consensus_size: cons.consensus_size,
        early_break: cons.early_break,
        averaged_rotation: cons.averaged_rotation,
        stats: cons.stats,
    };

    let gnc = solve_gnc_tb_with(set, &cons.inlier_candidates, config.xi2, &config.gnc, None)?;
    let coarse = RigidTransform::new(gnc.rotation, gnc.translation());
    let gnc_summary = GncSummary {
        iterations: gnc.iterations,
        final_mu: gnc.final_mu,
        rotation: gnc.rotation,
    };

    let (transform, inliers) = refit_inliers(set, coarse, config.xi2)?;
    Ok(RegistrationResult {
        transform,
        inliers,
        diagnostics: Diagnostics {
            voting: Some(voting),
            consensus: Some(consensus),
            gnc: Some(gnc_summary),
            ransac: None,
        },
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

fn select_inliers<T: Real>(set: &CorrespondenceSet<T>, transform: &RigidTransform<T>, bound: T) -> Vec<usize> {
    (0..set.len()).filter(|&i| set.residual(i, transform) <= bound).collect()
}

/// Thresholds all pairs under `transform`, refits on the survivors with an
/// unweighted SVD, and repeats until the set settles. The returned inliers
/// always satisfy `bound` under the returned transform.
fn refit_inliers<T: Real>(
    set: &CorrespondenceSet<T>,
    transform: RigidTransform<T>,
    bound: T,
) -> Result<(RigidTransform<T>, Vec<usize>)> {
    let mut inliers = select_inliers(set, &transform, bound);
    let mut current = transform;
    for _ in 0..REFIT_ROUNDS {
        if inliers.len() < 3 {
            return Err(Error::EmptyInlierSet(inliers.len()));
        }
        let ones = vec![T::one(); inliers.len()];
        current = weighted_alignment_subset(set, &inliers, &ones)?.transform();
        let next = select_inliers(set, &current, bound);
        if next == inliers {
            return Ok((current, inliers));
        }
        inliers = next;
    }
    if inliers.len() < 3 {
        return Err(Error::EmptyInlierSet(inliers.len()));
    }
    Ok((current, inliers))
}

/// Geodesic rotation error in degrees.
pub fn rotation_error<T: Real>(gt: &RotationMatrix<T>, est: &RotationMatrix<T>) -> T {
    geodesic_distance(gt, est) * T::lit(180.0 / std::f64::consts::PI)
}

pub fn translation_error<T: Real>(gt: &Vec3<T>, est: &Vec3<T>) -> T {
    (gt - est).norm()
}

/// Hypothesize-and-verify with 3-point hypotheses, stopping after
/// `max_iters` draws or once 99% confidence of an all-inlier draw is reached.
pub fn ransac_baseline<T: Real, R: Rng + ?Sized>(
    set: &CorrespondenceSet<T>,
    xi: T,
    max_iters: usize,
    rng: &mut R,
) -> Result<RegistrationResult<T>> {
    const CONFIDENCE: f64 = 0.99;
    let start = Instant::now();
    set.ensure_len(3)?;
    let n = set.len();

    let mut best: Option<(RigidTransform<T>, usize)> = None;
    let mut required = max_iters;
    let mut iterations = 0;
    while iterations < required.min(max_iters) {
        iterations += 1;
        let pick = index::sample(rng, n, 3);
        let (a, b, c) = (pick.index(0), pick.index(1), pick.index(2));
        let Ok(rotation) = triad_rotation([set.p(a), set.p(b), set.p(c)], [set.q(a), set.q(b), set.q(c)]) else {
            continue;
        };
        let three = T::lit(3.0);
        let cp = (set.p(a) + set.p(b) + set.p(c)) / three;
        let cq = (set.q(a) + set.q(b) + set.q(c)) / three;
        let hypothesis = RigidTransform::new(rotation, cq - rotation * cp);
        let support = (0..n).filter(|&i| set.residual(i, &hypothesis) <= xi).count();
        if best.as_ref().is_none_or(|(_, s)| support > *s) {
            best = Some((hypothesis, support));
            let w = support as f64 / n as f64;
            let all_inlier = w.powi(3);
            if all_inlier >= 1.0 {
                required = iterations;
            } else if all_inlier > 0.0 {
                let k = ((1.0 - CONFIDENCE).ln() / (1.0 - all_inlier).ln()).ceil();
                required = if k.is_finite() { k as usize } else { max_iters };
            }
        }
    }

    let (hypothesis, support) = best.ok_or(Error::NoConsensus)?;
    if support < 3 {
        return Err(Error::NoConsensus);
    }
    let (transform, inliers) = refit_inliers(set, hypothesis, xi)?;
    Ok(RegistrationResult {
        transform,
        inliers,
        diagnostics: Diagnostics {
            ransac: Some(RansacSummary {
                iterations,
                hypothesis_support: support,
            }),
            ..Diagnostics::default()
        },
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}
