//! Consensus maximization over scale-filtered 3-point sets.
//!
//! Correspondences are walked in vote order. An anchor pair `(i, j)` that
//! passes the pairwise scale test collects every later `k` consistent with
//! both anchors; each such triad is solved minimally for a rotation, and the
//! collected rotations are robustly averaged. The largest chordal consensus
//! around the average, plus the anchors, is the inlier candidate set.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::geom::{triad_rotation, CorrespondenceSet, RotationMatrix};
use crate::rot_avg::{chordal_consensus, robust_lee_chordal, RotationSample};
use crate::scalar::Real;
use crate::voting::pairwise_scale_gap;

/// Minimum expected inlier count for a problem with `n` correspondences.
pub fn min_inlier_schedule(n: usize) -> usize {
    let nf = n as f64;
    let raw = match n {
        0..=199 => (0.05 * nf).max(5.0),
        200..=299 => 0.04 * nf,
        300..=499 => 0.03 * nf,
        500..=999 => 0.02 * nf,
        _ => 0.01 * nf,
    };
    (raw.round() as usize).max(3)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsensusConfig<T: Real> {
    /// Noise bound; the pairwise scale test accepts gaps up to `2 xi`.
    pub xi: T,
    /// Chordal radius of the rotation consensus.
    pub theta: T,
    /// Minimum expected inlier count `I`.
    pub min_inliers: usize,
    /// Voting stopped early, so the search spans all correspondences.
    pub enough_inliers: bool,
}

impl<T: Real> ConsensusConfig<T> {
    pub fn new(xi: T, theta: T, min_inliers: usize, enough_inliers: bool) -> Result<Self> {
        if !(xi > T::zero()) || !(theta > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "xi and theta must be positive, got {xi} and {theta}"
            )));
        }
        if min_inliers < 3 {
            return Err(Error::InvalidParameter(format!(
                "min_inliers must be at least 3, got {min_inliers}"
            )));
        }
        Ok(Self {
            xi,
            theta,
            min_inliers,
            enough_inliers,
        })
    }

    /// Number of leading correspondences in vote order that are searched.
    pub fn window(&self, n: usize) -> usize {
        if self.enough_inliers {
            n
        } else {
            ((0.2 * n as f64).ceil() as usize).max(3).min(n)
        }
    }

    /// Candidate size at which the search stops.
    pub fn break_size(&self) -> usize {
        if self.enough_inliers {
            (1.5 * self.min_inliers as f64).ceil() as usize
        } else {
            self.min_inliers
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConsensusStats {
    pub anchor_pairs: usize,
    pub triads_solved: usize,
    pub averaging_runs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsensusResult<T: Real> {
    /// Anchor pair first, then the consensus third points in vote order.
    pub inlier_candidates: Vec<usize>,
    pub averaged_rotation: RotationMatrix<T>,
    /// Size of the rotation consensus, `inlier_candidates.len() - 2`.
    pub consensus_size: usize,
    pub early_break: bool,
    pub stats: ConsensusStats,
}

/// One step of the triad enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriadVisit {
    /// A new anchor pair passed the scale test.
    Anchor { i: usize, j: usize },
    /// Third point `k` is scale-consistent with the current anchors.
    Third { i: usize, j: usize, k: usize },
}

/// Enumerates positional triples `a < b < c` over `window` and reports the
/// ones whose three pairs all satisfy `S ≤ bound`, anchor pair first.
pub fn visit_scale_consistent_triads<T: Real>(
    set: &CorrespondenceSet<T>,
    window: &[usize],
    bound: T,
    mut visit: impl FnMut(TriadVisit) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let m = window.len();
    let gap = |a: usize, b: usize| pairwise_scale_gap(set.p(a), set.q(a), set.p(b), set.q(b));
    for a in 0..m.saturating_sub(2) {
        let i = window[a];
        for b in a + 1..m - 1 {
            let j = window[b];
            if gap(i, j) > bound {
                continue;
            }
            visit(TriadVisit::Anchor { i, j })?;
            for &k in &window[b + 1..] {
                if gap(i, k) <= bound && gap(j, k) <= bound {
                    visit(TriadVisit::Third { i, j, k })?;
                }
            }
        }
    }
    ControlFlow::Continue(())
}

pub fn max_rot_consensus<T: Real>(
    set: &CorrespondenceSet<T>,
    order: &[usize],
    config: &ConsensusConfig<T>,
) -> Result<ConsensusResult<T>> {
    set.ensure_len(3)?;
    let n = set.len();
    check_permutation(order, n)?;

    let window = &order[..config.window(n)];
    let break_size = config.break_size();
    let needed = config.min_inliers.saturating_sub(3);
    let bound = T::lit(2.0) * config.xi;

    let mut stats = ConsensusStats::default();
    let mut samples: Vec<RotationSample<T>> = Vec::new();
    let mut best: Option<(Vec<usize>, RotationMatrix<T>, usize)> = None;
    let mut k_max = 0usize;
    let mut early_break = false;
    let mut failure: Option<Error> = None;

    let _ = visit_scale_consistent_triads(set, window, bound, |step| match step {
        TriadVisit::Anchor { .. } => {
            stats.anchor_pairs += 1;
            samples.clear();
            ControlFlow::Continue(())
        }
        TriadVisit::Third { i, j, k } => {
            // collinear triads carry no rotation and are not counted
            let Ok(rotation) = triad_rotation([set.p(i), set.p(j), set.p(k)], [set.q(i), set.q(j), set.q(k)])
            else {
                return ControlFlow::Continue(());
            };
            stats.triads_solved += 1;
            samples.push(RotationSample::new(rotation, k));
            if samples.len() < needed {
                return ControlFlow::Continue(());
            }
            stats.averaging_runs += 1;
            let average = match robust_lee_chordal(&samples) {
                Ok(r) => r,
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            };
            let support = chordal_consensus(&samples, &average, config.theta);
            if support.len() >= k_max {
                k_max = support.len();
                let mut candidates = Vec::with_capacity(support.len() + 2);
                candidates.extend([i, j]);
                candidates.extend(support);
                let done = candidates.len() >= break_size;
                best = Some((candidates, average, k_max));
                if done {
                    early_break = true;
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        }
    });

    if let Some(e) = failure {
        return Err(e);
    }
    let (inlier_candidates, averaged_rotation, consensus_size) = best.ok_or(Error::NoConsensus)?;
    Ok(ConsensusResult {
        inlier_candidates,
        averaged_rotation,
        consensus_size,
        early_break,
        stats,
    })
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::InvalidParameter(format!(
            "order has {} entries for {n} correspondences",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidParameter("order is not a permutation".into()));
        }
    }
    Ok(())
}
