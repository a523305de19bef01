//! Robust correspondence-based rigid registration.
//!
//! The solver runs in three stages:
//!
//! 1. [`voting`]: every correspondence pair is scored with the pairwise
//!    scale-invariant gap and a Tukey's Biweight vote, and correspondences are
//!    sorted by total vote.
//! 2. [`consensus`]: 3-point sets drawn in vote order are filtered by the scale
//!    condition, solved minimally, and the resulting rotations are robustly
//!    averaged ([`rot_avg`]) to find the largest rotation consensus.
//! 3. [`gnc_tb`]: the consensus candidates are refined by graduated
//!    non-convexity with the Tukey's Biweight kernel, and the full inlier set
//!    is recovered ([`pipeline`]).
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below name the concrete instantiations.

// `!(x > 0)` is used deliberately so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod consensus;
pub mod error;
pub mod geom;
pub mod gnc_tb;
pub mod pipeline;
pub mod robust_cost;
pub mod rot_avg;
pub mod scalar;
pub mod voting;

pub use consensus::{max_rot_consensus, min_inlier_schedule, ConsensusConfig, ConsensusResult};
pub use error::{Error, Result};
pub use geom::{
    chordal_distance, geodesic_distance, horn_triad_rotation, project_to_so3, random_rotation, triad_rotation,
    weighted_svd_rotation, CorrespondenceSet, RigidTransform, RotationMatrix, Vec3,
};
pub use gnc_tb::{solve_gnc_tb, GncConfig, GncTrace};
pub use pipeline::{
    ransac_baseline, rotation_error, translation_error, vocra, RegistrationResult, VocraConfig,
};
pub use robust_cost::{GncParams, VoteKernel, VoteKernelKind};
pub use rot_avg::{chordal_consensus, chordal_threshold_from_geodesic, robust_lee_chordal, RotationSample};
pub use scalar::Real;
pub use voting::{pairwise_scale_gap, voting_tb, VoteTable};

pub type Vec3F64 = Vec3<f64>;
pub type Vec3F32 = Vec3<f32>;
pub type RotationMatrixF64 = RotationMatrix<f64>;
pub type RotationMatrixF32 = RotationMatrix<f32>;
pub type RigidTransformF64 = RigidTransform<f64>;
pub type RigidTransformF32 = RigidTransform<f32>;
pub type CorrespondenceSetF64 = CorrespondenceSet<f64>;
pub type CorrespondenceSetF32 = CorrespondenceSet<f32>;
pub type VocraConfigF64 = VocraConfig<f64>;
pub type RegistrationResultF64 = RegistrationResult<f64>;
