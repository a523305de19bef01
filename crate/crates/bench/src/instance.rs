//! Synthetic registration instances with known ground truth.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use vocra::{random_rotation, CorrespondenceSetF64, RigidTransformF64, RotationMatrixF64, Vec3F64};

use crate::error::{BenchError, BenchResult};
use crate::model::fit_unit_cube;

/// Where replaced target points are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutlierMode {
    /// Uniform in the radius-1 ball around the transformed model centroid.
    SphereRadius1,
    /// The transformed position of a different model point.
    OnSurface,
}

impl OutlierMode {
    pub fn name(self) -> &'static str {
        match self {
            OutlierMode::SphereRadius1 => "sphere",
            OutlierMode::OnSurface => "on-surface",
        }
    }
}

impl fmt::Display for OutlierMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutlierMode {
    type Err = BenchError;
    fn from_str(s: &str) -> BenchResult<Self> {
        match s {
            "sphere" | "sphere-radius1" | "standard" => Ok(OutlierMode::SphereRadius1),
            "on-surface" | "surface" => Ok(OutlierMode::OnSurface),
            _ => Err(BenchError::UnknownOutlierMode(s.to_string())),
        }
    }
}

/// Parameters of one benchmark sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n: usize,
    pub outlier_rate: f64,
    /// Per-component standard deviation of the inlier noise.
    pub sigma: f64,
    /// Chordal consensus radius handed to the solver.
    pub theta: f64,
    pub translation_bound: f64,
    pub outlier_mode: OutlierMode,
    pub seed: u64,
    pub trials: usize,
    pub xi1_mult: f64,
    pub xi2_mult: f64,
    pub vote_mu: f64,
    pub ransac_iterations: usize,
    /// Record wall-clock runtimes; when off, runtimes are written as 0 so that
    /// reruns are byte-identical.
    pub timing: bool,
    /// Run trials on the rayon pool.
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n: 1000,
            outlier_rate: 0.9,
            sigma: 0.01,
            theta: 0.15,
            translation_bound: 3.0,
            outlier_mode: OutlierMode::SphereRadius1,
            seed: 42,
            trials: 30,
            xi1_mult: 3.0,
            xi2_mult: 5.0,
            vote_mu: 1.5,
            ransac_iterations: 1000,
            timing: true,
            parallel: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> BenchResult<()> {
        if !(0.0..1.0).contains(&self.outlier_rate) {
            return Err(BenchError::Config(format!(
                "outlier_rate {} outside [0, 1)",
                self.outlier_rate
            )));
        }
        let scales = [
            ("sigma", self.sigma),
            ("theta", self.theta),
            ("translation_bound", self.translation_bound),
            ("xi1_mult", self.xi1_mult),
            ("xi2_mult", self.xi2_mult),
            ("vote_mu", self.vote_mu),
        ];
        for (name, v) in scales {
            if !(v > 0.0 && v.is_finite()) {
                return Err(BenchError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.n < 3 {
            return Err(BenchError::Config(format!("n must be at least 3, got {}", self.n)));
        }
        Ok(())
    }

    /// `⌊outlier_rate · n⌋`, robust to the rate being a rounded decimal.
    pub fn outlier_count(&self) -> usize {
        (self.outlier_rate * self.n as f64 + 1e-9).floor() as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub set: CorrespondenceSetF64,
    pub ground_truth: RigidTransformF64,
    /// Indices of the unreplaced correspondences, ascending.
    pub inliers: Vec<usize>,
}

/// Draws a uniformly random point in the ball of `radius` around the origin.
pub fn random_in_ball<R: Rng + ?Sized>(rng: &mut R, radius: f64) -> Vec3F64 {
    let dir = Vec3F64::new(
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
    );
    let norm = dir.norm();
    if norm == 0.0 {
        return Vec3F64::zeros();
    }
    dir / norm * (radius * rng.random::<f64>().cbrt())
}

/// Builds one instance from `model`: `n` model points, subsampled when the
/// model is larger, are fitted into the unit cube as the source cloud.
pub fn generate_instance<R: Rng + ?Sized>(
    model: &[Vec3F64],
    config: &BenchConfig,
    rng: &mut R,
) -> BenchResult<Instance> {
    config.validate()?;
    let n = config.n;
    if model.len() < n {
        return Err(BenchError::ModelTooSmall {
            required: n,
            got: model.len(),
        });
    }
    let chosen: Vec<Vec3F64> = if model.len() == n {
        model.to_vec()
    } else {
        let mut picks = index::sample(rng, model.len(), n).into_vec();
        picks.sort_unstable();
        picks.into_iter().map(|i| model[i]).collect()
    };
    let p = fit_unit_cube(chosen);

    let rotation: RotationMatrixF64 = random_rotation(rng);
    let translation = random_in_ball(rng, config.translation_bound);
    let ground_truth = RigidTransformF64::new(rotation, translation);
    let clean: Vec<Vec3F64> = p.iter().map(|x| ground_truth.apply(x)).collect();

    let noise = Normal::new(0.0, config.sigma).map_err(|e| BenchError::Config(e.to_string()))?;
    let mut q: Vec<Vec3F64> = clean
        .iter()
        .map(|x| x + Vec3F64::new(noise.sample(rng), noise.sample(rng), noise.sample(rng)))
        .collect();

    let mut replaced = vec![false; n];
    for i in index::sample(rng, n, config.outlier_count()).into_vec() {
        replaced[i] = true;
    }
    let centroid = clean.iter().sum::<Vec3F64>() / n as f64;
    for i in (0..n).filter(|&i| replaced[i]) {
        q[i] = match config.outlier_mode {
            OutlierMode::SphereRadius1 => centroid + random_in_ball(rng, 1.0),
            OutlierMode::OnSurface => {
                // uniform over the other n - 1 indices
                let m = rng.random_range(0..n - 1);
                clean[if m >= i { m + 1 } else { m }]
            }
        };
    }

    let inliers = (0..n).filter(|&i| !replaced[i]).collect();
    let set = CorrespondenceSetF64::new(p, q, config.sigma).map_err(|e| BenchError::Config(e.to_string()))?;
    Ok(Instance {
        set,
        ground_truth,
        inliers,
    })
}
