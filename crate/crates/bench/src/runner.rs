//! Monte Carlo trials over synthetic instances.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vocra::{ransac_baseline, rotation_error, translation_error, vocra, RegistrationResultF64, VocraConfigF64};

use crate::error::{BenchError, BenchResult};
use crate::instance::{generate_instance, BenchConfig, Instance, OutlierMode};
use crate::model::synthetic_surface;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Vocra,
    Ransac,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Vocra => "vocra",
            Solver::Ransac => "ransac",
        }
    }

    /// Parses a comma-separated list such as `vocra,ransac`.
    pub fn parse_list(s: &str) -> BenchResult<Vec<Solver>> {
        let solvers = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<BenchResult<Vec<_>>>()?;
        if solvers.is_empty() {
            return Err(BenchError::Config("at least one solver is required".into()));
        }
        Ok(solvers)
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = BenchError;
    fn from_str(s: &str) -> BenchResult<Self> {
        match s {
            "vocra" => Ok(Solver::Vocra),
            "ransac" => Ok(Solver::Ransac),
            _ => Err(BenchError::UnknownSolver(s.to_string())),
        }
    }
}

/// One (trial, solver) outcome. Metric fields are `None` when the solver
/// failed; `status` is then the solver's error code.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub trial: usize,
    pub solver: Solver,
    pub outlier_rate: f64,
    pub outlier_mode: OutlierMode,
    pub rot_err_deg: Option<f64>,
    pub trans_err: Option<f64>,
    pub runtime_s: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub status: String,
    /// Voting stopped early on this instance (VOCRA only).
    #[serde(skip)]
    pub enough_inliers: Option<bool>,
}

impl BenchRecord {
    pub fn succeeded(&self) -> bool {
        self.status == "ok"
    }

    /// Rotation error with failures counted as infinitely wrong.
    pub fn rot_err_or_inf(&self) -> f64 {
        self.rot_err_deg.unwrap_or(f64::INFINITY)
    }

    pub fn trans_err_or_inf(&self) -> f64 {
        self.trans_err.unwrap_or(f64::INFINITY)
    }
}

pub fn vocra_config(config: &BenchConfig) -> BenchResult<VocraConfigF64> {
    let mut c = VocraConfigF64::with_multipliers(config.sigma, config.theta, config.xi1_mult, config.xi2_mult)
        .map_err(|e| BenchError::Config(e.to_string()))?;
    c.vote_mu = config.vote_mu;
    c.validate().map_err(|e| BenchError::Config(e.to_string()))?;
    Ok(c)
}

/// Random source for the instance of `trial`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64))
}

/// Independent stream for the RANSAC draws of `trial`.
fn ransac_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = trial_rng(seed, trial);
    rng.set_stream(1);
    rng
}

pub fn trial_instance(model: &[vocra::Vec3F64], config: &BenchConfig, trial: usize) -> BenchResult<Instance> {
    generate_instance(model, config, &mut trial_rng(config.seed, trial))
}

/// Runs `solver` on `instance` and scores it against the ground truth.
pub fn run_solver(instance: &Instance, config: &BenchConfig, trial: usize, solver: Solver) -> BenchResult<BenchRecord> {
    let vcfg = vocra_config(config)?;
    let start = Instant::now();
    let outcome = match solver {
        Solver::Vocra => vocra(&instance.set, &vcfg),
        Solver::Ransac => ransac_baseline(
            &instance.set,
            vcfg.xi2,
            config.ransac_iterations,
            &mut ransac_rng(config.seed, trial),
        ),
    };
    let elapsed = start.elapsed().as_secs_f64();
    Ok(score(instance, config, trial, solver, outcome, if config.timing { elapsed } else { 0.0 }))
}

fn score(
    instance: &Instance,
    config: &BenchConfig,
    trial: usize,
    solver: Solver,
    outcome: vocra::Result<RegistrationResultF64>,
    runtime_s: f64,
) -> BenchRecord {
    let mut record = BenchRecord {
        trial,
        solver,
        outlier_rate: config.outlier_rate,
        outlier_mode: config.outlier_mode,
        rot_err_deg: None,
        trans_err: None,
        runtime_s,
        precision: None,
        recall: None,
        status: "ok".into(),
        enough_inliers: None,
    };
    match outcome {
        Ok(res) => {
            let gt = &instance.ground_truth;
            record.rot_err_deg = Some(rotation_error(&gt.rotation, &res.transform.rotation));
            record.trans_err = Some(translation_error(&gt.translation, &res.transform.translation));
            let truth: HashSet<usize> = instance.inliers.iter().copied().collect();
            let hits = res.inliers.iter().filter(|i| truth.contains(i)).count() as f64;
            record.precision = Some(if res.inliers.is_empty() { 0.0 } else { hits / res.inliers.len() as f64 });
            record.recall = Some(if truth.is_empty() { 1.0 } else { hits / truth.len() as f64 });
            record.enough_inliers = res.diagnostics.voting.map(|v| v.enough_inliers);
        }
        Err(e) => record.status = e.code().to_string(),
    }
    record
}

fn run_trial(model: &[vocra::Vec3F64], config: &BenchConfig, trial: usize, solvers: &[Solver]) -> BenchResult<Vec<BenchRecord>> {
    let instance = trial_instance(model, config, trial)?;
    solvers.iter().map(|&s| run_solver(&instance, config, trial, s)).collect()
}

/// All trials of `config` on the built-in surface.
pub fn run_benchmark(config: &BenchConfig, solvers: &[Solver]) -> BenchResult<Vec<BenchRecord>> {
    run_benchmark_on(&synthetic_surface(config.n), config, solvers)
}

/// Records are ordered by trial, then by the order of `solvers`, whether or
/// not the trials ran in parallel.
pub fn run_benchmark_on(model: &[vocra::Vec3F64], config: &BenchConfig, solvers: &[Solver]) -> BenchResult<Vec<BenchRecord>> {
    config.validate()?;
    vocra_config(config)?;
    if solvers.is_empty() {
        return Err(BenchError::Config("at least one solver is required".into()));
    }
    let per_trial: Vec<Vec<BenchRecord>> = if config.parallel {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(model, config, t, solvers))
            .collect::<BenchResult<_>>()?
    } else {
        (0..config.trials)
            .map(|t| run_trial(model, config, t, solvers))
            .collect::<BenchResult<_>>()?
    };
    Ok(per_trial.into_iter().flatten().collect())
}

/// Runs `base` once per outlier rate and concatenates the records.
pub fn run_sweep(model: &[vocra::Vec3F64], base: &BenchConfig, rates: &[f64], solvers: &[Solver]) -> BenchResult<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for &rate in rates {
        let config = BenchConfig {
            outlier_rate: rate,
            ..base.clone()
        };
        records.extend(run_benchmark_on(model, &config, solvers)?);
    }
    Ok(records)
}

/// The default sweep of outlier rates.
pub const DEFAULT_RATES: [f64; 8] = [0.2, 0.5, 0.8, 0.9, 0.95, 0.97, 0.98, 0.99];

#[cfg(test)]
mod tests {
    use super::*;

    fn small(rate: f64) -> BenchConfig {
        BenchConfig {
            n: 200,
            outlier_rate: rate,
            trials: 4,
            timing: false,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn record_count_and_order() {
        let recs = run_benchmark(&small(0.5), &[Solver::Vocra, Solver::Ransac]).unwrap();
        assert_eq!(recs.len(), 8);
        for (k, r) in recs.iter().enumerate() {
            assert_eq!(r.trial, k / 2);
            assert_eq!(r.solver, if k % 2 == 0 { Solver::Vocra } else { Solver::Ransac });
            assert_eq!(r.runtime_s, 0.0);
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let c = small(0.8);
        let seq = run_benchmark(&c, &[Solver::Vocra, Solver::Ransac]).unwrap();
        let par = run_benchmark(&BenchConfig { parallel: true, ..c }, &[Solver::Vocra, Solver::Ransac]).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn metrics_are_in_range() {
        for r in run_benchmark(&small(0.9), &[Solver::Vocra]).unwrap() {
            assert!(r.succeeded(), "{}", r.status);
            assert!(r.rot_err_deg.unwrap() >= 0.0 && r.trans_err.unwrap() >= 0.0);
            for v in [r.precision.unwrap(), r.recall.unwrap()] {
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn failures_become_records() {
        // three correspondences with no consistent pair make every solver fail
        let inst = Instance {
            set: vocra::CorrespondenceSetF64::new(
                vec![vocra::Vec3F64::new(0.0, 0.0, 0.0), vocra::Vec3F64::new(1.0, 0.0, 0.0), vocra::Vec3F64::new(0.0, 1.0, 0.0)],
                vec![vocra::Vec3F64::new(0.0, 0.0, 0.0), vocra::Vec3F64::new(5.0, 0.0, 0.0), vocra::Vec3F64::new(0.0, 9.0, 0.0)],
                0.01,
            )
            .unwrap(),
            ground_truth: vocra::RigidTransformF64::identity(),
            inliers: vec![0],
        };
        let r = run_solver(&inst, &small(0.5), 0, Solver::Vocra).unwrap();
        assert!(!r.succeeded());
        assert_eq!(r.rot_err_deg, None);
        assert_eq!(r.rot_err_or_inf(), f64::INFINITY);
    }

    #[test]
    fn solver_names_parse() {
        assert_eq!(Solver::parse_list("vocra, ransac").unwrap(), vec![Solver::Vocra, Solver::Ransac]);
        assert!(Solver::parse_list("").is_err());
        assert!(Solver::parse_list("teaser").is_err());
    }
}
