use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use vocra::pipeline::Diagnostics;
use vocra::voting::{voting_tb_with, EarlyExit};
use vocra::{rotation_error, translation_error, vocra, GncParams, VocraConfigF64, VoteKernel, VoteKernelKind};
use vocra_bench::{
    format_summary, load_xyz, run_sweep, summarize, synthetic_surface, trial_instance, write_csv, write_json,
    BenchConfig, OutlierMode, Solver, DEFAULT_RATES,
};

use crate::args::{BenchArgs, GenerateArgs, InstanceArgs, RegisterArgs, SolverArgs, VoteInspectArgs};
use crate::error::{CliError, CliResult};
use crate::io::{format_correspondences, read_correspondences, write_text, GroundTruth};

/// Invalid flag combinations are usage errors, not solver failures.
pub fn solver_config(args: &SolverArgs) -> CliResult<VocraConfigF64> {
    let invalid = |e: vocra::Error| CliError::Invalid(e.to_string());
    let mut c = VocraConfigF64::with_multipliers(args.sigma, args.theta, args.xi1_mult, args.xi2_mult).map_err(invalid)?;
    c.vote_mu = args.vote_mu;
    c.validate().map_err(invalid)?;
    Ok(c)
}

fn bench_config(solver: &SolverArgs, instance: &InstanceArgs, translation_bound: f64) -> CliResult<BenchConfig> {
    Ok(BenchConfig {
        n: instance.n,
        sigma: solver.sigma,
        theta: solver.theta,
        translation_bound,
        outlier_mode: instance.outlier_mode.parse::<OutlierMode>()?,
        seed: instance.seed,
        xi1_mult: solver.xi1_mult,
        xi2_mult: solver.xi2_mult,
        vote_mu: solver.vote_mu,
        ..BenchConfig::default()
    })
}

fn model_points(instance: &InstanceArgs) -> CliResult<Vec<vocra::Vec3F64>> {
    match &instance.model {
        Some(path) => load_xyz(path).map_err(|e| match e {
            vocra_bench::BenchError::Parse { line, message } => CliError::Parse {
                path: path.clone(),
                line,
                message,
            },
            other => CliError::io(path, other),
        }),
        None => Ok(synthetic_surface(instance.n)),
    }
}

fn emit(output: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match output {
        Some(path) => write_text(path, text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn diagnostics_json(d: &Diagnostics<f64>) -> Value {
    let mut v = json!({});
    if let Some(s) = &d.voting {
        v["voting"] = json!({
            "max_vote": s.max_vote,
            "min_vote": s.min_vote,
            "enough_inliers": s.enough_inliers,
        });
    }
    if let Some(s) = &d.consensus {
        v["consensus"] = json!({
            "min_inliers": s.min_inliers,
            "candidates": s.candidates,
            "consensus_size": s.consensus_size,
            "early_break": s.early_break,
            "averaged_rotation": s.averaged_rotation.to_row_array(),
            "anchor_pairs": s.stats.anchor_pairs,
            "triads_solved": s.stats.triads_solved,
            "averaging_runs": s.stats.averaging_runs,
        });
    }
    if let Some(s) = &d.gnc {
        v["gnc"] = json!({
            "iterations": s.iterations,
            "final_mu": s.final_mu,
            "rotation": s.rotation.to_row_array(),
        });
    }
    if let Some(s) = &d.ransac {
        v["ransac"] = json!({
            "iterations": s.iterations,
            "hypothesis_support": s.hypothesis_support,
        });
    }
    v
}

fn precision_recall(found: &[usize], truth: &[usize]) -> (f64, f64) {
    let truth: HashSet<usize> = truth.iter().copied().collect();
    let hits = found.iter().filter(|i| truth.contains(i)).count() as f64;
    let precision = if found.is_empty() { 0.0 } else { hits / found.len() as f64 };
    let recall = if truth.is_empty() { 1.0 } else { hits / truth.len() as f64 };
    (precision, recall)
}

pub fn register(args: &RegisterArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let config = solver_config(&args.solver)?;
    let set = read_correspondences(&args.input, args.solver.sigma)?;
    let truth = args.ground_truth.as_deref().map(GroundTruth::read).transpose()?;
    let res = vocra(&set, &config)?;

    let t = res.transform.translation;
    let mut out = json!({
        "rotation": res.transform.rotation.to_row_array(),
        "translation": [t.x, t.y, t.z],
        "inliers": res.inliers,
        "runtime_s": res.runtime_seconds,
        "diagnostics": diagnostics_json(&res.diagnostics),
    });
    if let Some(gt) = truth {
        let g = gt.transform()?;
        let (precision, recall) = precision_recall(&res.inliers, &gt.inliers);
        out["evaluation"] = json!({
            "rot_err_deg": rotation_error(&g.rotation, &res.transform.rotation),
            "trans_err": translation_error(&g.translation, &res.transform.translation),
            "precision": precision,
            "recall": recall,
        });
    }
    let text = serde_json::to_string_pretty(&out).expect("json values serialize") + "\n";
    emit(args.output.as_deref(), &text, stdout)
}

fn parse_rates(s: Option<&str>) -> CliResult<Vec<f64>> {
    let Some(s) = s else {
        return Ok(DEFAULT_RATES.to_vec());
    };
    let rates = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| CliError::Invalid(format!("invalid outlier rate `{t}`")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if rates.is_empty() {
        return Err(CliError::Invalid("no outlier rates given".into()));
    }
    Ok(rates)
}

/// Records go to `--output` (or stdout); the summary table goes to stdout
/// when records went to a file and to stderr otherwise.
pub fn bench(args: &BenchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let mut base = bench_config(&args.solver, &args.instance, args.translation_bound)?;
    base.trials = args.trials;
    base.ransac_iterations = args.ransac_iterations;
    base.timing = !args.no_timing;
    base.parallel = args.parallel;
    let rates = parse_rates(args.outlier_rate.as_deref())?;
    for &rate in &rates {
        BenchConfig {
            outlier_rate: rate,
            ..base.clone()
        }
        .validate()?;
    }
    let solvers = Solver::parse_list(&args.solvers)?;
    let model = model_points(&args.instance)?;
    let records = run_sweep(&model, &base, &rates, &solvers)?;

    let mut buf = Vec::new();
    let json = args
        .output
        .as_ref()
        .is_some_and(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")));
    if json {
        write_json(&records, &mut buf)?;
    } else {
        write_csv(&records, &mut buf)?;
    }
    let text = String::from_utf8(buf).expect("records are utf-8");
    emit(args.output.as_deref(), &text, stdout)?;

    let table = format_summary(&summarize(&records));
    let sink: &mut dyn Write = if args.output.is_some() { stdout } else { stderr };
    sink.write_all(table.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

pub fn vote_inspect(args: &VoteInspectArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let config = solver_config(&args.solver)?;
    let kind: VoteKernelKind = args.kernel.parse().map_err(|e: vocra::Error| CliError::Invalid(e.to_string()))?;
    let kernel = VoteKernel::new(kind, GncParams::new(config.vote_mu, config.xi1).map_err(|e| CliError::Invalid(e.to_string()))?);
    let set = read_correspondences(&args.input, args.solver.sigma)?;
    let truth = args.ground_truth.as_deref().map(GroundTruth::read).transpose()?;

    // ranks come from complete voting; the flag from the solver's early exit
    let table = voting_tb_with(&set, &kernel, None)?;
    let enough_inliers = voting_tb_with(&set, &kernel, Some(EarlyExit::default()))?.enough_inliers;
    let ranks = table.ranks();
    let inlier: Option<HashSet<usize>> = truth.as_ref().map(|gt| gt.inliers.iter().copied().collect());

    let mut csv = String::from("index,votes,rank,is_inlier\n");
    for (i, (votes, rank)) in table.votes.iter().zip(&ranks).enumerate() {
        let flag = inlier.as_ref().map(|s| s.contains(&i).to_string()).unwrap_or_default();
        csv.push_str(&format!("{i},{votes},{rank},{flag}\n"));
    }
    emit(args.output.as_deref(), &csv, stdout)?;

    let max_inlier_rank = inlier
        .as_ref()
        .and_then(|s| s.iter().filter(|&&i| i < ranks.len()).map(|&i| ranks[i]).max());
    let summary = json!({
        "kernel": kind.name(),
        "enough_inliers": enough_inliers,
        "max_inlier_rank": max_inlier_rank,
    });
    writeln!(stderr, "{summary}").map_err(|e| CliError::io("<stderr>", e))
}

pub fn generate(args: &GenerateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let mut config = bench_config(&args.solver, &args.instance, args.translation_bound)?;
    config.outlier_rate = args.outlier_rate;
    config.validate()?;
    let model = model_points(&args.instance)?;
    let inst = trial_instance(&model, &config, args.trial)?;

    let header = format!(
        "synthetic instance: n={} outlier_rate={} outlier_mode={} sigma={} seed={} trial={}\npx py pz qx qy qz",
        config.n, config.outlier_rate, config.outlier_mode, config.sigma, config.seed, args.trial
    );
    write_text(&args.output, &format_correspondences(&inst.set, &header))?;

    let gt_path = args.ground_truth.clone().unwrap_or_else(|| sidecar_path(&args.output));
    let gt = GroundTruth::new(&inst.ground_truth, inst.inliers);
    let text = serde_json::to_string_pretty(&gt).expect("ground truth serializes") + "\n";
    write_text(&gt_path, &text)?;
    writeln!(stdout, "{}\n{}", args.output.display(), gt_path.display()).map_err(|e| CliError::io("<stdout>", e))
}

/// `<output>.gt.json`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".gt.json");
    PathBuf::from(name)
}
