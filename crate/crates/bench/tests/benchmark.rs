use vocra_bench::{
    csv_string, load_xyz, run_benchmark, run_benchmark_on, run_sweep, summarize, synthetic_surface, write_csv,
    write_json, BenchConfig, OutlierMode, Solver, CSV_HEADER,
};

fn small() -> BenchConfig {
    BenchConfig {
        n: 300,
        trials: 5,
        timing: false,
        ..BenchConfig::default()
    }
}

#[test]
fn vocra_at_80_percent_is_accurate() {
    let cfg = BenchConfig {
        outlier_rate: 0.8,
        n: 1000,
        trials: 30,
        ..small()
    };
    let recs = run_benchmark(&cfg, &[Solver::Vocra]).unwrap();
    assert_eq!(recs.len(), 30);
    assert!(recs.iter().all(|r| r.rot_err_or_inf() < 2.0));
}

#[test]
fn two_solvers_double_the_records() {
    let recs = run_benchmark(&small(), &[Solver::Vocra, Solver::Ransac]).unwrap();
    assert_eq!(recs.len(), 10);
    assert_eq!(recs.iter().filter(|r| r.solver == Solver::Ransac).count(), 5);
}

#[test]
fn sweep_concatenates_rates_and_summarizes() {
    let model = synthetic_surface(300);
    let recs = run_sweep(&model, &small(), &[0.2, 0.5, 0.9], &[Solver::Vocra]).unwrap();
    assert_eq!(recs.len(), 15);
    let rows = summarize(&recs);
    assert_eq!(rows.iter().map(|r| r.outlier_rate).collect::<Vec<_>>(), vec![0.2, 0.5, 0.9]);
    assert!(rows.iter().all(|r| r.trials == 5));
}

#[test]
fn csv_and_json_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = BenchConfig {
        outlier_mode: OutlierMode::OnSurface,
        ..small()
    };
    let mut bytes = Vec::new();
    for k in 0..2 {
        let recs = run_benchmark(&cfg, &[Solver::Vocra, Solver::Ransac]).unwrap();
        let csv_path = dir.path().join(format!("r{k}.csv"));
        write_csv(&recs, std::fs::File::create(&csv_path).unwrap()).unwrap();
        let json_path = dir.path().join(format!("r{k}.json"));
        write_json(&recs, std::fs::File::create(&json_path).unwrap()).unwrap();
        bytes.push((std::fs::read(&csv_path).unwrap(), std::fs::read(&json_path).unwrap()));
    }
    assert_eq!(bytes[0], bytes[1]);
    let text = String::from_utf8(bytes[0].0.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert!(!text.contains('\r'));
}

#[test]
fn external_model_file_drives_the_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.xyz");
    let mut text = String::from("# x y z\n");
    for p in synthetic_surface(500) {
        text.push_str(&format!("{} {} {}\n", p.x * 7.0 + 1.0, p.y * 7.0, p.z * 7.0 - 2.0));
    }
    std::fs::write(&path, text).unwrap();
    let model = load_xyz(&path).unwrap();
    assert_eq!(model.len(), 500);
    let cfg = BenchConfig {
        n: 400,
        outlier_rate: 0.9,
        ..small()
    };
    let a = run_benchmark_on(&model, &cfg, &[Solver::Vocra]).unwrap();
    assert!(a.iter().filter(|r| r.rot_err_or_inf() < 2.0).count() >= 4);
    assert_eq!(csv_string(&a).unwrap(), csv_string(&run_benchmark_on(&model, &cfg, &[Solver::Vocra]).unwrap()).unwrap());
}
