use super::*;

fn small(spec: DistributionSpec) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(spec, 200);
    cfg.replications = 6;
    cfg.seed = 11;
    cfg
}

fn read_table(path: &std::path::Path) -> Vec<csv::StringRecord> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn config_rejects_unknown_keys_and_bad_values() {
    let ok = r#"{"spec": {"family": "linnik", "params": {"beta": 0.75}}, "n": 500}"#;
    let cfg = ExperimentConfig::from_json(ok).unwrap();
    assert_eq!(cfg.replications, 100);
    assert_eq!(cfg.portfolio, Portfolio::LogCubic);
    let typo = r#"{"spec": {"family": "linnik", "params": {"beta": 0.75}}, "n": 500, "replicatons": 3}"#;
    let e = ExperimentConfig::from_json(typo).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    let small_n = r#"{"spec": {"family": "linnik", "params": {"beta": 0.75}}, "n": 3}"#;
    assert!(matches!(ExperimentConfig::from_json(small_n), Err(Error::Config(_))));
    let bad_beta = r#"{"spec": {"family": "linnik", "params": {"beta": 2.0}}, "n": 50}"#;
    assert!(matches!(ExperimentConfig::from_json(bad_beta), Err(Error::Config(_))));
    let mut cfg = small(DistributionSpec::standard_normal());
    cfg.replications = 0;
    assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
}

#[test]
fn single_replication_is_bit_identical() {
    let mut cfg = small(DistributionSpec::cauchy(0.0, 1.0));
    cfg.replications = 1;
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert_eq!(a, b);
    let dir = tempfile::tempdir().unwrap();
    let pa = emit_report(&a, ReportFormat::Json, dir.path(), "a").unwrap();
    let pb = emit_report(&b, ReportFormat::Json, dir.path(), "b").unwrap();
    assert_eq!(std::fs::read(&pa[0]).unwrap(), std::fs::read(&pb[0]).unwrap());
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = small(DistributionSpec::standard_normal());
    let pool = |t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
    let one = pool(1).install(|| run_experiment(&cfg)).unwrap();
    let three = pool(3).install(|| run_experiment(&cfg)).unwrap();
    assert_eq!(one, three);
}

#[test]
fn split_runs_pool_to_the_single_run() {
    let mut cfg = small(DistributionSpec::PearsonType { rho: 0.4 });
    cfg.replications = 8;
    let whole = run_experiment(&cfg).unwrap();
    let mut first = cfg.clone();
    first.replications = 4;
    let mut second = first.clone();
    second.first_replication = 4;
    let a = run_experiment(&first).unwrap();
    let b = run_experiment(&second).unwrap();
    let pooled = ExperimentResult::pool(&[b.clone(), a.clone()]).unwrap();
    assert_eq!(pooled, whole);
    assert!(ExperimentResult::pool(&[a.clone(), a]).is_err());
}

#[test]
fn json_round_trips() {
    let mut cfg = small(DistributionSpec::standard_normal());
    cfg.bounds = true;
    cfg.benchmark_class = Some(FunctionClass::Analytic { r: 2.0, gamma: 0.5, q: 1.0 });
    let result = run_experiment(&cfg).unwrap();
    assert!(result.bound_report.is_some());
    let bench = result.benchmark.as_ref().unwrap();
    assert!((bench.cf / bench.density - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    let dir = tempfile::tempdir().unwrap();
    let path = &emit_report(&result, ReportFormat::Json, dir.path(), "r").unwrap()[0];
    let back: ExperimentResult = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    assert_eq!(back, result);
}

#[test]
fn csv_and_plotdata_tables() {
    let mut cfg = small(DistributionSpec::Linnik { beta: 0.75 });
    cfg.bounds = true;
    let result = run_experiment(&cfg).unwrap();
    let k = result.metadata.cutoff;
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&result, ReportFormat::Csv, dir.path(), "x").unwrap();
    assert_eq!(files.len(), 4);
    for f in &files {
        let text = std::fs::read_to_string(f).unwrap();
        assert!(text.lines().next().unwrap().contains(&result.metadata.config_hash));
    }
    assert_eq!(read_table(&dir.path().join("x_blocks.csv")).len(), k);
    assert_eq!(read_table(&dir.path().join("x_replications.csv")).len(), cfg.replications);
    let plots = emit_report(&result, ReportFormat::Plotdata, dir.path(), "x").unwrap();
    assert_eq!(plots.len(), 3);
    let text = std::fs::read_to_string(&plots[0]).unwrap();
    assert_eq!(text.lines().count(), k + 2);
}

#[test]
fn unknown_format_is_a_usage_error() {
    let e = "svg".parse::<ReportFormat>().unwrap_err();
    assert!(matches!(e, Error::Usage(_)));
    assert_eq!(e.exit_code(), 2);
    assert_eq!("PlotData".parse::<ReportFormat>().unwrap(), ReportFormat::Plotdata);
}

#[test]
fn sweep_plotdata_rows() {
    let mut cfg = small(DistributionSpec::standard_normal());
    cfg.replications = 2;
    cfg.estimators = vec![EstimatorKind::Ep];
    let ns = [500, 1000, 2000, 4000];
    let results = rate_sweep(&cfg, &ns).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_sweep_plotdata(&results, dir.path(), "rate").unwrap();
    let text = std::fs::read_to_string(&files[0]).unwrap();
    let rows: Vec<usize> = text
        .lines()
        .skip(2)
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(rows, ns);
}

#[test]
fn oracle_mise_matches_block_risk_sum() {
    let mut cfg = ExperimentConfig::new(DistributionSpec::standard_normal(), 1000);
    cfg.replications = 200;
    cfg.estimators = vec![EstimatorKind::Oracle];
    cfg.seed = 2024;
    let r = run_experiment(&cfg).unwrap();
    let s = r.summary(EstimatorKind::Oracle).unwrap();
    assert!(
        (s.mise - r.oracle_mise).abs() < 4.0 * s.std_error,
        "{} vs {} (se {})",
        s.mise,
        r.oracle_mise,
        s.std_error
    );
}
