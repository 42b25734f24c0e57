use std::fs;

use mcmaxsat::bench::{
    aggregate, generate_instance, instance_file_name, load_suite, run_experiment, run_experiment_to, run_seed,
    summary_csv, CsvSink, ExperimentSpec, GridFile, Instance, RunRecord, CHECKPOINT_HEADER, RESULTS_HEADER,
};
use mcmaxsat::{Budget, Method, RolloutKind};

fn instances(count: usize) -> Vec<Instance> {
    (0..count)
        .map(|i| Instance::new(format!("g{i}"), generate_instance(20, 100, 3, i as u64).unwrap()))
        .collect()
}

fn small_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(instances(2));
    spec.methods = vec![Method::Nmcs];
    spec.repetitions = 3;
    spec.budget = Budget::Rollouts(300);
    spec
}

#[test]
fn golden_summary() {
    let text = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/records.json")).unwrap();
    let records: Vec<RunRecord> = serde_json::from_str(&text).unwrap();
    let expected = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/summary.csv")).unwrap();
    assert_eq!(summary_csv(&aggregate(&records)), expected);
}

#[test]
fn single_record_summary() {
    let rec = run_experiment(&ExperimentSpec {
        repetitions: 1,
        instances: instances(1),
        ..small_spec()
    });
    let rows = aggregate(&rec);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].mean_unsat, rec[0].best_unsat as f64);
    assert_eq!(rows[0].std_unsat, 0.0);
}

#[test]
fn grid_cardinality() {
    assert_eq!(run_experiment(&small_spec()).len(), 6);
    let mut spec = small_spec();
    spec.methods = vec![Method::Uctmax, Method::Nmcts, Method::Nmcs, Method::Znmcs];
    spec.rollouts = vec![RolloutKind::Random, RolloutKind::WalkSat];
    spec.levels = vec![1, 2];
    spec.repetitions = 1;
    // Tree searches run once per cell; nested searches once per level.
    assert_eq!(spec.num_runs(), 2 * 2 * (1 + 1 + 2 + 2));
    assert_eq!(run_experiment(&spec).len(), spec.num_runs());
}

#[test]
fn repeated_experiments_agree() {
    let mut spec = small_spec();
    spec.methods = Method::ALL.to_vec();
    spec.rollouts = vec![RolloutKind::WalkSat, RolloutKind::H1];
    let a = run_experiment(&spec);
    spec.workers = 3;
    let b = run_experiment(&spec);
    let key = |r: &RunRecord| (r.instance.clone(), r.method, r.rollout, r.seed, r.best_unsat, r.total_flips, r.total_steps);
    assert_eq!(a.iter().map(key).collect::<Vec<_>>(), b.iter().map(key).collect::<Vec<_>>());
}

#[test]
fn seeds_depend_on_every_component() {
    let base = run_seed("x", Method::Nmcs, 0, 0);
    assert_eq!(base, run_seed("x", Method::Nmcs, 0, 0));
    assert_ne!(base, run_seed("y", Method::Nmcs, 0, 0));
    assert_ne!(base, run_seed("x", Method::Znmcs, 0, 0));
    assert_ne!(base, run_seed("x", Method::Nmcs, 1, 0));
    assert_ne!(base, run_seed("x", Method::Nmcs, 0, 1));
}

#[test]
fn bad_cells_become_error_rows() {
    let mut spec = small_spec();
    spec.levels = vec![1, 3];
    spec.repetitions = 1;
    let records = run_experiment(&spec);
    assert_eq!(records.len(), 4);
    let errors: Vec<&RunRecord> = records.iter().filter(|r| r.is_error()).collect();
    assert_eq!(errors.len(), 2);
    assert!(errors.iter().all(|r| r.level == 3));
    assert!(errors[0].to_csv_line().contains(",error,"));
}

#[test]
fn csv_sink_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut sink = CsvSink::create(dir.path()).unwrap();
    let records = run_experiment_to(&small_spec(), &mut sink).unwrap();
    drop(sink);
    let results = fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let lines: Vec<&str> = results.lines().collect();
    assert_eq!(lines[0], RESULTS_HEADER);
    assert_eq!(lines.len(), 1 + records.len());
    for r in &records {
        assert!(lines.contains(&r.to_csv_line().as_str()));
    }
    let checkpoints = fs::read_to_string(dir.path().join("checkpoints.csv")).unwrap();
    assert_eq!(checkpoints.lines().next(), Some(CHECKPOINT_HEADER));
    let expected: usize = records.iter().map(|r| r.checkpoints.len()).sum();
    assert_eq!(checkpoints.lines().count(), 1 + expected);
}

#[test]
fn suites_load_sorted_by_file_name() {
    let dir = tempfile::tempdir().unwrap();
    for i in [2, 0, 1] {
        let f = generate_instance(5, 10, 2, i as u64).unwrap();
        fs::write(dir.path().join(instance_file_name(5, 10, 2, i)), f.to_dimacs()).unwrap();
    }
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let suite = load_suite(dir.path()).unwrap();
    let ids: Vec<&str> = suite.iter().map(|i| i.id.as_str()).collect();
    assert_eq!(ids, ["rnd_v5_m10_2_0", "rnd_v5_m10_2_1", "rnd_v5_m10_2_2"]);
    assert_eq!(*suite[1].formula, generate_instance(5, 10, 2, 1).unwrap());
}

#[test]
fn grid_files() {
    let grid = GridFile::from_toml(
        r#"
        methods = ["uctmax", "nmcs"]
        rollouts = ["walksat", "novelty"]
        levels = [1, 2]
        repetitions = 2
        budget = "500r"
        flips = "fixed:300"
        eps_init = 1.0
        "#,
    )
    .unwrap();
    let spec = grid.to_spec(instances(1)).unwrap();
    assert_eq!(spec.budget, Budget::Rollouts(500));
    assert_eq!(spec.sls.epsilon_init, 1.0);
    assert_eq!(spec.num_runs(), 2 * (1 + 2) * 2);
    assert!(GridFile::from_toml("methods = [\"nmcs\"]\nrollouts = [\"walksat\"]\nbogus = 1").is_err());
    let zero_reps = GridFile::from_toml("methods = [\"nmcs\"]\nrollouts = [\"walksat\"]\nrepetitions = 0").unwrap();
    assert!(zero_reps.to_spec(instances(1)).is_err());
}
