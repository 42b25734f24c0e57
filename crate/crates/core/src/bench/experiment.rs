use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::record::{RunRecord, CHECKPOINT_HEADER, RESULTS_HEADER};
use super::BenchError;
use crate::budget::Budget;
use crate::formula::{parse_dimacs, Formula};
use crate::montecarlo::{self, McConfig, Method};
use crate::rollout::{RolloutKind, RolloutPolicy};
use crate::sls::{FlipBudget, SlsConfig};

/// A named formula of a suite.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub formula: Arc<Formula>,
}

impl Instance {
    pub fn new(id: impl Into<String>, formula: Formula) -> Self {
        Instance {
            id: id.into(),
            formula: Arc::new(formula),
        }
    }
}

/// Reads every `.cnf` file of `dir`, sorted by name; the id is the file stem.
pub fn load_suite(dir: &Path) -> Result<Vec<Instance>, BenchError> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cnf"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let formula = parse_dimacs(BufReader::new(File::open(&p)?)).map_err(|source| BenchError::Parse {
                path: p.display().to_string(),
                source,
            })?;
            let id = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok(Instance::new(id, formula))
        })
        .collect()
}

/// A full experiment grid: instances × methods × rollouts × levels × repetitions.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub instances: Vec<Instance>,
    pub methods: Vec<Method>,
    pub rollouts: Vec<RolloutKind>,
    /// Only expanded for the nested searches; tree methods run once per cell.
    pub levels: Vec<u32>,
    pub repetitions: u32,
    pub budget: Budget,
    /// Local search settings shared by the SLS rollouts.
    pub sls: SlsConfig,
    pub invert_polarity_rule: bool,
    /// Template for the remaining search settings; its rollout, level and
    /// budget are overridden per cell.
    pub search: McConfig,
    pub workers: usize,
    /// Mixed into every run seed.
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(instances: Vec<Instance>) -> Self {
        ExperimentSpec {
            instances,
            methods: vec![Method::Nmcts],
            rollouts: vec![RolloutKind::WalkSat],
            levels: vec![1],
            repetitions: 10,
            budget: Budget::Seconds(300.0),
            sls: SlsConfig::default(),
            invert_polarity_rule: false,
            search: McConfig::default(),
            workers: 1,
            seed: 0,
        }
    }

    fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for (i, _) in self.instances.iter().enumerate() {
            for &method in &self.methods {
                for &rollout in &self.rollouts {
                    let levels: Vec<u32> = match method {
                        Method::Uctmax => vec![0],
                        Method::Nmcts => vec![1],
                        Method::Nmcs | Method::Znmcs => self.levels.clone(),
                    };
                    for level in levels {
                        for rep in 0..self.repetitions {
                            out.push(Cell {
                                instance: i,
                                method,
                                rollout,
                                level,
                                rep,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn num_runs(&self) -> usize {
        self.cells().len()
    }

    fn config_for(&self, cell: &Cell) -> Result<McConfig, String> {
        let rollout = RolloutPolicy::new(
            cell.rollout,
            cell.rollout.is_sls().then(|| self.sls.clone()),
            self.invert_polarity_rule,
        )
        .map_err(|e| e.to_string())?;
        let cfg = McConfig {
            rollout,
            budget: self.budget,
            nmcs_level: cell.level.max(1),
            ..self.search.clone()
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    instance: usize,
    method: Method,
    rollout: RolloutKind,
    level: u32,
    rep: u32,
}

/// Seed of one run, a hash of instance id, method, repetition and the
/// experiment salt.
pub fn run_seed(instance_id: &str, method: Method, repetition: u32, salt: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(instance_id.as_bytes());
    h.update([0]);
    h.update(method.name().as_bytes());
    h.update([0]);
    h.update(repetition.to_le_bytes());
    h.update(salt.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

fn execute(spec: &ExperimentSpec, cell: &Cell) -> RunRecord {
    let inst = &spec.instances[cell.instance];
    let seed = run_seed(&inst.id, cell.method, cell.rep, spec.seed);
    let n = inst.formula.num_variables();
    let failed = |msg: String| {
        RunRecord::failed(&inst.id, n, cell.method, cell.rollout, cell.level, seed, spec.budget, msg)
    };
    let cfg = match spec.config_for(cell) {
        Ok(c) => c,
        Err(e) => return failed(e),
    };
    let result = panic::catch_unwind(AssertUnwindSafe(|| {
        montecarlo::run_seeded(cell.method, &inst.formula, &cfg, seed)
    }));
    match result {
        Ok(Ok(outcome)) => RunRecord::from_outcome(
            &inst.id,
            n,
            cell.method,
            cell.rollout,
            cell.level,
            seed,
            spec.budget,
            &outcome,
        ),
        Ok(Err(e)) => failed(e.to_string()),
        Err(p) => failed(
            p.downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "solver panicked".into()),
        ),
    }
}

/// Receives records as runs complete.
pub trait RecordSink {
    fn accept(&mut self, record: &RunRecord) -> Result<(), BenchError>;
}

impl RecordSink for Vec<RunRecord> {
    fn accept(&mut self, record: &RunRecord) -> Result<(), BenchError> {
        self.push(record.clone());
        Ok(())
    }
}

/// Writes `results.csv` and `checkpoints.csv`, flushing after every run so
/// an interrupted experiment keeps its completed rows.
pub struct CsvSink {
    results: csv::Writer<BufWriter<File>>,
    checkpoints: csv::Writer<BufWriter<File>>,
}

impl CsvSink {
    pub fn create(dir: &Path) -> Result<Self, BenchError> {
        fs::create_dir_all(dir)?;
        let open = |name: &str, header: &str| -> Result<csv::Writer<BufWriter<File>>, BenchError> {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(BufWriter::new(File::create(dir.join(name))?));
            w.write_record(header.split(','))?;
            w.flush()?;
            Ok(w)
        };
        Ok(CsvSink {
            results: open("results.csv", RESULTS_HEADER)?,
            checkpoints: open("checkpoints.csv", CHECKPOINT_HEADER)?,
        })
    }
}

impl RecordSink for CsvSink {
    fn accept(&mut self, record: &RunRecord) -> Result<(), BenchError> {
        record.write_result(&mut self.results)?;
        for row in record.checkpoint_fields() {
            self.checkpoints.write_record(row)?;
        }
        self.results.flush()?;
        self.checkpoints.flush()?;
        Ok(())
    }
}

/// Runs the whole grid and returns the records in grid order.
pub fn run_experiment(spec: &ExperimentSpec) -> Vec<RunRecord> {
    struct Discard;
    impl RecordSink for Discard {
        fn accept(&mut self, _: &RunRecord) -> Result<(), BenchError> {
            Ok(())
        }
    }
    run_experiment_to(spec, &mut Discard).expect("discarding sink never fails")
}

/// Runs the grid on `spec.workers` threads, streaming each record to `sink`
/// as it completes. Returns the records in grid order.
pub fn run_experiment_to(spec: &ExperimentSpec, sink: &mut dyn RecordSink) -> Result<Vec<RunRecord>, BenchError> {
    let cells = spec.cells();
    let workers = spec.workers.clamp(1, cells.len().max(1));
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<RunRecord>> = vec![None; cells.len()];
    let mut sink_error = None;

    thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, RunRecord)>();
        for _ in 0..workers {
            let tx = tx.clone();
            let (cells, next) = (&cells, &next);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = cells.get(i) else { break };
                let record = execute(spec, cell);
                if tx.send((i, record)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (i, record) in rx {
            if record.is_error() {
                log::warn!(
                    "{} {} {}: {}",
                    record.instance,
                    record.method,
                    record.rollout,
                    record.error.as_deref().unwrap_or_default()
                );
            }
            if sink_error.is_none() {
                if let Err(e) = sink.accept(&record) {
                    sink_error = Some(e);
                }
            }
            slots[i] = Some(record);
        }
    });

    if let Some(e) = sink_error {
        return Err(e);
    }
    Ok(slots.into_iter().map(|r| r.expect("every cell reports")).collect())
}

/// Grid description read by the `bench` command (TOML).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub methods: Vec<String>,
    pub rollouts: Vec<String>,
    #[serde(default = "default_levels")]
    pub levels: Vec<u32>,
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    #[serde(default = "default_budget")]
    pub budget: String,
    #[serde(default)]
    pub flips: Option<String>,
    pub eps_init: Option<f64>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub sims: Option<u32>,
    pub t: Option<u32>,
    pub c: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub no_global_init: bool,
    #[serde(default)]
    pub final_not_best: bool,
    #[serde(default)]
    pub invert_h_polarity: bool,
    #[serde(default)]
    pub linear_reward: bool,
}

fn default_levels() -> Vec<u32> {
    vec![1]
}
fn default_repetitions() -> u32 {
    10
}
fn default_budget() -> String {
    "300s".into()
}
fn default_workers() -> usize {
    1
}

impl GridFile {
    pub fn from_toml(text: &str) -> Result<Self, BenchError> {
        toml::from_str(text).map_err(|e| BenchError::Grid(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, BenchError> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    /// Builds the experiment over `instances`.
    pub fn to_spec(&self, instances: Vec<Instance>) -> Result<ExperimentSpec, BenchError> {
        let grid = |e: String| BenchError::Grid(e);
        let methods = self
            .methods
            .iter()
            .map(|m| m.parse::<Method>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(grid)?;
        let rollouts = self
            .rollouts
            .iter()
            .map(|r| r.parse::<RolloutKind>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(grid)?;
        if self.repetitions == 0 {
            return Err(grid("repetitions must be at least 1".into()));
        }
        let mut spec = ExperimentSpec::new(instances);
        spec.methods = methods;
        spec.rollouts = rollouts;
        spec.levels = self.levels.clone();
        spec.repetitions = self.repetitions;
        spec.budget = self.budget.parse().map_err(grid)?;
        if let Some(f) = &self.flips {
            spec.sls.flip_budget = f.parse::<FlipBudget>().map_err(grid)?;
        }
        if let Some(v) = self.eps_init {
            spec.sls.epsilon_init = v;
        }
        if let Some(v) = self.eps1 {
            spec.sls.epsilon1 = v;
        }
        if let Some(v) = self.eps2 {
            spec.sls.epsilon2 = v;
        }
        spec.sls.init_from_global_best = !self.no_global_init;
        spec.sls.return_best_ever = !self.final_not_best;
        spec.sls.validate().map_err(|e| grid(e.to_string()))?;
        if let Some(v) = self.sims {
            spec.search.simulations_per_step = v;
        }
        if let Some(v) = self.t {
            spec.search.znmcs_samples = v;
        }
        if let Some(v) = self.c {
            spec.search.exploration_c = v;
        }
        spec.search.squared_reward = !self.linear_reward;
        spec.invert_polarity_rule = self.invert_h_polarity;
        spec.workers = self.workers.max(1);
        spec.seed = self.seed;
        Ok(spec)
    }
}
