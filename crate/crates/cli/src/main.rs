use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mcmaxsat::bench::{
    exact_oracle, generate_instance, instance_file_name, load_suite, run_experiment_to, BenchError, CsvSink,
    GridFile, RunRecord,
};
use mcmaxsat::{
    parse_dimacs, run_seeded, Budget, FlipBudget, Formula, McConfig, Method, RolloutKind, RolloutPolicy, SlsConfig,
};

/// Anytime MaxSAT solver: local search rollouts inside Monte Carlo searches.
#[derive(Debug, Parser)]
#[command(name = "mcmaxsat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance and print a results row.
    Solve(SolveArgs),
    /// Run an experiment grid over a suite of instances.
    Bench(BenchArgs),
    /// Write random k-CNF instances.
    Gen(GenArgs),
    /// Exact optimum of a small instance by enumeration.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// DIMACS CNF file.
    #[arg(long)]
    instance: PathBuf,
    /// uctmax, nmcts, nmcs or znmcs.
    #[arg(long)]
    method: Method,
    /// random, h1, h2, h3, walksat or novelty.
    #[arg(long)]
    rollout: RolloutKind,
    /// Nesting level of nmcs and znmcs (1 or 2).
    #[arg(long, default_value_t = 1)]
    level: u32,
    /// `<secs>s`, `<rollouts>r` or `<flips>f`.
    #[arg(long, default_value = "300s")]
    budget: Budget,
    /// Flips per local search call: `fixed:<F>` or `dynamic:<W>[:<E>]`.
    #[arg(long, default_value = "dynamic:2")]
    flips: FlipBudget,
    /// Per-variable probability of a random start value instead of the global best.
    #[arg(long, default_value_t = 0.1)]
    eps_init: f64,
    /// Random-walk probability.
    #[arg(long, default_value_t = 0.1)]
    eps1: f64,
    /// Novelty: probability of keeping a just-flipped best variable.
    #[arg(long, default_value_t = 0.5)]
    eps2: f64,
    /// Simulations per committed step in nmcts.
    #[arg(long, default_value_t = 100)]
    sims: u32,
    /// Samples per step in znmcs.
    #[arg(long, default_value_t = 10)]
    t: u32,
    /// UCT exploration constant.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Start local search from random values only.
    #[arg(long)]
    no_global_init: bool,
    /// Report the last local search state instead of the best visited.
    #[arg(long)]
    final_not_best: bool,
    /// Heuristic rollouts set a variable to its majority polarity.
    #[arg(long)]
    invert_h_polarity: bool,
    /// Use the satisfied fraction itself as reward instead of its square.
    #[arg(long)]
    linear_reward: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Directory of `.cnf` files.
    #[arg(long)]
    suite: PathBuf,
    /// TOML grid description.
    #[arg(long)]
    grid: PathBuf,
    /// Output directory for results.csv and checkpoints.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    vars: usize,
    #[arg(long)]
    clauses: usize,
    /// Literals per clause.
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
}

/// A failed command: message and exit status.
struct Failure(u8, String);

const USAGE: u8 = 2;
const PARSE: u8 = 3;
const RUNTIME: u8 = 4;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Gen(a) => gen(a),
        Command::Oracle(a) => oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn read_instance(path: &Path) -> Result<Formula, Failure> {
    let file = File::open(path).map_err(|e| Failure(RUNTIME, format!("{}: {e}", path.display())))?;
    parse_dimacs(BufReader::new(file)).map_err(|e| Failure(PARSE, format!("{}: {e}", path.display())))
}

fn instance_id(path: &Path) -> String {
    path.file_stem().unwrap_or_default().to_string_lossy().into_owned()
}

fn solve(a: SolveArgs) -> Result<(), Failure> {
    let usage = |e: String| Failure(USAGE, e);
    let sls = SlsConfig {
        epsilon1: a.eps1,
        epsilon2: a.eps2,
        epsilon_init: a.eps_init,
        flip_budget: a.flips,
        return_best_ever: !a.final_not_best,
        init_from_global_best: !a.no_global_init,
    };
    let rollout = RolloutPolicy::new(a.rollout, a.rollout.is_sls().then_some(sls), a.invert_h_polarity)
        .map_err(|e| usage(e.to_string()))?;
    let cfg = McConfig {
        exploration_c: a.c,
        simulations_per_step: a.sims,
        nmcs_level: a.level,
        znmcs_samples: a.t,
        rollout,
        budget: a.budget,
        squared_reward: !a.linear_reward,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let formula = read_instance(&a.instance)?;
    let outcome = run_seeded(a.method, &formula, &cfg, a.seed).map_err(|e| Failure(RUNTIME, e.to_string()))?;
    let level = match a.method {
        Method::Uctmax => 0,
        Method::Nmcts => 1,
        Method::Nmcs | Method::Znmcs => a.level,
    };
    let record = RunRecord::from_outcome(
        &instance_id(&a.instance),
        formula.num_variables(),
        a.method,
        a.rollout,
        level,
        a.seed,
        a.budget,
        &outcome,
    );
    println!("{}", record.to_csv_line());
    Ok(())
}

fn bench_failure(e: BenchError) -> Failure {
    match e {
        BenchError::Parse { .. } => Failure(PARSE, e.to_string()),
        BenchError::Grid(_) | BenchError::InvalidShape { .. } => Failure(USAGE, e.to_string()),
        _ => Failure(RUNTIME, e.to_string()),
    }
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let grid = GridFile::read(&a.grid).map_err(|e| match e {
        BenchError::Io(io) => Failure(RUNTIME, format!("{}: {io}", a.grid.display())),
        e => bench_failure(e),
    })?;
    let instances = load_suite(&a.suite).map_err(bench_failure)?;
    if instances.is_empty() {
        return Err(Failure(RUNTIME, format!("no .cnf files in {}", a.suite.display())));
    }
    let spec = grid.to_spec(instances).map_err(bench_failure)?;
    let mut sink = CsvSink::create(&a.out).map_err(bench_failure)?;
    let records = run_experiment_to(&spec, &mut sink).map_err(bench_failure)?;
    let failed = records.iter().filter(|r| r.is_error()).count();
    eprintln!("{} runs, {failed} failed, written to {}", records.len(), a.out.display());
    Ok(())
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    fs::create_dir_all(&a.out).map_err(|e| Failure(RUNTIME, format!("{}: {e}", a.out.display())))?;
    for i in 0..a.count {
        let seed = a.seed.wrapping_add(i as u64);
        let f = generate_instance(a.vars, a.clauses, a.k, seed).map_err(bench_failure)?;
        let path = a.out.join(instance_file_name(a.vars, a.clauses, a.k, i));
        fs::write(&path, f.to_dimacs()).map_err(|e| Failure(RUNTIME, format!("{}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn oracle(a: OracleArgs) -> Result<(), Failure> {
    let formula = read_instance(&a.instance)?;
    let (optimum, witness) = exact_oracle(&formula).map_err(|e| Failure(RUNTIME, e.to_string()))?;
    println!("optimum_unsat={optimum}");
    let lits: Vec<String> = witness.to_dimacs_literals().iter().map(i64::to_string).collect();
    println!("{} 0", lits.join(" "));
    Ok(())
}
