use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::montecarlo::{Method, SearchOutcome};
use crate::rollout::RolloutKind;
use crate::sls::Checkpoint;

pub const RESULTS_HEADER: &str =
    "instance,method,rollout,level,seed,budget_mode,budget,best_unsat,time_to_best_s,total_flips,total_steps";
pub const CHECKPOINT_HEADER: &str = "instance,method,rollout,level,seed,elapsed_s,best_unsat";

/// One solver execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub num_variables: usize,
    pub method: Method,
    pub rollout: RolloutKind,
    /// 0 for the single-tree search, 1 for nested MCTS, the nesting level otherwise.
    pub level: u32,
    pub seed: u64,
    pub budget: Budget,
    pub best_unsat: usize,
    pub time_to_best_s: f64,
    pub total_flips: u64,
    /// Leaf evaluations performed.
    pub total_steps: u64,
    /// Best value so far at each improvement and at every whole second.
    pub checkpoints: Vec<Checkpoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn from_outcome(
        instance: &str,
        num_variables: usize,
        method: Method,
        rollout: RolloutKind,
        level: u32,
        seed: u64,
        budget: Budget,
        outcome: &SearchOutcome,
    ) -> Self {
        RunRecord {
            instance: instance.to_string(),
            num_variables,
            method,
            rollout,
            level,
            seed,
            budget,
            best_unsat: outcome.best_unsat,
            time_to_best_s: outcome.time_to_best_s,
            total_flips: outcome.total_flips,
            total_steps: outcome.total_rollouts,
            checkpoints: sample_checkpoints(&outcome.checkpoints, outcome.elapsed_s),
            error: None,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn failed(
        instance: &str,
        num_variables: usize,
        method: Method,
        rollout: RolloutKind,
        level: u32,
        seed: u64,
        budget: Budget,
        error: String,
    ) -> Self {
        RunRecord {
            instance: instance.to_string(),
            num_variables,
            method,
            rollout,
            level,
            seed,
            budget,
            best_unsat: 0,
            time_to_best_s: 0.0,
            total_flips: 0,
            total_steps: 0,
            checkpoints: Vec::new(),
            error: Some(error),
        }
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }

    /// Fields of the results CSV row. Failed runs carry `error` in the
    /// `best_unsat` column and leave the measurements empty.
    pub fn result_fields(&self) -> Vec<String> {
        let mut row = vec![
            self.instance.clone(),
            self.method.to_string(),
            self.rollout.to_string(),
            self.level.to_string(),
            self.seed.to_string(),
            self.budget.mode_name().to_string(),
            format_amount(self.budget),
        ];
        if self.is_error() {
            row.extend(["error".to_string(), String::new(), String::new(), String::new()]);
        } else {
            row.extend([
                self.best_unsat.to_string(),
                format!("{:.6}", self.time_to_best_s),
                self.total_flips.to_string(),
                self.total_steps.to_string(),
            ]);
        }
        row
    }

    pub fn checkpoint_fields(&self) -> Vec<Vec<String>> {
        self.checkpoints
            .iter()
            .map(|c| {
                vec![
                    self.instance.clone(),
                    self.method.to_string(),
                    self.rollout.to_string(),
                    self.level.to_string(),
                    self.seed.to_string(),
                    format!("{:.6}", c.elapsed_s),
                    c.best_unsat.to_string(),
                ]
            })
            .collect()
    }

    /// The results row as one CSV line without a trailing newline.
    pub fn to_csv_line(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(self.result_fields()).expect("in-memory write");
        let bytes = w.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("utf-8 fields").trim_end().to_string()
    }

    pub fn write_result<W: Write>(&self, w: &mut csv::Writer<W>) -> csv::Result<()> {
        w.write_record(self.result_fields())
    }
}

fn format_amount(budget: Budget) -> String {
    match budget {
        Budget::Seconds(s) => format!("{s}"),
        Budget::Rollouts(r) => r.to_string(),
        Budget::Flips(f) => f.to_string(),
    }
}

/// Improvement checkpoints plus one sample per elapsed whole second and a
/// final sample at the end of the run.
fn sample_checkpoints(improvements: &[Checkpoint], elapsed_s: f64) -> Vec<Checkpoint> {
    let mut out: Vec<Checkpoint> = Vec::with_capacity(improvements.len() + elapsed_s as usize + 1);
    let mut it = improvements.iter().peekable();
    let mut current: Option<usize> = None;
    let mut second = 1.0;
    loop {
        let next_improvement = it.peek().map(|c| c.elapsed_s);
        match next_improvement {
            Some(t) if t <= second || second > elapsed_s => {
                let c = it.next().unwrap();
                current = Some(c.best_unsat);
                out.push(*c);
            }
            _ if second <= elapsed_s => {
                if let Some(best) = current {
                    out.push(Checkpoint {
                        elapsed_s: second,
                        best_unsat: best,
                    });
                }
                second += 1.0;
            }
            _ => break,
        }
    }
    if let Some(best) = current {
        if out.last().is_some_and(|c| c.elapsed_s < elapsed_s) {
            out.push(Checkpoint {
                elapsed_s,
                best_unsat: best,
            });
        }
    }
    out
}
