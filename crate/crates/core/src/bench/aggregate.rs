use std::collections::BTreeMap;
use std::fmt::Write;

use super::record::RunRecord;
use crate::montecarlo::Method;
use crate::rollout::RolloutKind;

/// Statistics of the final `best_unsat` over the runs of one group, method,
/// rollout and level. Groups collect instances of equal variable count.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub group: String,
    pub method: Method,
    pub rollout: RolloutKind,
    pub level: u32,
    pub runs: usize,
    pub mean_unsat: f64,
    /// Sample standard deviation; 0 for a single run.
    pub std_unsat: f64,
    pub min_unsat: usize,
}

pub const SUMMARY_HEADER: &str = "group,method,rollout,level,runs,mean_unsat,std_unsat,min_unsat";

/// Groups completed runs; failed runs are skipped.
pub fn aggregate(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(usize, &'static str, &'static str, u32), Vec<&RunRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| !r.is_error()) {
        groups
            .entry((r.num_variables, r.method.name(), r.rollout.name(), r.level))
            .or_default()
            .push(r);
    }
    groups
        .into_values()
        .map(|rs| {
            let values: Vec<f64> = rs.iter().map(|r| r.best_unsat as f64).collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let std = if values.len() > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            SummaryRow {
                group: format!("v{}", rs[0].num_variables),
                method: rs[0].method,
                rollout: rs[0].rollout,
                level: rs[0].level,
                runs: rs.len(),
                mean_unsat: mean,
                std_unsat: std,
                min_unsat: rs.iter().map(|r| r.best_unsat).min().unwrap(),
            }
        })
        .collect()
}

/// Summary table with a header line, three decimals for the statistics.
pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{:.3},{:.3},{}",
            r.group, r.method, r.rollout, r.level, r.runs, r.mean_unsat, r.std_unsat, r.min_unsat
        )
        .unwrap();
    }
    out
}

/// Mean best-so-far over `records` at each time of `grid`. A run contributes
/// its last checkpoint at or before `t`, or its first checkpoint when it had
/// none yet. Runs without checkpoints are skipped.
pub fn anytime_series(records: &[RunRecord], grid: &[f64]) -> Vec<(f64, f64)> {
    let runs: Vec<&RunRecord> = records
        .iter()
        .filter(|r| !r.is_error() && !r.checkpoints.is_empty())
        .collect();
    grid.iter()
        .map(|&t| {
            if runs.is_empty() {
                return (t, f64::NAN);
            }
            let sum: f64 = runs
                .iter()
                .map(|r| {
                    let upto = r.checkpoints.partition_point(|c| c.elapsed_s <= t);
                    let c = if upto == 0 { &r.checkpoints[0] } else { &r.checkpoints[upto - 1] };
                    c.best_unsat as f64
                })
                .sum();
            (t, sum / runs.len() as f64)
        })
        .collect()
}
