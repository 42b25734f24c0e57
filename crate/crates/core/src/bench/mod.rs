//! Experiment infrastructure: random instances, the exhaustive oracle,
//! timed grid runs with CSV output, and result aggregation.

mod aggregate;
mod experiment;
mod generate;
mod oracle;
mod record;

pub use aggregate::{aggregate, anytime_series, summary_csv, SummaryRow, SUMMARY_HEADER};
pub use experiment::{
    load_suite, run_experiment, run_experiment_to, run_seed, CsvSink, ExperimentSpec, GridFile, Instance,
    RecordSink,
};
pub use generate::{generate_instance, instance_file_name};
pub use oracle::{exact_oracle, MAX_ORACLE_VARIABLES};
pub use record::{RunRecord, CHECKPOINT_HEADER, RESULTS_HEADER};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("clause width {k} exceeds the {n_vars} available variables")]
    InvalidShape { n_vars: usize, k: usize },
    #[error("{num_variables} variables is above the enumeration bound of {max}")]
    TooLarge { num_variables: usize, max: usize },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: crate::formula::ParseError,
    },
    #[error("grid file: {0}")]
    Grid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
