//! Verification harness: the classical oracle, the benchmark corpus, coverage
//! sweeps and a random program generator.

mod corpus;
mod coverage;
mod oracle;
mod random;

use thiserror::Error;

use crate::condlang::ParseError;
use crate::partition::PartitionError;
use crate::qsynth::SynthError;

pub use corpus::{
    division_count_report, embedded_corpus, load_corpus, CorpusProgram, DivisionRow, DivisionTable,
};
pub use coverage::{
    coverage, coverage_sweep, partition_with, with_widths, CoverageCurve, CoverageReport, SweepMode,
};
pub use oracle::{
    brute_force_partition, compare_partitions, Comparison, Difference, ORACLE_MAX_WIDTH,
};
pub use random::{random_program, random_programs, GeneratorConfig};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{name}: {source}")]
    Parse { name: String, source: ParseError },
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("input space of {width} bits exceeds the oracle limit of {max}")]
    OracleCeiling { width: u32, max: u32 },
    #[error("branch ids differ: quantum {quantum:?}, classical {classical:?}")]
    BranchMismatch {
        quantum: Vec<String>,
        classical: Vec<String>,
    },
    #[error("corpus manifest: {0}")]
    Manifest(String),
}
