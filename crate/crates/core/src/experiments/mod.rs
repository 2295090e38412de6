//! Reproducible experiments: random self-polar generation, enumeration over `{-1, 0, 1}^d`,
//! and exact checks of the comparison sequences.

pub mod enumerate;
pub mod generate;
pub mod report;
pub mod sequences;

pub use enumerate::{enumerate_pm1, maximal_grid_cliques, CliqueClass, EnumerationReport};
pub use generate::{batch_generate, random_selfpolar, summarize, BatchSummary, ExperimentRecord};
pub use sequences::{
    monotonicity_check, sequence_compare, sequence_viterbo_ratio, MonotonicityReport,
    SequenceKind, SequenceValue,
};
