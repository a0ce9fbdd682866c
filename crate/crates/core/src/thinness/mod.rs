//! Run statistics, block decompositions and the thinness classifier.

mod classify;
mod runs;

pub use classify::{
    check_hierarchy, classify, classify_all, classify_prefix, entailments, ClassifierConfig,
    Diagnostic, Evidence, Knowledge, Status, ThinClass, Verdict,
};
pub use runs::{
    greedy_block_decomposition, reciprocal_gap_partial_sums, run_statistic, BlockDecomposition,
};
