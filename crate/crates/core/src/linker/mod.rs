//! Cross-modal linking of an article's tool names to its code's tool names.

mod levenshtein;
mod linkset;
mod spec;
mod strategies;

use thiserror::Error;

pub use levenshtein::levenshtein;
pub use linkset::{
    LinkRecord, LinkSet, Pair, ABSENT, TSV_HEADER, TSV_HEADER_EXTENDED, UNLINKED_TAG,
};
pub use spec::StrategySpec;

pub const DEFAULT_MIN_AFFIX_OVERLAP: usize = 3;
pub use strategies::{
    affix_match, combine, complete_unlinked, link_exact, link_kb_bridge, link_levenshtein,
    link_prefix_suffix,
};

#[derive(Debug, Error)]
pub enum LinkError {
    #[error("cannot combine link sets of different workflows: expected `{expected}`, found {found:?}")]
    WorkflowMismatch { expected: String, found: Vec<String> },
    #[error("nothing to combine")]
    EmptyCombine,
    #[error("{workflow_id}: line {line}: {message}")]
    Tsv {
        workflow_id: String,
        line: usize,
        message: String,
    },
    #[error("strategy `{spec}` at byte {pos}: {message}")]
    Spec {
        spec: String,
        pos: usize,
        message: String,
    },
    #[error("no knowledge base loaded for kb_bridge({0})")]
    MissingKb(String),
}

/// Default thresholds for the string strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkConfig {
    pub levenshtein_threshold: usize,
    pub min_affix_overlap: usize,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            levenshtein_threshold: 1,
            min_affix_overlap: DEFAULT_MIN_AFFIX_OVERLAP,
        }
    }
}
