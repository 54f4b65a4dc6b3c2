//! Precision/recall/F1 scoring of recognized mentions and of link sets.

mod links;
mod ner;
mod report;

use thiserror::Error;

pub use links::{eval_links, load_gold_links, normalized_pairs, GoldLinkSet};
pub use ner::eval_ner;
pub use report::{format_table, Averaging, Counts, EvalReport, UnitScore};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("predictions reference documents absent from the gold standard: {}", .0.join(", "))]
    UnknownDocs(Vec<String>),
    #[error("mention {mention} is filed under document `{key}` but belongs to `{doc}`")]
    MisfiledMention {
        key: String,
        doc: String,
        mention: String,
    },
    #[error("predictions reference workflows absent from the gold standard: {}", .0.join(", "))]
    UnknownWorkflows(Vec<String>),
    #[error("workflow `{0}` appears more than once")]
    DuplicateWorkflow(String),
    #[error(transparent)]
    Gold(#[from] crate::linker::LinkError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
