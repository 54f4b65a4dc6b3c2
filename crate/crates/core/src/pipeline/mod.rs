//! End-to-end orchestration: registry loading, corpus extraction,
//! recognition, linking and scoring.

mod commands;
mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use thiserror::Error;

use crate::corpus::{unique_tool_names, AnnotatedDocument, CorpusError, Mention, Modality};
use crate::eval::{eval_links, Averaging, EvalError, EvalReport, GoldLinkSet};
use crate::kb::{KbError, KnowledgeBase, NameNormalizer};
use crate::linker::{complete_unlinked, LinkError, LinkSet, StrategySpec};
use crate::ner::{DictionaryMatcher, NerConfig, NerError};

pub use commands::{
    extract_corpus, kb_build, kb_fuse, run, ExtractSummary, RawInput, RunOutput, RAW_MANIFEST_HEADER,
};
pub use config::{KbSourceConfig, NerMode, RunConfig};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("{path}: {source}")]
    Kb {
        path: PathBuf,
        #[source]
        source: KbError,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Ner(#[from] NerError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{count} input(s) failed")]
    Partial { count: usize },
}

impl PipelineError {
    /// 1 for configuration problems, 2 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 1,
            _ => 2,
        }
    }
}

/// Where mentions come from.
pub enum MentionSource<'a> {
    Dictionary(&'a KnowledgeBase, &'a NerConfig),
    Predictions(&'a BTreeMap<String, Vec<Mention>>),
    /// The documents' own (gold) annotations.
    Gold,
}

/// Replaces each document's mentions according to `source`.
pub fn recognize(docs: &[AnnotatedDocument], source: &MentionSource<'_>) -> Vec<AnnotatedDocument> {
    let matcher = match source {
        MentionSource::Dictionary(kb, cfg) => Some(DictionaryMatcher::new(kb, cfg)),
        _ => None,
    };
    docs.iter()
        .map(|d| {
            let mut out = d.clone();
            out.mentions = match source {
                MentionSource::Dictionary(..) => {
                    matcher.as_ref().expect("matcher").find(&d.text, &d.doc_id)
                }
                MentionSource::Predictions(map) => map.get(&d.doc_id).cloned().unwrap_or_default(),
                MentionSource::Gold => d.mentions.clone(),
            };
            out
        })
        .collect()
}

/// Links every workflow present in `docs` and completes unlinked records.
/// Output is sorted by workflow id; records within a set are sorted.
pub fn link_workflows(
    docs: &[AnnotatedDocument],
    strategy: &StrategySpec,
    bridges: &BTreeMap<Vec<String>, KnowledgeBase>,
    normalizer: &NameNormalizer,
) -> Result<Vec<LinkSet>, LinkError> {
    let workflows: BTreeSet<&str> = docs.iter().map(|d| d.workflow_id.as_str()).collect();
    workflows
        .into_iter()
        .map(|wf| {
            let wf_docs: Vec<AnnotatedDocument> =
                docs.iter().filter(|d| d.workflow_id == wf).cloned().collect();
            let article = unique_tool_names(&wf_docs, Modality::Article, normalizer);
            let code = unique_tool_names(&wf_docs, Modality::Code, normalizer);
            let links = strategy.apply(wf, &article, &code, bridges)?;
            Ok(complete_unlinked(&links.sorted(), &article, &code))
        })
        .collect()
}

/// Recognition, linking and link scoring in one pass. The report's F1 is
/// the headline pipeline score.
pub fn eval_pipeline(
    docs: &[AnnotatedDocument],
    mentions: &MentionSource<'_>,
    strategy: &StrategySpec,
    bridges: &BTreeMap<Vec<String>, KnowledgeBase>,
    gold: &[GoldLinkSet],
    normalizer: &NameNormalizer,
    averaging: Averaging,
) -> Result<(Vec<LinkSet>, EvalReport), PipelineError> {
    let recognized = recognize(docs, mentions);
    let links = link_workflows(&recognized, strategy, bridges, normalizer)?;
    let report = eval_links(&links, gold, normalizer, averaging)?.labeled(strategy.to_string(), "");
    Ok((links, report))
}

/// Pivot KBs for every `kb_bridge` in `strategy`: the KB itself for one
/// source, the fusion of the listed KBs otherwise.
pub fn build_bridges(
    strategy: &StrategySpec,
    kbs: &BTreeMap<String, KnowledgeBase>,
) -> Result<BTreeMap<Vec<String>, KnowledgeBase>, LinkError> {
    strategy
        .kb_requirements()
        .into_iter()
        .map(|sources| {
            let parts = sources
                .iter()
                .map(|s| kbs.get(s).ok_or_else(|| LinkError::MissingKb(s.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            let kb = match parts.as_slice() {
                [single] => (*single).clone(),
                many => crate::kb::fuse(many),
            };
            Ok((sources, kb))
        })
        .collect()
}
