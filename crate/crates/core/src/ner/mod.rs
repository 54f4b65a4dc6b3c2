//! Tool mention recognition: dictionary matching against a knowledge base,
//! or import of predictions produced elsewhere as BRAT files.

mod dictionary;
mod import;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CorpusError;
use crate::kb::NameNormalizer;

pub use dictionary::{dictionary_ner, DictionaryMatcher};
pub use import::{import_predictions, write_predictions};

#[derive(Debug, Error)]
pub enum NerError {
    #[error("no prediction file for: {}", .0.join(", "))]
    MissingPredictions(Vec<String>),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("invalid NER configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Matches may not be flanked by letters or digits.
    #[default]
    TokenBoundary,
    Substring,
}

impl FromStr for BoundaryMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "token_boundary" => Ok(Self::TokenBoundary),
            "substring" => Ok(Self::Substring),
            other => Err(format!(
                "unknown boundary mode `{other}` (expected token_boundary or substring)"
            )),
        }
    }
}

impl fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TokenBoundary => "token_boundary",
            Self::Substring => "substring",
        })
    }
}

/// How overlapping candidates are resolved. Only one policy exists: the
/// longest span wins, ties go to the leftmost start.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapPolicy {
    #[default]
    LongestLeftmost,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NerConfig {
    pub min_match_length: usize,
    /// Normalized names that are never reported.
    pub stoplist: BTreeSet<String>,
    pub boundary_mode: BoundaryMode,
    pub overlap_policy: OverlapPolicy,
}

impl Default for NerConfig {
    fn default() -> Self {
        Self {
            min_match_length: 2,
            stoplist: BTreeSet::new(),
            boundary_mode: BoundaryMode::default(),
            overlap_policy: OverlapPolicy::default(),
        }
    }
}

impl NerConfig {
    pub fn validate(&self) -> Result<(), NerError> {
        if self.min_match_length == 0 {
            return Err(NerError::Config("min_match_length must be at least 1".into()));
        }
        Ok(())
    }

    /// The shipped list of ambiguous short or common-word aliases.
    pub fn bundled_stoplist() -> BTreeSet<String> {
        parse_stoplist(
            include_str!("../../data/short_alias_stoplist.txt"),
            &NameNormalizer::default(),
        )
    }
}

/// One name per line; blank lines and `#` comments are ignored.
pub fn parse_stoplist(content: &str, normalizer: &NameNormalizer) -> BTreeSet<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| normalizer.normalize(l))
        .collect()
}
