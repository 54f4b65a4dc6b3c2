//! Annotated documents: BRAT standoff I/O, article section extraction,
//! Nextflow process extraction, and corpus manifests.

mod brat;
mod manifest;
mod methods;
mod nextflow;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::NameNormalizer;

pub use brat::{parse_brat, parse_brat_mentions, write_brat};
pub use manifest::{load_corpus, CorpusManifest, ManifestEntry, SkipRecord, MANIFEST_HEADER};
pub use methods::{extract_methods_section, MethodsSection, SectionRules};
pub use nextflow::{extract_processes, ProcessBlock};

/// Label carried by tool mentions.
pub const TOOL_LABEL: &str = "Tool";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{doc}: line {line}: {message}")]
    Parse {
        doc: String,
        line: usize,
        message: String,
    },
    #[error("{doc}: annotation {id}: span {start}..{end} is outside the text (length {len})")]
    OutOfRange {
        doc: String,
        id: String,
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("{doc}: annotation {id}: surface {expected:?} does not match text {found:?}")]
    Integrity {
        doc: String,
        id: String,
        expected: String,
        found: String,
    },
    #[error("{doc}: annotation {id}: discontinuous spans are not supported")]
    Discontinuous { doc: String, id: String },
    #[error("{path}: process `{name}` is never closed")]
    UnclosedProcess { path: String, name: String },
    #[error("{path}: {message}")]
    Manifest { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Article,
    Code,
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modality::Article => "article",
            Modality::Code => "code",
        })
    }
}

impl FromStr for Modality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "article" => Ok(Modality::Article),
            "code" => Ok(Modality::Code),
            other => Err(format!("unknown modality `{other}` (expected article or code)")),
        }
    }
}

/// A labelled span `[start, end)` in Unicode scalar values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Mention {
    pub mention_id: String,
    pub label: String,
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub doc_id: String,
}

impl Mention {
    /// Identity used for scoring and round-trip comparison (ids excluded).
    pub fn span_key(&self) -> (&str, usize, usize, &str) {
        (&self.doc_id, self.start, self.end, &self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedDocument {
    pub doc_id: String,
    pub modality: Modality,
    pub workflow_id: String,
    pub text: String,
    pub mentions: Vec<Mention>,
}

impl AnnotatedDocument {
    pub fn new(
        doc_id: impl Into<String>,
        workflow_id: impl Into<String>,
        modality: Modality,
        text: impl Into<String>,
    ) -> Self {
        Self {
            doc_id: doc_id.into(),
            modality,
            workflow_id: workflow_id.into(),
            text: text.into(),
            mentions: Vec::new(),
        }
    }

    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

/// Substring by char offsets. Callers guarantee `start <= end <= len`.
pub(crate) fn char_slice(text: &str, start: usize, end: usize) -> &str {
    let mut indices = text.char_indices().map(|(i, _)| i).chain(std::iter::once(text.len()));
    let from = indices.nth(start).unwrap_or(text.len());
    let to = if end == start {
        from
    } else {
        indices.nth(end - start - 1).unwrap_or(text.len())
    };
    &text[from..to]
}

/// Distinct normalized surfaces of the given modality's mentions.
pub fn unique_tool_names(
    docs: &[AnnotatedDocument],
    modality: Modality,
    normalizer: &NameNormalizer,
) -> BTreeSet<String> {
    docs.iter()
        .filter(|d| d.modality == modality)
        .flat_map(|d| d.mentions.iter())
        .map(|m| normalizer.normalize(&m.surface))
        .filter(|n| !n.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(modality: Modality, surfaces: &[&str]) -> AnnotatedDocument {
        let text = surfaces.join(" ");
        let mut d = AnnotatedDocument::new("d", "wf", modality, text);
        let mut pos = 0;
        for (i, s) in surfaces.iter().enumerate() {
            let len = s.chars().count();
            d.mentions.push(Mention {
                mention_id: format!("T{}", i + 1),
                label: TOOL_LABEL.into(),
                start: pos,
                end: pos + len,
                surface: s.to_string(),
                doc_id: "d".into(),
            });
            pos += len + 1;
        }
        d
    }

    #[test]
    fn casing_variants_collapse() {
        let docs = [doc(Modality::Article, &["Barrnap", "barrnap"])];
        let names = unique_tool_names(&docs, Modality::Article, &NameNormalizer::default());
        assert_eq!(names, BTreeSet::from(["barrnap".to_string()]));
    }

    #[test]
    fn distinct_surfaces_stay_distinct() {
        let docs = [
            doc(Modality::Article, &["CM", "CircularMapper"]),
            doc(Modality::Code, &["bgzip"]),
        ];
        let names = unique_tool_names(&docs, Modality::Article, &NameNormalizer::default());
        assert_eq!(
            names,
            BTreeSet::from(["cm".to_string(), "circularmapper".to_string()])
        );
        let code = unique_tool_names(&docs, Modality::Code, &NameNormalizer::default());
        assert_eq!(code, BTreeSet::from(["bgzip".to_string()]));
    }

    #[test]
    fn no_mentions() {
        let docs = [doc(Modality::Article, &[])];
        assert!(unique_tool_names(&docs, Modality::Article, &Default::default()).is_empty());
    }

    #[test]
    fn char_slice_uses_scalar_offsets() {
        let s = "héllo wörld";
        assert_eq!(char_slice(s, 0, 5), "héllo");
        assert_eq!(char_slice(s, 6, 11), "wörld");
        assert_eq!(char_slice(s, 3, 3), "");
    }

    #[test]
    fn modality_parses() {
        assert_eq!("Article".parse::<Modality>().unwrap(), Modality::Article);
        assert!("pdf".parse::<Modality>().is_err());
    }
}
