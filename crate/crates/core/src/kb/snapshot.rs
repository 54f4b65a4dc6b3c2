//! Line-delimited canonical snapshot format: one JSON object per line with
//! `id`, `name`, `aliases` and (optionally) `source`.

use std::collections::HashSet;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::{validate_source_tag, KbError, KnowledgeBase, NameNormalizer, ToolEntry};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KbRecord {
    pub id: Option<String>,
    pub name: Option<String>,
    pub aliases: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// Provenance written next to a built index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotManifest {
    pub source: String,
    pub retrieval_date: Option<String>,
    pub record_count: usize,
    pub alias_count: usize,
}

impl SnapshotManifest {
    pub fn describe(kb: &KnowledgeBase, retrieval_date: Option<String>) -> Self {
        Self {
            source: kb.source().to_string(),
            retrieval_date,
            record_count: kb.len(),
            alias_count: kb.alias_index().len(),
        }
    }
}

pub fn load_kb_snapshot<R: BufRead>(reader: R, source: &str) -> Result<KnowledgeBase, KbError> {
    load_kb_snapshot_with(reader, source, NameNormalizer::default())
}

/// Parses a snapshot stream. Blank lines are skipped; line numbers in errors
/// are 1-based.
pub fn load_kb_snapshot_with<R: BufRead>(
    reader: R,
    source: &str,
    normalizer: NameNormalizer,
) -> Result<KnowledgeBase, KbError> {
    validate_source_tag(source)?;
    let mut entries = Vec::new();
    let mut ids = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| KbError::Parse {
            line: line_no,
            message,
        };
        let record: KbRecord =
            serde_json::from_str(&line).map_err(|e| parse_err(format!("invalid record: {e}")))?;
        let id = record
            .id
            .filter(|s| !s.trim().is_empty())
            .ok_or_else(|| parse_err("missing `id`".into()))?;
        let name = record
            .name
            .filter(|s| !s.trim().is_empty())
            .ok_or_else(|| parse_err(format!("record `{id}` is missing `name`")))?;
        let aliases = record
            .aliases
            .filter(|a| !a.is_empty())
            .ok_or_else(|| parse_err(format!("record `{id}` has an empty alias list")))?;
        if let Some(rec_source) = &record.source {
            if rec_source != source {
                return Err(parse_err(format!(
                    "record `{id}` is tagged `{rec_source}` but the snapshot is `{source}`"
                )));
            }
        }
        if !ids.insert(id.clone()) {
            return Err(KbError::DuplicateId {
                id,
                line: Some(line_no),
            });
        }
        let entry = ToolEntry::new(id, source, name, aliases, &normalizer).map_err(|e| match e {
            KbError::InvalidEntry { id, reason } => parse_err(format!("record `{id}`: {reason}")),
            other => other,
        })?;
        entries.push(entry);
    }
    KnowledgeBase::from_entries(source, entries, normalizer)
}
