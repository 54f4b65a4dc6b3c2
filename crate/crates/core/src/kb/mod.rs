//! Tool registries: canonical snapshot ingestion, alias indexes, and fusion
//! of several registries by transitive grouping of shared names.

mod dsu;
mod fusion;
mod normalize;
mod snapshot;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dsu::DisjointSet;
pub use fusion::{fuse, fuse_entries, FusionGroup};
pub use normalize::{normalize_name, NameNormalizer};
pub use snapshot::{load_kb_snapshot, load_kb_snapshot_with, KbRecord, SnapshotManifest};

/// Source tag reserved for fused knowledge bases.
pub const FUSION_SOURCE: &str = "fusion";

/// Registries the toolkit ships configuration for.
pub const KNOWN_SOURCES: &[&str] = &["bioconda", "biotools", "biocontainers", "bioweb"];

#[derive(Debug, Error)]
pub enum KbError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate entry id `{id}`{}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    DuplicateId { id: String, line: Option<usize> },
    #[error("invalid entry `{id}`: {reason}")]
    InvalidEntry { id: String, reason: String },
    #[error("invalid source tag `{0}` (expected lowercase letters, digits, `-` or `_`)")]
    InvalidSource(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed index file: {0}")]
    Index(#[from] serde_json::Error),
}

/// Checks that a source tag is a non-empty lowercase identifier.
pub fn validate_source_tag(tag: &str) -> Result<(), KbError> {
    let ok = !tag.is_empty()
        && tag
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_');
    if ok {
        Ok(())
    } else {
        Err(KbError::InvalidSource(tag.to_string()))
    }
}

/// One registry entity: a canonical id, its primary name, and every
/// alternative name (binaries, commands) the registry lists for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolEntry {
    pub entry_id: String,
    pub source: String,
    pub primary_name: String,
    pub aliases: Vec<String>,
}

impl ToolEntry {
    /// Builds an entry, dropping aliases that repeat after normalization and
    /// adding the primary name when the alias list does not already carry it.
    pub fn new(
        entry_id: impl Into<String>,
        source: impl Into<String>,
        primary_name: impl Into<String>,
        aliases: impl IntoIterator<Item = impl Into<String>>,
        normalizer: &NameNormalizer,
    ) -> Result<Self, KbError> {
        let entry_id = entry_id.into();
        let primary_name = primary_name.into();
        let invalid = |reason: &str| KbError::InvalidEntry {
            id: entry_id.clone(),
            reason: reason.to_string(),
        };
        if entry_id.trim().is_empty() {
            return Err(invalid("empty id"));
        }
        if primary_name.trim().is_empty() {
            return Err(invalid("empty name"));
        }
        let raw: Vec<String> = aliases.into_iter().map(Into::into).collect();
        if raw.is_empty() {
            return Err(invalid("empty alias list"));
        }
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(raw.len() + 1);
        for alias in raw {
            let norm = normalizer.normalize(&alias);
            if norm.is_empty() {
                return Err(invalid("blank alias"));
            }
            if seen.insert(norm) {
                kept.push(alias);
            }
        }
        if seen.insert(normalizer.normalize(&primary_name)) {
            kept.insert(0, primary_name.clone());
        }
        Ok(Self {
            entry_id,
            source: source.into(),
            primary_name,
            aliases: kept,
        })
    }

    pub fn normalized_aliases(&self, normalizer: &NameNormalizer) -> BTreeSet<String> {
        self.aliases.iter().map(|a| normalizer.normalize(a)).collect()
    }
}

/// An indexed registry, either loaded from one snapshot or fused from several.
///
/// For a plain registry the alias index maps to entry ids; for a fused one it
/// maps to fusion-group ids. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    source: String,
    normalizer: NameNormalizer,
    entries: Vec<ToolEntry>,
    alias_index: BTreeMap<String, BTreeSet<String>>,
    groups: Vec<FusionGroup>,
}

impl KnowledgeBase {
    pub fn empty(source: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            normalizer: NameNormalizer::default(),
            entries: Vec::new(),
            alias_index: BTreeMap::new(),
            groups: Vec::new(),
        }
    }

    /// Indexes entries of a single registry. Entry ids must be unique.
    pub fn from_entries(
        source: impl Into<String>,
        entries: Vec<ToolEntry>,
        normalizer: NameNormalizer,
    ) -> Result<Self, KbError> {
        let mut ids = HashSet::new();
        let mut alias_index: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for entry in &entries {
            if !ids.insert(entry.entry_id.as_str()) {
                return Err(KbError::DuplicateId {
                    id: entry.entry_id.clone(),
                    line: None,
                });
            }
            for alias in entry.normalized_aliases(&normalizer) {
                alias_index
                    .entry(alias)
                    .or_default()
                    .insert(entry.entry_id.clone());
            }
        }
        Ok(Self {
            source: source.into(),
            normalizer,
            entries,
            alias_index,
            groups: Vec::new(),
        })
    }

    pub(crate) fn from_fusion(
        normalizer: NameNormalizer,
        entries: Vec<ToolEntry>,
        groups: Vec<FusionGroup>,
    ) -> Self {
        let mut alias_index: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for group in &groups {
            for alias in &group.alias_union {
                alias_index
                    .entry(alias.clone())
                    .or_default()
                    .insert(group.group_id.clone());
            }
        }
        Self {
            source: FUSION_SOURCE.to_string(),
            normalizer,
            entries,
            alias_index,
            groups,
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn normalizer(&self) -> &NameNormalizer {
        &self.normalizer
    }

    pub fn entries(&self) -> &[ToolEntry] {
        &self.entries
    }

    pub fn groups(&self) -> &[FusionGroup] {
        &self.groups
    }

    pub fn is_fused(&self) -> bool {
        self.source == FUSION_SOURCE
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every normalized alias in the index, in sorted order.
    pub fn aliases(&self) -> impl Iterator<Item = &str> {
        self.alias_index.keys().map(String::as_str)
    }

    pub fn alias_index(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.alias_index
    }

    /// Ids (entry ids, or group ids for a fused KB) carrying `name` as an alias.
    pub fn lookup(&self, name: &str) -> BTreeSet<&str> {
        self.alias_index
            .get(&self.normalizer.normalize(name))
            .map(|ids| ids.iter().map(String::as_str).collect())
            .unwrap_or_default()
    }

    pub fn to_json(&self) -> Result<String, KbError> {
        let file = IndexFile {
            source: self.source.clone(),
            normalizer: self.normalizer,
            entries: self.entries.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)? + "\n")
    }

    /// Reads an index written by [`to_json`](Self::to_json), rebuilding the
    /// alias index (and fusion groups) from the stored entries.
    pub fn from_json(json: &str) -> Result<Self, KbError> {
        let file: IndexFile = serde_json::from_str(json)?;
        if file.source == FUSION_SOURCE {
            Ok(fuse_entries(file.entries, file.normalizer))
        } else {
            validate_source_tag(&file.source)?;
            Self::from_entries(file.source, file.entries, file.normalizer)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    source: String,
    #[serde(default)]
    normalizer: NameNormalizer,
    entries: Vec<ToolEntry>,
}
