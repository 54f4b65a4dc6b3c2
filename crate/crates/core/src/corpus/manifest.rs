//! Corpus manifest: a tab-separated table mapping each document to its
//! workflow, modality, text file and (optional) annotation file. Paths are
//! relative to the manifest's directory. Lines starting with `#skip` record
//! inputs the extractor passed over; other `#` lines are comments.

use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use super::{parse_brat, AnnotatedDocument, CorpusError, Modality};

pub const MANIFEST_HEADER: &str = "doc_id\tworkflow_id\tmodality\ttxt\tann";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub doc_id: String,
    pub workflow_id: String,
    pub modality: Modality,
    pub txt: PathBuf,
    pub ann: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkipRecord {
    pub workflow_id: String,
    pub source: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusManifest {
    /// Directory relative paths resolve against.
    pub base_dir: PathBuf,
    pub entries: Vec<ManifestEntry>,
    pub skipped: Vec<SkipRecord>,
}

impl CorpusManifest {
    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let content = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        Self::parse(&content, base, &path.display().to_string())
    }

    pub fn parse(content: &str, base_dir: PathBuf, origin: &str) -> Result<Self, CorpusError> {
        let err = |line: usize, message: String| CorpusError::Manifest {
            path: origin.to_string(),
            message: format!("line {line}: {message}"),
        };
        let mut manifest = CorpusManifest {
            base_dir,
            ..Default::default()
        };
        let mut header_seen = false;
        let mut ids = std::collections::HashSet::new();
        for (idx, raw) in content.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("#skip\t") {
                let mut f = rest.splitn(3, '\t');
                manifest.skipped.push(SkipRecord {
                    workflow_id: f.next().unwrap_or_default().to_string(),
                    source: f.next().unwrap_or_default().to_string(),
                    reason: f.next().unwrap_or_default().to_string(),
                });
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            if !header_seen {
                if line != MANIFEST_HEADER {
                    return Err(err(line_no, format!("expected header `{MANIFEST_HEADER}`")));
                }
                header_seen = true;
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if !(4..=5).contains(&fields.len()) {
                return Err(err(line_no, format!("expected 4 or 5 columns, found {}", fields.len())));
            }
            let modality: Modality = fields[2].parse().map_err(|e| err(line_no, e))?;
            let doc_id = fields[0].to_string();
            if doc_id.is_empty() || fields[1].is_empty() || fields[3].is_empty() {
                return Err(err(line_no, "empty doc_id, workflow_id or txt path".into()));
            }
            if !ids.insert(doc_id.clone()) {
                return Err(err(line_no, format!("duplicate doc_id `{doc_id}`")));
            }
            let ann = fields
                .get(4)
                .filter(|a| !a.is_empty() && **a != "-")
                .map(PathBuf::from);
            manifest.entries.push(ManifestEntry {
                doc_id,
                workflow_id: fields[1].to_string(),
                modality,
                txt: PathBuf::from(fields[3]),
                ann,
            });
        }
        Ok(manifest)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from(MANIFEST_HEADER);
        out.push('\n');
        for e in &self.entries {
            let ann = e
                .ann
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                e.doc_id,
                e.workflow_id,
                e.modality,
                e.txt.display(),
                ann
            );
        }
        for s in &self.skipped {
            let _ = writeln!(out, "#skip\t{}\t{}\t{}", s.workflow_id, s.source, s.reason);
        }
        out
    }

    pub fn resolve(&self, rel: &Path) -> PathBuf {
        self.base_dir.join(rel)
    }

    pub fn workflows(&self) -> std::collections::BTreeSet<&str> {
        self.entries.iter().map(|e| e.workflow_id.as_str()).collect()
    }
}

pub(crate) fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads every listed document with its gold annotations (when the manifest
/// names an `.ann` file).
pub fn load_corpus(manifest: &CorpusManifest) -> Result<Vec<AnnotatedDocument>, CorpusError> {
    manifest
        .entries
        .iter()
        .map(|e| {
            let text = read(&manifest.resolve(&e.txt))?;
            let ann = match &e.ann {
                Some(p) => read(&manifest.resolve(p))?,
                None => String::new(),
            };
            parse_brat(&text, &ann, &e.doc_id, &e.workflow_id, e.modality)
        })
        .collect()
}
