use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::NerError;
use crate::corpus::{parse_brat_mentions, write_brat, AnnotatedDocument, CorpusError, CorpusManifest, Mention};

/// Reads `<ann_dir>/<doc_id>.ann` for every manifest document and checks it
/// against the document text.
pub fn import_predictions(
    manifest: &CorpusManifest,
    ann_dir: &Path,
) -> Result<BTreeMap<String, Vec<Mention>>, NerError> {
    let missing: Vec<String> = manifest
        .entries
        .iter()
        .filter(|e| !ann_dir.join(format!("{}.ann", e.doc_id)).is_file())
        .map(|e| e.doc_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(NerError::MissingPredictions(missing));
    }
    let mut out = BTreeMap::new();
    for e in &manifest.entries {
        let text = read(&manifest.resolve(&e.txt))?;
        let ann = read(&ann_dir.join(format!("{}.ann", e.doc_id)))?;
        out.insert(e.doc_id.clone(), parse_brat_mentions(&text, &ann, &e.doc_id)?);
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes one `<doc_id>.ann` per document.
pub fn write_predictions(dir: &Path, docs: &[AnnotatedDocument]) -> Result<(), CorpusError> {
    fs::create_dir_all(dir).map_err(|source| CorpusError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    for doc in docs {
        let path = dir.join(format!("{}.ann", doc.doc_id));
        fs::write(&path, write_brat(doc)).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}
