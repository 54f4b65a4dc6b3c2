use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use super::{build_bridges, link_workflows, recognize, MentionSource, NerMode, PipelineError, RunConfig};
use crate::corpus::{
    char_slice, extract_methods_section, extract_processes, load_corpus, CorpusManifest, ManifestEntry,
    Mention, Modality, SectionRules, SkipRecord,
};
use crate::eval::{eval_ner, load_gold_links, EvalReport};
use crate::kb::{fuse, load_kb_snapshot_with, KnowledgeBase, NameNormalizer, SnapshotManifest};
use crate::linker::LinkSet;
use crate::ner::{import_predictions, write_predictions};

fn write(path: &Path, content: &str) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| PipelineError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, content).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_snapshot(path: &Path, source: &str, normalizer: NameNormalizer) -> Result<KnowledgeBase, PipelineError> {
    let file = fs::File::open(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_kb_snapshot_with(std::io::BufReader::new(file), source, normalizer).map_err(|source| {
        PipelineError::Kb {
            path: path.to_path_buf(),
            source,
        }
    })
}

/// Indexes one snapshot and writes `<source>.kb.json` and
/// `<source>.manifest.json` into `out_dir`.
pub fn kb_build(
    snapshot: &Path,
    source: &str,
    retrieval_date: Option<String>,
    normalizer: NameNormalizer,
    out_dir: &Path,
) -> Result<SnapshotManifest, PipelineError> {
    let kb = load_snapshot(snapshot, source, normalizer)?;
    let manifest = SnapshotManifest::describe(&kb, retrieval_date);
    let json = kb.to_json().map_err(|source| PipelineError::Kb {
        path: snapshot.to_path_buf(),
        source,
    })?;
    write(&out_dir.join(format!("{source}.kb.json")), &json)?;
    let manifest_json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    write(&out_dir.join(format!("{source}.manifest.json")), &manifest_json)?;
    Ok(manifest)
}

/// Fuses built indexes into one fused index file.
pub fn kb_fuse(indexes: &[PathBuf], out: &Path) -> Result<KnowledgeBase, PipelineError> {
    let kbs = indexes
        .iter()
        .map(|p| {
            KnowledgeBase::from_json(&read(p)?).map_err(|source| PipelineError::Kb {
                path: p.clone(),
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&KnowledgeBase> = kbs.iter().collect();
    let fused = fuse(&refs);
    let json = fused.to_json().map_err(|source| PipelineError::Kb {
        path: out.to_path_buf(),
        source,
    })?;
    write(out, &json)?;
    Ok(fused)
}

pub const RAW_MANIFEST_HEADER: &str = "workflow_id\tmodality\tpath";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInput {
    pub workflow_id: String,
    pub modality: Modality,
    pub path: PathBuf,
}

#[derive(Debug, Default)]
pub struct ExtractSummary {
    pub documents: usize,
    pub skipped: Vec<SkipRecord>,
    pub failures: Vec<String>,
}

fn parse_raw_manifest(path: &Path) -> Result<Vec<RawInput>, PipelineError> {
    let content = read(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut out = Vec::new();
    let mut header = false;
    for (idx, line) in content.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let problem = |m: String| PipelineError::Validation(vec![format!("{}: line {}: {m}", path.display(), idx + 1)]);
        if !header {
            if line != RAW_MANIFEST_HEADER {
                return Err(problem(format!("expected header `{RAW_MANIFEST_HEADER}`")));
            }
            header = true;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let [wf, modality, rel] = cols[..] else {
            return Err(problem("expected 3 columns".into()));
        };
        out.push(RawInput {
            workflow_id: wf.to_string(),
            modality: modality.parse().map_err(problem)?,
            path: base.join(rel),
        });
    }
    Ok(out)
}

/// Turns raw articles (plain text) and Nextflow files into a corpus: one
/// document per methods section or process, plus a corpus manifest.
/// Failing inputs are reported in the summary; the others are still written.
pub fn extract_corpus(
    raw_manifest: &Path,
    out_dir: &Path,
    rules: &SectionRules,
) -> Result<ExtractSummary, PipelineError> {
    let inputs = parse_raw_manifest(raw_manifest)?;
    let mut manifest = CorpusManifest::default();
    let mut summary = ExtractSummary::default();
    let mut ids = HashSet::new();
    for input in &inputs {
        let stem = input
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let text = match fs::read_to_string(&input.path) {
            Ok(t) => t,
            Err(e) => {
                summary.failures.push(format!("{}: {e}", input.path.display()));
                continue;
            }
        };
        let mut docs: Vec<(String, String)> = Vec::new();
        match input.modality {
            Modality::Article => match extract_methods_section(&text, rules) {
                Some(section) => docs.push((format!("{}__article__{stem}", input.workflow_id), section.text)),
                None => summary.skipped.push(SkipRecord {
                    workflow_id: input.workflow_id.clone(),
                    source: input.path.display().to_string(),
                    reason: "no methods heading".into(),
                }),
            },
            Modality::Code => match extract_processes(&text, &input.path.display().to_string()) {
                Ok(blocks) => {
                    for b in blocks {
                        let mut id = format!("{}__{stem}__{}", input.workflow_id, b.process_name);
                        if ids.contains(&id) {
                            id = format!("{id}__{}", b.decl_start);
                        }
                        docs.push((id.clone(), char_slice(&text, b.decl_start, b.body_end()).to_string()));
                        ids.insert(id);
                    }
                }
                Err(e) => {
                    summary.failures.push(e.to_string());
                    continue;
                }
            },
        }
        for (doc_id, body) in docs {
            if input.modality == Modality::Article && !ids.insert(doc_id.clone()) {
                summary.failures.push(format!("{}: duplicate document id `{doc_id}`", input.path.display()));
                continue;
            }
            let rel = PathBuf::from("docs").join(format!("{doc_id}.txt"));
            write(&out_dir.join(&rel), &body)?;
            manifest.entries.push(ManifestEntry {
                doc_id,
                workflow_id: input.workflow_id.clone(),
                modality: input.modality,
                txt: rel,
                ann: None,
            });
            summary.documents += 1;
        }
    }
    manifest.skipped = summary.skipped.clone();
    write(&out_dir.join("manifest.tsv"), &manifest.to_tsv())?;
    Ok(summary)
}

#[derive(Debug)]
pub struct RunOutput {
    /// The link report first, then recognition reports when gold mentions
    /// are available.
    pub reports: Vec<EvalReport>,
    pub link_sets: Vec<LinkSet>,
}

/// Executes a validated configuration and writes `links/`,
/// `links_extended/`, `report.jsonl` (and `ner/` for dictionary runs) into
/// the output directory.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, PipelineError> {
    let mut kbs = BTreeMap::new();
    for src in &cfg.kb_sources {
        kbs.insert(src.tag.clone(), load_snapshot(&src.snapshot, &src.tag, cfg.normalizer)?);
    }
    let manifest = CorpusManifest::load(&cfg.corpus_manifest)?;
    let docs = load_corpus(&manifest)?;
    let gold = load_gold_links(&cfg.gold_links)?;
    let bridges = build_bridges(&cfg.strategy, &kbs)?;

    let dictionary;
    let imported;
    let source = match cfg.ner_mode {
        NerMode::Gold => MentionSource::Gold,
        NerMode::Import => {
            imported = import_predictions(&manifest, cfg.predictions.as_deref().expect("validated"))?;
            MentionSource::Predictions(&imported)
        }
        NerMode::Dictionary => {
            let parts: Vec<&KnowledgeBase> = cfg.fusion.iter().map(|t| &kbs[t]).collect();
            dictionary = match parts.as_slice() {
                [single] => (*single).clone(),
                many => fuse(many),
            };
            MentionSource::Dictionary(&dictionary, &cfg.ner)
        }
    };
    let recognized = recognize(&docs, &source);
    let link_sets = link_workflows(&recognized, &cfg.strategy, &bridges, &cfg.normalizer)?;
    let link_report = crate::eval::eval_links(&link_sets, &gold, &cfg.normalizer, cfg.averaging)?
        .labeled(cfg.strategy.to_string(), cfg.corpus_name.clone());

    let mut reports = vec![link_report];
    if cfg.ner_mode != NerMode::Gold {
        let annotated: HashSet<&str> = manifest
            .entries
            .iter()
            .filter(|e| e.ann.is_some())
            .map(|e| e.doc_id.as_str())
            .collect();
        for modality in [Modality::Article, Modality::Code] {
            let by_doc = |set: &[crate::corpus::AnnotatedDocument]| -> BTreeMap<String, Vec<Mention>> {
                set.iter()
                    .filter(|d| d.modality == modality && annotated.contains(d.doc_id.as_str()))
                    .map(|d| (d.doc_id.clone(), d.mentions.clone()))
                    .collect()
            };
            let gold_mentions = by_doc(&docs);
            if gold_mentions.is_empty() {
                continue;
            }
            let mode = match cfg.ner_mode {
                NerMode::Dictionary => format!("ner:dictionary({})", cfg.fusion.join(",")),
                _ => "ner:import".to_string(),
            };
            reports.push(
                eval_ner(&by_doc(&recognized), &gold_mentions)?
                    .labeled(mode, format!("{}:{modality}", cfg.corpus_name)),
            );
        }
    }

    let out = &cfg.output_dir;
    for set in &link_sets {
        write(&out.join("links").join(format!("{}.tsv", set.workflow_id)), &set.to_tsv(false))?;
        write(
            &out.join("links_extended").join(format!("{}.tsv", set.workflow_id)),
            &set.to_tsv(true),
        )?;
    }
    if cfg.ner_mode == NerMode::Dictionary {
        write_predictions(&out.join("ner"), &recognized)?;
    }
    let jsonl: String = reports.iter().map(|r| r.to_json_line() + "\n").collect();
    write(&out.join("report.jsonl"), &jsonl)?;
    Ok(RunOutput { reports, link_sets })
}
