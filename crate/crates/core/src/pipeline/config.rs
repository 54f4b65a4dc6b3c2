//! Declarative run configuration (TOML). Paths are relative to the
//! directory holding the configuration file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::PipelineError;
use crate::eval::Averaging;
use crate::kb::{validate_source_tag, NameNormalizer};
use crate::linker::{LinkConfig, StrategySpec, DEFAULT_MIN_AFFIX_OVERLAP};
use crate::ner::{BoundaryMode, NerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NerMode {
    Dictionary,
    Import,
    Gold,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KbSourceConfig {
    pub tag: String,
    pub snapshot: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    kb: RawKb,
    ner: RawNer,
    link: RawLink,
    corpus: RawCorpus,
    gold: RawGold,
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKb {
    #[serde(default)]
    sources: Vec<KbSourceConfig>,
    fusion: Option<Vec<String>>,
    #[serde(default)]
    unify_separators: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNer {
    mode: NerMode,
    min_match_length: Option<i64>,
    boundary_mode: Option<String>,
    stoplist: Option<String>,
    predictions: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    strategy: String,
    levenshtein_threshold: Option<i64>,
    min_affix_overlap: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorpus {
    manifest: PathBuf,
    name: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGold {
    links: PathBuf,
    averaging: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: PathBuf,
}

/// A validated run configuration with absolute paths.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kb_sources: Vec<KbSourceConfig>,
    /// Sources fused into the recognition dictionary.
    pub fusion: Vec<String>,
    pub normalizer: NameNormalizer,
    pub ner_mode: NerMode,
    pub ner: NerConfig,
    pub predictions: Option<PathBuf>,
    pub strategy: StrategySpec,
    pub corpus_manifest: PathBuf,
    pub corpus_name: String,
    pub gold_links: PathBuf,
    pub averaging: Averaging,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Validation(vec![format!("{}: {e}", path.display())]))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new("")))
    }

    /// Parses and validates. Every problem found is reported together,
    /// before anything is read or written.
    pub fn parse(text: &str, base: &Path) -> Result<Self, PipelineError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| PipelineError::Validation(vec![e.to_string()]))?;
        let mut problems = Vec::new();
        let resolve = |p: &Path| base.join(p);

        let mut tags = BTreeSet::new();
        let mut kb_sources = Vec::new();
        for src in &raw.kb.sources {
            if let Err(e) = validate_source_tag(&src.tag) {
                problems.push(format!("kb.sources: {e}"));
            }
            if !tags.insert(src.tag.clone()) {
                problems.push(format!("kb.sources: source `{}` listed twice", src.tag));
            }
            let snapshot = resolve(&src.snapshot);
            if !snapshot.is_file() {
                problems.push(format!("kb.sources: snapshot {} does not exist", snapshot.display()));
            }
            kb_sources.push(KbSourceConfig {
                tag: src.tag.clone(),
                snapshot,
            });
        }
        let fusion = raw.kb.fusion.clone().unwrap_or_else(|| tags.iter().cloned().collect());
        for tag in &fusion {
            if !tags.contains(tag) {
                problems.push(format!("kb.fusion: source `{tag}` is not loaded"));
            }
        }

        let mut ner = NerConfig::default();
        if let Some(n) = raw.ner.min_match_length {
            if n < 1 {
                problems.push(format!("ner.min_match_length must be at least 1, got {n}"));
            } else {
                ner.min_match_length = n as usize;
            }
        }
        if let Some(mode) = &raw.ner.boundary_mode {
            match mode.parse::<BoundaryMode>() {
                Ok(m) => ner.boundary_mode = m,
                Err(e) => problems.push(format!("ner.boundary_mode: {e}")),
            }
        }
        let normalizer = NameNormalizer::new(raw.kb.unify_separators);
        match raw.ner.stoplist.as_deref() {
            None => {}
            Some("bundled") => ner.stoplist = NerConfig::bundled_stoplist(),
            Some(p) => match std::fs::read_to_string(resolve(Path::new(p))) {
                Ok(content) => ner.stoplist = crate::ner::parse_stoplist(&content, &normalizer),
                Err(e) => problems.push(format!("ner.stoplist: {}: {e}", resolve(Path::new(p)).display())),
            },
        }
        let predictions = raw.ner.predictions.as_deref().map(resolve);
        match raw.ner.mode {
            NerMode::Import => match &predictions {
                None => problems.push("ner.predictions is required when ner.mode = \"import\"".into()),
                Some(p) if !p.is_dir() => {
                    problems.push(format!("ner.predictions: {} is not a directory", p.display()))
                }
                _ => {}
            },
            NerMode::Dictionary if fusion.is_empty() => {
                problems.push("ner.mode = \"dictionary\" needs at least one kb source".into())
            }
            _ => {}
        }

        let mut link_cfg = LinkConfig::default();
        if let Some(n) = raw.link.levenshtein_threshold {
            if n < 0 {
                problems.push(format!("link.levenshtein_threshold must be non-negative, got {n}"));
            } else {
                link_cfg.levenshtein_threshold = n as usize;
            }
        }
        match raw.link.min_affix_overlap {
            Some(n) if n < 1 => problems.push(format!("link.min_affix_overlap must be at least 1, got {n}")),
            Some(n) => link_cfg.min_affix_overlap = n as usize,
            None => link_cfg.min_affix_overlap = DEFAULT_MIN_AFFIX_OVERLAP,
        }
        let strategy = match StrategySpec::parse_with(&raw.link.strategy, &link_cfg) {
            Ok(s) => {
                for sources in s.kb_requirements() {
                    for tag in sources.iter().filter(|t| !tags.contains(*t)) {
                        problems.push(format!("link.strategy: kb_bridge source `{tag}` is not loaded"));
                    }
                }
                Some(s)
            }
            Err(e) => {
                problems.push(format!("link.strategy: {e}"));
                None
            }
        };

        let corpus_manifest = resolve(&raw.corpus.manifest);
        if !corpus_manifest.is_file() {
            problems.push(format!("corpus.manifest: {} does not exist", corpus_manifest.display()));
        }
        let gold_links = resolve(&raw.gold.links);
        if !gold_links.is_dir() {
            problems.push(format!("gold.links: {} is not a directory", gold_links.display()));
        }
        let averaging = match raw.gold.averaging.as_deref().map(str::parse::<Averaging>) {
            None => Averaging::Micro,
            Some(Ok(a)) => a,
            Some(Err(e)) => {
                problems.push(format!("gold.averaging: {e}"));
                Averaging::Micro
            }
        };

        if !problems.is_empty() {
            return Err(PipelineError::Validation(problems));
        }
        Ok(Self {
            kb_sources,
            fusion,
            normalizer,
            ner_mode: raw.ner.mode,
            ner,
            predictions,
            strategy: strategy.expect("validated"),
            corpus_name: raw.corpus.name.unwrap_or_else(|| "corpus".into()),
            corpus_manifest,
            gold_links,
            averaging,
            output_dir: resolve(&raw.output.dir),
        })
    }
}
