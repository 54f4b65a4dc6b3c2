//! `toollink` command-line interface.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use toollink::corpus::{load_corpus, CorpusManifest, Mention, SectionRules};
use toollink::eval::{eval_links, eval_ner, format_table, load_gold_links, Averaging, EvalReport};
use toollink::kb::{fuse, KnowledgeBase, NameNormalizer};
use toollink::ner::{import_predictions, parse_stoplist, write_predictions, BoundaryMode, NerConfig};
use toollink::linker::{LinkConfig, StrategySpec};
use toollink::pipeline::{
    build_bridges, extract_corpus, kb_build, kb_fuse, link_workflows, recognize, run, MentionSource,
    PipelineError, RunConfig,
};

#[derive(Parser)]
#[command(name = "toollink", version, about = "Link tool mentions between workflow articles and workflow code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or fuse knowledge-base indexes.
    #[command(subcommand)]
    Kb(KbCommand),
    /// Extract methods sections and Nextflow processes into a corpus.
    Extract {
        /// Table of `workflow_id, modality, path` rows.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Extra start-heading patterns (regular expressions, case-insensitive).
        #[arg(long = "heading")]
        headings: Vec<String>,
    },
    /// Dictionary recognition over a corpus; writes one `.ann` per document.
    Ner {
        #[arg(long)]
        manifest: PathBuf,
        /// Snapshot to match against, as `tag=path`; several are fused.
        #[arg(long = "kb", required = true)]
        kbs: Vec<String>,
        #[command(flatten)]
        ner: NerArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Link the tools of each workflow and write one TSV per workflow.
    Link {
        #[arg(long)]
        manifest: PathBuf,
        /// Strategy expression, e.g. `combine(kb_bridge(bioconda,bioweb),levenshtein(1))`.
        #[arg(long)]
        strategy: String,
        /// Snapshots used by `kb_bridge`, as `tag=path`.
        #[arg(long = "kb")]
        kbs: Vec<String>,
        /// Directory of `<doc_id>.ann` predictions; gold annotations otherwise.
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Also write the strategy column.
        #[arg(long)]
        extended: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predictions against gold data.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Run a full configuration: recognition, linking, scoring.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum KbCommand {
    Build {
        #[arg(long)]
        source: String,
        #[arg(long)]
        snapshot: PathBuf,
        /// Retrieval date recorded in the manifest.
        #[arg(long)]
        retrieved: Option<String>,
        #[arg(long)]
        unify_separators: bool,
        #[arg(long)]
        out: PathBuf,
    },
    Fuse {
        #[arg(long = "index", required = true)]
        indexes: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Strict span scoring of `.ann` predictions against the corpus annotations.
    Ner {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Record-level scoring of link TSVs against gold TSVs.
    Links {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, default_value = "micro")]
        averaging: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args)]
struct NerArgs {
    #[arg(long, default_value_t = 2)]
    min_match_length: usize,
    #[arg(long, default_value = "token_boundary")]
    boundary_mode: String,
    /// Stoplist file, or `bundled` for the shipped list.
    #[arg(long)]
    stoplist: Option<String>,
}

impl NerArgs {
    fn config(&self) -> Result<NerConfig, PipelineError> {
        let mut problems = Vec::new();
        let boundary_mode = self.boundary_mode.parse::<BoundaryMode>().unwrap_or_else(|e| {
            problems.push(e);
            BoundaryMode::default()
        });
        if self.min_match_length == 0 {
            problems.push("--min-match-length must be at least 1".into());
        }
        let stoplist = match self.stoplist.as_deref() {
            None => Default::default(),
            Some("bundled") => NerConfig::bundled_stoplist(),
            Some(p) => match fs::read_to_string(p) {
                Ok(c) => parse_stoplist(&c, &NameNormalizer::default()),
                Err(e) => {
                    problems.push(format!("--stoplist {p}: {e}"));
                    Default::default()
                }
            },
        };
        if !problems.is_empty() {
            return Err(PipelineError::Validation(problems));
        }
        Ok(NerConfig {
            min_match_length: self.min_match_length,
            stoplist,
            boundary_mode,
            ..NerConfig::default()
        })
    }
}

fn parse_kb_args(args: &[String]) -> Result<BTreeMap<String, KnowledgeBase>, PipelineError> {
    let mut pairs = Vec::new();
    let mut problems = Vec::new();
    for arg in args {
        match arg.split_once('=') {
            Some((tag, path)) => pairs.push((tag.to_string(), PathBuf::from(path))),
            None => problems.push(format!("--kb expects tag=path, got `{arg}`")),
        }
    }
    if !problems.is_empty() {
        return Err(PipelineError::Validation(problems));
    }
    let mut kbs = BTreeMap::new();
    for (tag, path) in pairs {
        let file = fs::File::open(&path).map_err(|source| PipelineError::Io {
            path: path.clone(),
            source,
        })?;
        let kb = toollink::kb::load_kb_snapshot(std::io::BufReader::new(file), &tag)
            .map_err(|source| PipelineError::Kb { path, source })?;
        kbs.insert(tag, kb);
    }
    Ok(kbs)
}

fn write_reports(reports: &[EvalReport], path: Option<&Path>) -> Result<(), PipelineError> {
    print!("{}", format_table(reports));
    if let Some(path) = path {
        let jsonl: String = reports.iter().map(|r| r.to_json_line() + "\n").collect();
        fs::write(path, jsonl).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Kb(KbCommand::Build {
            source,
            snapshot,
            retrieved,
            unify_separators,
            out,
        }) => {
            let m = kb_build(&snapshot, &source, retrieved, NameNormalizer::new(unify_separators), &out)?;
            eprintln!("indexed {} entries ({} aliases) from {}", m.record_count, m.alias_count, snapshot.display());
        }
        Command::Kb(KbCommand::Fuse { indexes, out }) => {
            let fused = kb_fuse(&indexes, &out)?;
            eprintln!("fused {} entries into {} groups", fused.len(), fused.groups().len());
        }
        Command::Extract { manifest, out, headings } => {
            let mut rules = SectionRules::default();
            if !headings.is_empty() {
                let extra = SectionRules::with_start_patterns(&headings)
                    .map_err(|e| PipelineError::Validation(vec![format!("--heading: {e}")]))?;
                rules.start.extend(extra.start);
            }
            let summary = extract_corpus(&manifest, &out, &rules)?;
            for skip in &summary.skipped {
                eprintln!("warning: skipped {} ({})", skip.source, skip.reason);
            }
            for failure in &summary.failures {
                eprintln!("error: {failure}");
            }
            eprintln!("wrote {} documents to {}", summary.documents, out.display());
            if !summary.failures.is_empty() {
                return Err(PipelineError::Partial {
                    count: summary.failures.len(),
                });
            }
        }
        Command::Ner { manifest, kbs, ner, out } => {
            let cfg = ner.config()?;
            let kbs = parse_kb_args(&kbs)?;
            let manifest = CorpusManifest::load(&manifest)?;
            let docs = load_corpus(&manifest)?;
            let refs: Vec<&KnowledgeBase> = kbs.values().collect();
            let dictionary = match refs.as_slice() {
                [single] => (*single).clone(),
                many => fuse(many),
            };
            let recognized = recognize(&docs, &MentionSource::Dictionary(&dictionary, &cfg));
            write_predictions(&out, &recognized)?;
            let total: usize = recognized.iter().map(|d| d.mentions.len()).sum();
            eprintln!("{total} mentions in {} documents", recognized.len());
        }
        Command::Link {
            manifest,
            strategy,
            kbs,
            predictions,
            extended,
            out,
        } => {
            let spec = StrategySpec::parse_with(&strategy, &LinkConfig::default())
                .map_err(|e| PipelineError::Validation(vec![e.to_string()]))?;
            let kbs = parse_kb_args(&kbs)?;
            let missing: Vec<String> = spec
                .kb_requirements()
                .into_iter()
                .flatten()
                .filter(|t| !kbs.contains_key(t))
                .map(|t| format!("kb_bridge source `{t}` needs --kb {t}=<snapshot>"))
                .collect();
            if !missing.is_empty() {
                return Err(PipelineError::Validation(missing));
            }
            let manifest = CorpusManifest::load(&manifest)?;
            let docs = load_corpus(&manifest)?;
            let imported;
            let source = match &predictions {
                Some(dir) => {
                    imported = import_predictions(&manifest, dir)?;
                    MentionSource::Predictions(&imported)
                }
                None => MentionSource::Gold,
            };
            let bridges = build_bridges(&spec, &kbs)?;
            let sets = link_workflows(&recognize(&docs, &source), &spec, &bridges, &NameNormalizer::default())?;
            fs::create_dir_all(&out).map_err(|source| PipelineError::Io {
                path: out.clone(),
                source,
            })?;
            for set in &sets {
                let path = out.join(format!("{}.tsv", set.workflow_id));
                fs::write(&path, set.to_tsv(extended)).map_err(|source| PipelineError::Io { path, source })?;
            }
            eprintln!("wrote {} link sets to {}", sets.len(), out.display());
        }
        Command::Eval(EvalCommand::Ner {
            manifest,
            predictions,
            report,
        }) => {
            let manifest = CorpusManifest::load(&manifest)?;
            let docs = load_corpus(&manifest)?;
            let pred = import_predictions(&manifest, &predictions)?;
            let gold: BTreeMap<String, Vec<Mention>> =
                docs.into_iter().map(|d| (d.doc_id, d.mentions)).collect();
            let r = eval_ner(&pred, &gold)?.labeled("ner:import", predictions.display().to_string());
            write_reports(&[r], report.as_deref())?;
        }
        Command::Eval(EvalCommand::Links {
            pred,
            gold,
            averaging,
            report,
        }) => {
            let averaging: Averaging = averaging
                .parse()
                .map_err(|e: String| PipelineError::Validation(vec![e]))?;
            let pred_sets = load_gold_links(&pred)?;
            let gold_sets = load_gold_links(&gold)?;
            let r = eval_links(&pred_sets, &gold_sets, &NameNormalizer::default(), averaging)?
                .labeled(pred.display().to_string(), gold.display().to_string());
            write_reports(&[r], report.as_deref())?;
        }
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let output = run(&cfg)?;
            print!("{}", format_table(&output.reports));
            eprintln!("artifacts written to {}", cfg.output_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
