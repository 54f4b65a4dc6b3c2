//! Acceptance suite. Every check runs in one sequential test so the whole
//! suite can be timed; each prints a single PASS/FAIL line.
//!
//! The released-corpus reproduction runs only when `TOOLLINK_RELEASED_DATA`
//! points at a directory of run configs (see README).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use toollink::corpus::{parse_brat_mentions, write_brat, AnnotatedDocument, Mention, Modality};
use toollink::eval::{eval_links, Averaging};
use toollink::kb::{fuse_entries, KnowledgeBase, NameNormalizer, ToolEntry};
use toollink::linker::{levenshtein, link_kb_bridge, LinkRecord, LinkSet};
use toollink::ner::{BoundaryMode, DictionaryMatcher, NerConfig};
use toollink::pipeline::{run, RunConfig};

const GOLD_TSV: &str = "Article\tExecutable code\n\
Schmutzi\t_\n\
BAsic Rapid Ribosomal RNA Predictor\tbarrnap\n\
Barrnap\tbarrnap\n\
CircularMapper\tcirculargenerator\n\
CircularMapper\trealignsamfile\n\
CM\tcirculargenerator\n\
CM\trealignsamfile\n\
_\tbgzip\n\
Krona\tktImportTaxonomy\n";

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- 1

fn dp_oracle(a: &[char], b: &[char]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

fn random_word(rng: &mut StdRng, alphabet: &[char], max: usize) -> String {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

fn criterion_edit_distance() -> Check {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let alphabet: Vec<char> = "abcdefgé".chars().collect();
    let words: Vec<String> = (0..2000).map(|_| random_word(&mut rng, &alphabet, 12)).collect();
    for pair in words.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let want = dp_oracle(&a.chars().collect::<Vec<_>>(), &b.chars().collect::<Vec<_>>());
        let got = levenshtein(a, b);
        ensure(got == want, || format!("levenshtein({a:?}, {b:?}) = {got}, oracle {want}"))?;
    }
    let mut triples = 0;
    for t in words.chunks(3).filter(|t| t.len() == 3) {
        let (x, y, z) = (&t[0], &t[1], &t[2]);
        let (xy, yz, xz) = (levenshtein(x, y), levenshtein(y, z), levenshtein(x, z));
        ensure(xy == levenshtein(y, x), || format!("asymmetric on {x:?}, {y:?}"))?;
        ensure((xy == 0) == (x == y), || format!("identity fails on {x:?}, {y:?}"))?;
        ensure(levenshtein(x, x) == 0, || format!("d(x, x) != 0 for {x:?}"))?;
        ensure(xz <= xy + yz, || format!("triangle fails on {x:?}, {y:?}, {z:?}"))?;
        triples += 1;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("1000 pairs, {triples} triples, {elapsed:.2?}"))
}

// ---------------------------------------------------------------- 2

fn criterion_fusion() -> Check {
    let mut rng = StdRng::seed_from_u64(2);
    let normalizer = NameNormalizer::default();
    let sources = ["bioconda", "biotools", "bioweb"];
    for round in 0..200 {
        let n = rng.gen_range(1..=100);
        let mut aliases: Vec<Vec<String>> = (0..n).map(|i| vec![format!("Tool{i}")]).collect();
        let edges = rng.gen_range(0..=150);
        for k in 0..edges {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            // Case differs on the two sides: the shared name must still match.
            aliases[i].push(format!("shared{k}"));
            aliases[j].push(format!("SHARED{k}"));
        }
        let ids: Vec<(String, String)> = (0..n)
            .map(|i| (sources[i % 3].to_string(), format!("e{i}")))
            .collect();
        let mut entries: Vec<ToolEntry> = (0..n)
            .map(|i| {
                ToolEntry::new(&ids[i].1, &ids[i].0, &aliases[i][0], aliases[i].clone(), &normalizer).unwrap()
            })
            .collect();
        entries.shuffle(&mut rng);

        // Brute force: pairwise shared-name graph, then BFS.
        let lower: Vec<BTreeSet<String>> =
            aliases.iter().map(|a| a.iter().map(|s| s.to_lowercase()).collect()).collect();
        let mut seen = vec![false; n];
        let mut expected = BTreeSet::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([s]);
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                comp.insert(ids[u].clone());
                for v in 0..n {
                    if !seen[v] && !lower[u].is_disjoint(&lower[v]) {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            expected.insert(comp);
        }

        let kb = fuse_entries(entries, normalizer.clone());
        let got: BTreeSet<BTreeSet<(String, String)>> =
            kb.groups().iter().map(|g| g.member_entry_ids.clone()).collect();
        ensure(got == expected, || {
            format!("round {round}: {} groups, oracle {} components", got.len(), expected.len())
        })?;
    }
    Ok("200 random instances match BFS components".into())
}

// ---------------------------------------------------------------- 3

fn ner_oracle(text: &str, aliases: &[&str], mode: BoundaryMode, min_len: usize) -> BTreeSet<(usize, usize)> {
    let t: Vec<char> = text.chars().collect();
    let word = |c: char| c.is_alphanumeric();
    let mut found = Vec::new();
    for alias in aliases {
        let a: Vec<char> = alias.to_lowercase().chars().collect();
        if a.len() < min_len {
            continue;
        }
        for s in 0..t.len() {
            let mut i = s;
            let mut ok = true;
            for &ac in &a {
                if ac == ' ' {
                    let run_start = i;
                    while i < t.len() && t[i].is_whitespace() {
                        i += 1;
                    }
                    if i == run_start {
                        ok = false;
                        break;
                    }
                } else if i < t.len() && t[i].to_ascii_lowercase() == ac {
                    i += 1;
                } else {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            if mode == BoundaryMode::TokenBoundary
                && ((s > 0 && word(t[s - 1])) || (i < t.len() && word(t[i])))
            {
                continue;
            }
            found.push((s, i));
        }
    }
    // Longest first, then leftmost; keep what does not overlap a kept span.
    found.sort_by(|x, y| (y.1 - y.0).cmp(&(x.1 - x.0)).then(x.0.cmp(&y.0)));
    let mut kept: Vec<(usize, usize)> = Vec::new();
    for (s, e) in found {
        if kept.iter().all(|&(ks, ke)| e <= ks || ke <= s) {
            kept.push((s, e));
        }
    }
    kept.into_iter().collect()
}

fn criterion_dictionary_ner() -> Check {
    let mut rng = StdRng::seed_from_u64(3);
    let normalizer = NameNormalizer::default();
    let aliases = [
        "map", "mapper", "circularmapper", "circular mapper", "bwa", "bwa mem", "samtools", "sam", "rsem",
        "rsem-prepare-reference", "x", "ab", "abab",
    ];
    let entries: Vec<ToolEntry> = aliases
        .iter()
        .enumerate()
        .map(|(i, a)| ToolEntry::new(format!("t{i}"), "bioconda", *a, [*a], &normalizer).unwrap())
        .collect();
    let kb = KnowledgeBase::from_entries("bioconda", entries, normalizer).unwrap();
    let fillers = ["the", "reads", "were", "aligned", "with", "-", "(", ")", ".", "ab", "maps", "xsam"];
    let separators = [" ", "  ", "\n", "\t ", "", ", "];
    let mut planted = 0;
    for mode in [BoundaryMode::TokenBoundary, BoundaryMode::Substring] {
        let cfg = NerConfig {
            boundary_mode: mode,
            ..NerConfig::default()
        };
        let matcher = DictionaryMatcher::new(&kb, &cfg);
        for round in 0..200 {
            let mut text = String::new();
            for _ in 0..rng.gen_range(5..40) {
                let piece: String = if rng.gen_bool(0.4) {
                    planted += 1;
                    let alias = aliases.choose(&mut rng).unwrap();
                    let spaced: String = alias
                        .chars()
                        .map(|c| if c == ' ' { (*separators[..4].choose(&mut rng).unwrap()).to_string() } else {
                            if rng.gen_bool(0.3) { c.to_ascii_uppercase().to_string() } else { c.to_string() }
                        })
                        .collect();
                    spaced
                } else {
                    fillers.choose(&mut rng).unwrap().to_string()
                };
                text.push_str(&piece);
                text.push_str(separators.choose(&mut rng).unwrap());
            }
            let got: BTreeSet<(usize, usize)> =
                matcher.find(&text, "doc").iter().map(|m| (m.start, m.end)).collect();
            let want = ner_oracle(&text, &aliases, mode, cfg.min_match_length);
            ensure(got == want, || format!("{mode} round {round}: {text:?}\n got {got:?}\n want {want:?}"))?;
        }
    }
    Ok(format!("400 texts ({planted} planted aliases), both boundary modes"))
}

// ---------------------------------------------------------------- 4

fn criterion_round_trip() -> Check {
    let mut rng = StdRng::seed_from_u64(4);
    let alphabet: Vec<char> = "abcXYZ019 -_.\n\téßλ→".chars().collect();
    let labels = ["Tool", "Tool", "Software"];
    for round in 0..500 {
        let len = rng.gen_range(1..80);
        let text: String = (0..len).map(|_| *alphabet.choose(&mut rng).unwrap()).collect();
        let chars: Vec<char> = text.chars().collect();
        let mut doc = AnnotatedDocument::new(format!("d{round}"), "wf", Modality::Article, text.clone());
        for k in 0..rng.gen_range(0..12) {
            let start = rng.gen_range(0..len);
            let end = rng.gen_range(start + 1..=len);
            doc.mentions.push(Mention {
                mention_id: format!("T{k}"),
                label: labels.choose(&mut rng).unwrap().to_string(),
                start,
                end,
                surface: chars[start..end].iter().collect(),
                doc_id: doc.doc_id.clone(),
            });
        }
        let ann = write_brat(&doc);
        let back = parse_brat_mentions(&text, &ann, &doc.doc_id).map_err(|e| format!("round {round}: {e}"))?;
        let key = |ms: &[Mention]| {
            let mut v: Vec<(usize, usize, String, String)> =
                ms.iter().map(|m| (m.start, m.end, m.label.clone(), m.surface.clone())).collect();
            v.sort();
            v
        };
        ensure(key(&doc.mentions) == key(&back), || format!("round {round}: mention multiset changed"))?;
    }
    let set = LinkSet::parse_tsv("wf", GOLD_TSV).map_err(|e| e.to_string())?;
    ensure(set.to_tsv(false) == GOLD_TSV, || "gold TSV is not byte-identical".into())?;
    Ok("500 BRAT documents; gold TSV byte-identical".into())
}

// ---------------------------------------------------------------- 5

/// Counts straight from TSV text: lowercase both columns, compare as sets.
fn count_oracle(pred: &str, gold: &str) -> (usize, usize, usize) {
    let rows = |s: &str| -> BTreeSet<(String, String)> {
        s.lines()
            .skip(1)
            .filter(|l| !l.is_empty())
            .map(|l| {
                let (a, c) = l.split_once('\t').unwrap();
                (a.to_lowercase(), c.to_lowercase())
            })
            .collect()
    };
    let (p, g) = (rows(pred), rows(gold));
    (p.intersection(&g).count(), p.difference(&g).count(), g.difference(&p).count())
}

fn criterion_fixture_scoring() -> Check {
    let normalizer = NameNormalizer::default();
    let gold = vec![LinkSet::parse_tsv("wf", GOLD_TSV).map_err(|e| e.to_string())?];
    let identity = eval_links(&gold, &gold, &normalizer, Averaging::Micro).map_err(|e| e.to_string())?;
    ensure(
        identity.precision == 1.0 && identity.recall == 1.0 && identity.f1 == 1.0,
        || format!("identity scored P={} R={} F1={}", identity.precision, identity.recall, identity.f1),
    )?;

    // Schmutzi wrongly linked to bgzip: both unlinked gold rows go away.
    let perturbed_tsv: String = GOLD_TSV
        .lines()
        .filter(|l| *l != "Schmutzi\t_" && *l != "_\tbgzip")
        .chain(["Schmutzi\tbgzip"])
        .map(|l| format!("{l}\n"))
        .collect();
    let perturbed = vec![LinkSet::parse_tsv("wf", &perturbed_tsv).map_err(|e| e.to_string())?];
    let report = eval_links(&perturbed, &gold, &normalizer, Averaging::Micro).map_err(|e| e.to_string())?;
    let (tp, fp, fn_) = count_oracle(&perturbed_tsv, GOLD_TSV);
    let got = (report.counts.tp, report.counts.fp, report.counts.fn_);
    ensure(got == (tp, fp, fn_), || format!("counts {got:?}, oracle {:?}", (tp, fp, fn_)))?;
    ensure((tp, fp, fn_) == (7, 1, 2), || format!("oracle recount {:?}", (tp, fp, fn_)))?;
    let (p, r) = (tp as f64 / (tp + fp) as f64, tp as f64 / (tp + fn_) as f64);
    ensure(
        (report.precision - p).abs() < 1e-12 && (report.recall - r).abs() < 1e-12
            && (report.f1 - 2.0 * p * r / (p + r)).abs() < 1e-12,
        || format!("P={} R={} F1={}", report.precision, report.recall, report.f1),
    )?;
    Ok(format!("identity 1.0; perturbed TP {tp} FP {fp} FN {fn_}, P={p:.4} R={r:.4}"))
}

// ---------------------------------------------------------------- 6

fn criterion_kb_bridge() -> Check {
    let normalizer = NameNormalizer::default();
    let rows: [(&str, &[&str]); 3] = [
        ("circularmapper", &["circularmapper", "circulargenerator", "realignsamfile"]),
        ("rsem", &["rsem", "rsem-prepare-reference", "rsem-bam2wig"]),
        ("metabat2", &["metabat2", "jgi_summarize_bam_contig_depths", "contigOverlaps"]),
    ];
    let entries = rows
        .iter()
        .map(|(name, aliases)| ToolEntry::new(*name, "bioconda", *name, aliases.iter().copied(), &normalizer))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let kb = KnowledgeBase::from_entries("bioconda", entries, normalizer).map_err(|e| e.to_string())?;
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let article = set(&["circularmapper", "rsem", "metabat2"]);
    let code = set(&["circulargenerator", "rsem-prepare-reference", "jgi_summarize_bam_contig_depths"]);
    let links = link_kb_bridge("example", &article, &code, &kb);
    let got: BTreeSet<(String, String)> = links
        .links()
        .map(|r: &LinkRecord| (r.article_tool.clone().unwrap(), r.code_tool.clone().unwrap()))
        .collect();
    let want: BTreeSet<(String, String)> = [
        ("circularmapper", "circulargenerator"),
        ("rsem", "rsem-prepare-reference"),
        ("metabat2", "jgi_summarize_bam_contig_depths"),
    ]
    .iter()
    .map(|(a, c)| (a.to_string(), c.to_string()))
    .collect();
    ensure(got == want, || format!("links {got:?}"))?;
    ensure(links.len() == 3, || format!("{} records, expected only the 3 links", links.len()))?;
    Ok("3 of 3 listed links, no extras".into())
}

// ---------------------------------------------------------------- 7

/// `(config file, published F1, tolerance)` for the released-corpus reproduction.
const PUBLISHED: [(&str, f64, f64); 5] = [
    ("exact.toml", 78.9, 0.5),
    ("levenshtein1.toml", 80.3, 0.5),
    ("bioconda_exact.toml", 84.9, 1.0),
    ("fusion_exact.toml", 85.0, 1.0),
    ("end_to_end.toml", 65.7, 2.0),
];

fn criterion_published_scores() -> Option<Check> {
    let dir = PathBuf::from(std::env::var_os("TOOLLINK_RELEASED_DATA")?);
    let mut lines = Vec::new();
    let mut off = Vec::new();
    for (file, target, tol) in PUBLISHED {
        let path = dir.join(file);
        let outcome = RunConfig::load(&path).and_then(|cfg| run(&cfg));
        match outcome {
            Ok(out) => {
                let f1 = out.reports[0].f1 * 100.0;
                lines.push(format!("{file}: F1 {f1:.1} (published {target} ± {tol})"));
                if (f1 - target).abs() > tol {
                    off.push(file);
                }
            }
            Err(e) => return Some(Err(format!("{file}: {e}"))),
        }
    }
    let summary = lines.join("; ");
    Some(if off.is_empty() { Ok(summary) } else { Err(format!("outside tolerance: {off:?}; {summary}")) })
}

// ---------------------------------------------------------------- 8

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            if entry.file_name() != "out" {
                copy_dir(&entry.path(), &target);
            }
        } else {
            fs::copy(entry.path(), target).unwrap();
        }
    }
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn criterion_determinism() -> Check {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let work = tempfile::tempdir().map_err(|e| e.to_string())?;
    copy_dir(&fixtures, work.path());
    let mut artifacts = 0;
    for (config, out) in [
        ("run_gold_exact.toml", "out/gold_exact"),
        ("run_dictionary_fusion.toml", "out/dictionary_fusion"),
    ] {
        let mut runs = Vec::new();
        for _ in 0..2 {
            let status = Command::new(env!("CARGO_BIN_EXE_toollink"))
                .args(["run", "--config"])
                .arg(work.path().join(config))
                .output()
                .map_err(|e| e.to_string())?;
            ensure(status.status.success(), || {
                format!("{config}: {}", String::from_utf8_lossy(&status.stderr))
            })?;
            let snap = snapshot(&work.path().join(out));
            fs::remove_dir_all(work.path().join(out)).map_err(|e| e.to_string())?;
            runs.push(snap);
        }
        ensure(!runs[0].is_empty(), || format!("{config}: no artifacts"))?;
        ensure(runs[0] == runs[1], || {
            let differing: Vec<_> = runs[0]
                .keys()
                .chain(runs[1].keys())
                .filter(|k| runs[0].get(*k) != runs[1].get(*k))
                .collect();
            format!("{config}: artifacts differ: {differing:?}")
        })?;
        artifacts += runs[0].len();
    }
    Ok(format!("{artifacts} artifacts identical across two runs of each config"))
}

// ----------------------------------------------------------------

#[test]
fn acceptance() {
    let started = Instant::now();
    let mut failed = Vec::new();
    let mut report = |n: usize, name: &str, outcome: Option<Check>| match outcome {
        Some(Ok(detail)) => println!("PASS {n} {name}: {detail}"),
        Some(Err(detail)) => {
            println!("FAIL {n} {name}: {detail}");
            failed.push(n);
        }
        None => println!("SKIP {n} {name}: TOOLLINK_RELEASED_DATA not set"),
    };
    report(1, "edit distance oracle", Some(criterion_edit_distance()));
    report(2, "fusion oracle", Some(criterion_fusion()));
    report(3, "dictionary NER oracle", Some(criterion_dictionary_ner()));
    report(4, "format round-trip", Some(criterion_round_trip()));
    report(5, "fixture scoring", Some(criterion_fixture_scoring()));
    report(6, "KB-bridge example table", Some(criterion_kb_bridge()));
    // Data-pinned: a miss is a diagnosis, not a suite failure.
    match criterion_published_scores() {
        Some(Err(detail)) => println!("DIAG 7 published scores: {detail}"),
        other => report(7, "published scores", other),
    }
    let determinism = criterion_determinism();
    let elapsed = started.elapsed();
    report(
        8,
        "determinism",
        Some(determinism.and_then(|d| {
            ensure(elapsed < Duration::from_secs(60), || format!("suite took {elapsed:?}"))?;
            Ok(format!("{d}; suite {elapsed:.2?}"))
        })),
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
