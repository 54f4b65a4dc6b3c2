use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use super::{Averaging, Counts, EvalError, EvalReport, UnitScore};
use crate::kb::NameNormalizer;
use crate::linker::{LinkSet, Pair};

/// Gold links and unlinked records share the predicted link-set shape.
pub type GoldLinkSet = LinkSet;

/// Record pairs with both sides normalized.
pub fn normalized_pairs(set: &LinkSet, normalizer: &NameNormalizer) -> BTreeSet<Pair> {
    set.records()
        .map(|r| {
            (
                r.article_tool.as_deref().map(|a| normalizer.normalize(a)),
                r.code_tool.as_deref().map(|c| normalizer.normalize(c)),
            )
        })
        .collect()
}

/// Set comparison of records (links and unlinked records alike), one unit
/// score per gold workflow. Gold workflows without predictions score as all
/// missed.
pub fn eval_links(
    pred: &[LinkSet],
    gold: &[GoldLinkSet],
    normalizer: &NameNormalizer,
    averaging: Averaging,
) -> Result<EvalReport, EvalError> {
    let index = |sets: &[LinkSet]| -> Result<BTreeMap<String, BTreeSet<Pair>>, EvalError> {
        let mut out = BTreeMap::new();
        for s in sets {
            if out
                .insert(s.workflow_id.clone(), normalized_pairs(s, normalizer))
                .is_some()
            {
                return Err(EvalError::DuplicateWorkflow(s.workflow_id.clone()));
            }
        }
        Ok(out)
    };
    let pred = index(pred)?;
    let gold = index(gold)?;
    let unknown: Vec<String> = pred.keys().filter(|k| !gold.contains_key(*k)).cloned().collect();
    if !unknown.is_empty() {
        return Err(EvalError::UnknownWorkflows(unknown));
    }
    let empty = BTreeSet::new();
    let units = gold
        .iter()
        .map(|(wf, g)| {
            let p = pred.get(wf).unwrap_or(&empty);
            let tp = p.intersection(g).count();
            UnitScore::new(wf.clone(), Counts::new(tp, p.len() - tp, g.len() - tp))
        })
        .collect();
    Ok(EvalReport::aggregate(units, averaging))
}

/// Loads every `<workflow_id>.tsv` in a directory, sorted by workflow id.
pub fn load_gold_links(dir: &Path) -> Result<Vec<GoldLinkSet>, EvalError> {
    let io = |source| EvalError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let content = fs::read_to_string(p).map_err(|source| EvalError::Io {
                path: p.display().to_string(),
                source,
            })?;
            let wf = p.file_stem().unwrap_or_default().to_string_lossy();
            Ok(LinkSet::parse_tsv(&wf, &content)?)
        })
        .collect()
}
