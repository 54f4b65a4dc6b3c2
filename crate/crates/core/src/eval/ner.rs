use std::collections::{BTreeMap, HashMap};

use super::{Averaging, Counts, EvalError, EvalReport, UnitScore};
use crate::corpus::Mention;

/// Strict span scoring: a prediction is correct when a gold mention with the
/// same document, offsets and label exists. Each gold mention can be matched
/// once. Both maps are keyed by doc id; one unit score per gold document.
pub fn eval_ner(
    pred: &BTreeMap<String, Vec<Mention>>,
    gold: &BTreeMap<String, Vec<Mention>>,
) -> Result<EvalReport, EvalError> {
    let unknown: Vec<String> = pred.keys().filter(|k| !gold.contains_key(*k)).cloned().collect();
    if !unknown.is_empty() {
        return Err(EvalError::UnknownDocs(unknown));
    }
    for (key, mentions) in pred.iter().chain(gold) {
        if let Some(m) = mentions.iter().find(|m| &m.doc_id != key) {
            return Err(EvalError::MisfiledMention {
                key: key.clone(),
                doc: m.doc_id.clone(),
                mention: m.mention_id.clone(),
            });
        }
    }
    let units = gold
        .iter()
        .map(|(doc, gold_mentions)| {
            let mut available: HashMap<(&str, usize, usize, &str), usize> = HashMap::new();
            for m in gold_mentions {
                *available.entry(m.span_key()).or_default() += 1;
            }
            let pred_mentions = pred.get(doc).map(Vec::as_slice).unwrap_or_default();
            let mut tp = 0;
            for m in pred_mentions {
                if let Some(n) = available.get_mut(&m.span_key()).filter(|n| **n > 0) {
                    *n -= 1;
                    tp += 1;
                }
            }
            UnitScore::new(
                doc.clone(),
                Counts::new(tp, pred_mentions.len() - tp, gold_mentions.len() - tp),
            )
        })
        .collect();
    Ok(EvalReport::aggregate(units, Averaging::Micro))
}
