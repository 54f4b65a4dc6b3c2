//! Link strategies. Inputs are normalized unique-tool sets of one workflow;
//! every strategy is many-to-many.

use std::collections::BTreeSet;

use super::{levenshtein, LinkError, LinkRecord, LinkSet};
use crate::kb::KnowledgeBase;

pub fn link_exact(workflow_id: &str, article: &BTreeSet<String>, code: &BTreeSet<String>) -> LinkSet {
    let mut out = LinkSet::new(workflow_id);
    for name in article.intersection(code) {
        out.insert(LinkRecord::link(name, name, "exact"));
    }
    out
}

pub fn link_levenshtein(
    workflow_id: &str,
    article: &BTreeSet<String>,
    code: &BTreeSet<String>,
    max_distance: usize,
) -> LinkSet {
    let tag = format!("levenshtein({max_distance})");
    let mut out = LinkSet::new(workflow_id);
    for a in article {
        let la = a.chars().count();
        for c in code {
            if la.abs_diff(c.chars().count()) > max_distance {
                continue;
            }
            if levenshtein(a, c) <= max_distance {
                out.insert(LinkRecord::link(a, c, &tag));
            }
        }
    }
    out
}

/// True when the shorter name is a prefix or suffix of the longer one and is
/// at least `min_overlap` characters long.
pub fn affix_match(a: &str, b: &str, min_overlap: usize) -> bool {
    let (short, long) = if a.chars().count() <= b.chars().count() { (a, b) } else { (b, a) };
    short.chars().count() >= min_overlap && (long.starts_with(short) || long.ends_with(short))
}

pub fn link_prefix_suffix(
    workflow_id: &str,
    article: &BTreeSet<String>,
    code: &BTreeSet<String>,
    min_overlap: usize,
) -> LinkSet {
    let tag = format!("prefix_suffix({min_overlap})");
    let mut out = LinkSet::new(workflow_id);
    for a in article {
        for c in code {
            if affix_match(a, c, min_overlap) {
                out.insert(LinkRecord::link(a, c, &tag));
            }
        }
    }
    out
}

/// Links names that resolve to a common KB entry (or fusion group). The
/// smallest shared id is recorded as the pivot. Names absent from the KB
/// produce no links.
pub fn link_kb_bridge(
    workflow_id: &str,
    article: &BTreeSet<String>,
    code: &BTreeSet<String>,
    kb: &KnowledgeBase,
) -> LinkSet {
    let tag = format!("kb_bridge({})", kb.source());
    let code_ids: Vec<(&String, BTreeSet<&str>)> = code.iter().map(|c| (c, kb.lookup(c))).collect();
    let mut out = LinkSet::new(workflow_id);
    for a in article {
        let ids = kb.lookup(a);
        if ids.is_empty() {
            continue;
        }
        for (c, cids) in &code_ids {
            if let Some(pivot) = ids.intersection(cids).next() {
                let mut record = LinkRecord::link(a, *c, &tag);
                record.pivot = Some(pivot.to_string());
                out.insert(record);
            }
        }
    }
    out
}

/// Union of link sets for one workflow.
pub fn combine(sets: &[LinkSet]) -> Result<LinkSet, LinkError> {
    let first = sets.first().ok_or(LinkError::EmptyCombine)?;
    let mismatched: BTreeSet<&str> = sets
        .iter()
        .map(|s| s.workflow_id.as_str())
        .filter(|w| *w != first.workflow_id)
        .collect();
    if !mismatched.is_empty() {
        return Err(LinkError::WorkflowMismatch {
            expected: first.workflow_id.clone(),
            found: mismatched.into_iter().map(str::to_string).collect(),
        });
    }
    let mut out = LinkSet::new(first.workflow_id.clone());
    for set in sets {
        for r in set.records() {
            out.insert(r.clone());
        }
    }
    Ok(out)
}

/// Adds an unlinked record for every tool that takes part in no link, and
/// drops stale unlinked records for tools that are linked.
pub fn complete_unlinked(
    links: &LinkSet,
    article: &BTreeSet<String>,
    code: &BTreeSet<String>,
) -> LinkSet {
    let linked_article: BTreeSet<&str> = links.links().filter_map(|r| r.article_tool.as_deref()).collect();
    let linked_code: BTreeSet<&str> = links.links().filter_map(|r| r.code_tool.as_deref()).collect();
    let mut out = links.clone();
    out.retain(|r| {
        r.is_link()
            || r.article_tool.as_deref().is_some_and(|a| !linked_article.contains(a))
            || r.code_tool.as_deref().is_some_and(|c| !linked_code.contains(c))
    });
    for a in article.iter().filter(|a| !linked_article.contains(a.as_str())) {
        out.insert(LinkRecord::unlinked_article(a));
    }
    for c in code.iter().filter(|c| !linked_code.contains(c.as_str())) {
        out.insert(LinkRecord::unlinked_code(c));
    }
    out
}
