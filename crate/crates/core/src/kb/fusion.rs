//! Transitive grouping of registry entries that share a normalized alias.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{DisjointSet, KnowledgeBase, NameNormalizer, ToolEntry};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionGroup {
    /// `g:` followed by the group's smallest alias, so ids do not depend on
    /// input order.
    pub group_id: String,
    /// `(source, entry_id)` pairs.
    pub member_entry_ids: BTreeSet<(String, String)>,
    pub alias_union: BTreeSet<String>,
}

/// Fuses registries. The normalizer of the first KB is applied to all
/// entries; an empty list yields an empty fused KB.
pub fn fuse(kbs: &[&KnowledgeBase]) -> KnowledgeBase {
    let normalizer = kbs.first().map(|kb| *kb.normalizer()).unwrap_or_default();
    let entries = kbs.iter().flat_map(|kb| kb.entries().iter().cloned()).collect();
    fuse_entries(entries, normalizer)
}

pub fn fuse_entries(mut entries: Vec<ToolEntry>, normalizer: NameNormalizer) -> KnowledgeBase {
    entries.sort_by(|a, b| (&a.source, &a.entry_id).cmp(&(&b.source, &b.entry_id)));
    entries.dedup_by(|a, b| a.source == b.source && a.entry_id == b.entry_id);

    let normalized: Vec<BTreeSet<String>> =
        entries.iter().map(|e| e.normalized_aliases(&normalizer)).collect();

    let mut alias_slot: HashMap<&str, usize> = HashMap::new();
    for aliases in &normalized {
        for alias in aliases {
            let next = alias_slot.len();
            alias_slot.entry(alias.as_str()).or_insert(next);
        }
    }
    let mut sets = DisjointSet::new(alias_slot.len());
    for aliases in &normalized {
        let mut iter = aliases.iter().map(|a| alias_slot[a.as_str()]);
        if let Some(first) = iter.next() {
            for other in iter {
                sets.union(first, other);
            }
        }
    }

    let mut by_root: BTreeMap<usize, FusionGroup> = BTreeMap::new();
    for (entry, aliases) in entries.iter().zip(&normalized) {
        let Some(first) = aliases.iter().next() else {
            continue;
        };
        let root = sets.find(alias_slot[first.as_str()]);
        let group = by_root.entry(root).or_insert_with(|| FusionGroup {
            group_id: String::new(),
            member_entry_ids: BTreeSet::new(),
            alias_union: BTreeSet::new(),
        });
        group
            .member_entry_ids
            .insert((entry.source.clone(), entry.entry_id.clone()));
        group.alias_union.extend(aliases.iter().cloned());
    }

    let mut groups: Vec<FusionGroup> = by_root
        .into_values()
        .map(|mut g| {
            g.group_id = format!("g:{}", g.alias_union.iter().next().expect("non-empty group"));
            g
        })
        .collect();
    groups.sort_by(|a, b| a.group_id.cmp(&b.group_id));
    KnowledgeBase::from_fusion(normalizer, entries, groups)
}
