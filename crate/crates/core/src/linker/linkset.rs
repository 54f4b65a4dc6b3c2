//! Link records and their tab-separated serialization.

use std::collections::BTreeSet;
use std::fmt::Write;

use indexmap::IndexMap;
use serde::Serialize;

use super::LinkError;

/// Placeholder for the absent side of an unlinked record.
pub const ABSENT: &str = "_";
pub const TSV_HEADER: &str = "Article\tExecutable code";
pub const TSV_HEADER_EXTENDED: &str = "Article\tExecutable code\tStrategy";
pub const UNLINKED_TAG: &str = "unlinked";

pub type Pair = (Option<String>, Option<String>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkRecord {
    pub article_tool: Option<String>,
    pub code_tool: Option<String>,
    pub strategy: String,
    pub pivot: Option<String>,
}

impl LinkRecord {
    pub fn link(article: impl Into<String>, code: impl Into<String>, strategy: &str) -> Self {
        Self {
            article_tool: Some(article.into()),
            code_tool: Some(code.into()),
            strategy: strategy.to_string(),
            pivot: None,
        }
    }

    pub fn unlinked_article(article: impl Into<String>) -> Self {
        Self {
            article_tool: Some(article.into()),
            code_tool: None,
            strategy: UNLINKED_TAG.to_string(),
            pivot: None,
        }
    }

    pub fn unlinked_code(code: impl Into<String>) -> Self {
        Self {
            article_tool: None,
            code_tool: Some(code.into()),
            strategy: UNLINKED_TAG.to_string(),
            pivot: None,
        }
    }

    pub fn is_link(&self) -> bool {
        self.article_tool.is_some() && self.code_tool.is_some()
    }

    pub fn pair(&self) -> Pair {
        (self.article_tool.clone(), self.code_tool.clone())
    }
}

/// Records for one workflow, unique on the `(article, code)` pair and kept
/// in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinkSet {
    pub workflow_id: String,
    records: IndexMap<Pair, LinkRecord>,
}

impl LinkSet {
    pub fn new(workflow_id: impl Into<String>) -> Self {
        Self {
            workflow_id: workflow_id.into(),
            records: IndexMap::new(),
        }
    }

    /// Adds a record. A record whose pair is already present merges into it:
    /// strategy tags are joined with `+` and the first pivot is kept.
    ///
    /// Panics if both sides are absent.
    pub fn insert(&mut self, record: LinkRecord) {
        assert!(
            record.article_tool.is_some() || record.code_tool.is_some(),
            "a link record needs at least one side"
        );
        match self.records.get_mut(&record.pair()) {
            Some(existing) => {
                for tag in record.strategy.split('+') {
                    if !existing.strategy.split('+').any(|t| t == tag) {
                        existing.strategy.push('+');
                        existing.strategy.push_str(tag);
                    }
                }
                if existing.pivot.is_none() {
                    existing.pivot = record.pivot;
                }
            }
            None => {
                self.records.insert(record.pair(), record);
            }
        }
    }

    pub fn records(&self) -> impl Iterator<Item = &LinkRecord> {
        self.records.values()
    }

    pub fn links(&self) -> impl Iterator<Item = &LinkRecord> {
        self.records().filter(|r| r.is_link())
    }

    pub fn pairs(&self) -> BTreeSet<Pair> {
        self.records.keys().cloned().collect()
    }

    pub fn contains(&self, article: Option<&str>, code: Option<&str>) -> bool {
        self.records
            .contains_key(&(article.map(str::to_string), code.map(str::to_string)))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub(crate) fn retain(&mut self, keep: impl Fn(&LinkRecord) -> bool) {
        self.records.retain(|_, r| keep(r));
    }

    /// Replaces every record's strategy tag.
    pub fn retag(mut self, tag: &str) -> Self {
        for r in self.records.values_mut() {
            r.strategy = tag.to_string();
        }
        self
    }

    /// Sorts records: links first by (article, code), then unlinked records.
    pub fn sorted(mut self) -> Self {
        self.records.sort_by(|ka, a, kb, b| {
            (!a.is_link(), ka).cmp(&(!b.is_link(), kb))
        });
        self
    }

    /// Two-column layout (`_` for an absent side), or three columns with the
    /// strategy tag when `extended` is set.
    pub fn to_tsv(&self, extended: bool) -> String {
        let mut out = String::from(if extended { TSV_HEADER_EXTENDED } else { TSV_HEADER });
        out.push('\n');
        for r in self.records() {
            let a = r.article_tool.as_deref().unwrap_or(ABSENT);
            let c = r.code_tool.as_deref().unwrap_or(ABSENT);
            if extended {
                let _ = writeln!(out, "{a}\t{c}\t{}", r.strategy);
            } else {
                let _ = writeln!(out, "{a}\t{c}");
            }
        }
        out
    }

    /// Parses either layout. The header line is optional; names are kept
    /// exactly as written.
    pub fn parse_tsv(workflow_id: &str, content: &str) -> Result<Self, LinkError> {
        let mut set = LinkSet::new(workflow_id);
        for (idx, raw) in content.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let lower = line.to_ascii_lowercase();
            if idx == 0 && lower.starts_with("article\t") {
                continue;
            }
            let err = |message: &str| LinkError::Tsv {
                workflow_id: workflow_id.to_string(),
                line: line_no,
                message: message.to_string(),
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if !(2..=3).contains(&cols.len()) {
                return Err(err("expected 2 or 3 tab-separated columns"));
            }
            let side = |s: &str| (s.trim() != ABSENT && !s.trim().is_empty()).then(|| s.to_string());
            let (article, code) = (side(cols[0]), side(cols[1]));
            if article.is_none() && code.is_none() {
                return Err(err("both sides are absent"));
            }
            let strategy = match cols.get(2) {
                Some(tag) => tag.to_string(),
                None if article.is_some() && code.is_some() => "gold".to_string(),
                None => UNLINKED_TAG.to_string(),
            };
            set.insert(LinkRecord {
                article_tool: article,
                code_tool: code,
                strategy,
                pivot: None,
            });
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_pairs_merge_tags() {
        let mut s = LinkSet::new("wf");
        s.insert(LinkRecord::link("a", "b", "exact"));
        s.insert(LinkRecord::link("a", "b", "levenshtein(1)"));
        s.insert(LinkRecord::link("a", "b", "exact"));
        assert_eq!(s.len(), 1);
        assert_eq!(s.records().next().unwrap().strategy, "exact+levenshtein(1)");
    }

    #[test]
    fn tsv_layouts() {
        let mut s = LinkSet::new("wf");
        s.insert(LinkRecord::link("barrnap", "barrnap", "exact"));
        s.insert(LinkRecord::unlinked_article("schmutzi"));
        s.insert(LinkRecord::unlinked_code("bgzip"));
        assert_eq!(
            s.to_tsv(false),
            "Article\tExecutable code\nbarrnap\tbarrnap\nschmutzi\t_\n_\tbgzip\n"
        );
        let ext = s.to_tsv(true);
        assert!(ext.contains("barrnap\tbarrnap\texact\n"));
        let back = LinkSet::parse_tsv("wf", &ext).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_malformed_rows() {
        assert!(LinkSet::parse_tsv("wf", "a\tb\tc\td\n").is_err());
        let err = LinkSet::parse_tsv("wf", "Article\tExecutable code\n_\t_\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn header_optional() {
        let s = LinkSet::parse_tsv("wf", "x\ty\n").unwrap();
        assert!(s.contains(Some("x"), Some("y")));
    }

    #[test]
    fn sorted_puts_links_first() {
        let mut s = LinkSet::new("wf");
        s.insert(LinkRecord::unlinked_article("z"));
        s.insert(LinkRecord::link("b", "b", "exact"));
        s.insert(LinkRecord::link("a", "c", "exact"));
        let order: Vec<_> = s.sorted().records().map(|r| r.pair()).collect();
        assert_eq!(order[0].0.as_deref(), Some("a"));
        assert_eq!(order[2].1, None);
    }
}
