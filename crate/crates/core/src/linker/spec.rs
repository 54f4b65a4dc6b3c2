//! Declarative strategy expressions such as
//! `combine(kb_bridge(bioconda,bioweb), levenshtein(1))`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::{
    combine, link_exact, link_kb_bridge, link_levenshtein, link_prefix_suffix, LinkConfig,
    LinkError, LinkSet,
};
use crate::kb::KnowledgeBase;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategySpec {
    Exact,
    Levenshtein(usize),
    PrefixSuffix(usize),
    /// Sorted, deduplicated source tags. One source bridges through that KB;
    /// several are fused first.
    KbBridge(Vec<String>),
    Combine(Vec<StrategySpec>),
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact => f.write_str("exact"),
            Self::Levenshtein(n) => write!(f, "levenshtein({n})"),
            Self::PrefixSuffix(m) => write!(f, "prefix_suffix({m})"),
            Self::KbBridge(sources) => write!(f, "kb_bridge({})", sources.join(",")),
            Self::Combine(parts) => {
                f.write_str("combine(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for StrategySpec {
    type Err = LinkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_with(s, &LinkConfig::default())
    }
}

impl StrategySpec {
    /// Parses an expression; bare `levenshtein` and `prefix_suffix` take
    /// their thresholds from `defaults`.
    pub fn parse_with(s: &str, defaults: &LinkConfig) -> Result<Self, LinkError> {
        let mut p = Parser {
            src: s,
            pos: 0,
            defaults: *defaults,
        };
        let spec = p.spec()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(spec)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    defaults: LinkConfig,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> LinkError {
        LinkError::Spec {
            spec: self.src.to_string(),
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(0, char::len_utf8);
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> Result<&str, LinkError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '-'))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected a name"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn number(&mut self) -> Result<usize, LinkError> {
        let at = self.pos;
        let w = self.word()?;
        w.parse().map_err(|_| {
            self.pos = at;
            self.error("expected a non-negative integer")
        })
    }

    fn close(&mut self) -> Result<(), LinkError> {
        if self.eat(')') {
            Ok(())
        } else {
            Err(self.error("expected `)`"))
        }
    }

    fn spec(&mut self) -> Result<StrategySpec, LinkError> {
        let start = self.pos;
        let name = self.word()?.to_string();
        let has_args = self.eat('(');
        let spec = match (name.as_str(), has_args) {
            ("exact", false) => StrategySpec::Exact,
            ("levenshtein", true) => {
                let n = self.number()?;
                self.close()?;
                StrategySpec::Levenshtein(n)
            }
            ("levenshtein", false) => StrategySpec::Levenshtein(self.defaults.levenshtein_threshold),
            ("prefix_suffix", false) => StrategySpec::PrefixSuffix(self.defaults.min_affix_overlap),
            ("prefix_suffix", true) => {
                let m = self.number()?;
                if m == 0 {
                    return Err(self.error("minimum overlap must be at least 1"));
                }
                self.close()?;
                StrategySpec::PrefixSuffix(m)
            }
            ("kb_bridge", true) => {
                let mut sources = BTreeSet::new();
                loop {
                    sources.insert(self.word()?.to_string());
                    if !self.eat(',') {
                        break;
                    }
                }
                self.close()?;
                StrategySpec::KbBridge(sources.into_iter().collect())
            }
            ("combine", true) => {
                let mut parts = vec![self.spec()?];
                while self.eat(',') {
                    parts.push(self.spec()?);
                }
                self.close()?;
                StrategySpec::Combine(parts)
            }
            ("exact" | "kb_bridge" | "combine", _) => {
                return Err(self.error(&format!("wrong argument list for `{name}`")))
            }
            _ => {
                self.pos = start;
                return Err(self.error(&format!("unknown strategy `{name}`")));
            }
        };
        Ok(spec)
    }
}

impl StrategySpec {
    /// Source lists of every `kb_bridge` in the expression.
    pub fn kb_requirements(&self) -> BTreeSet<Vec<String>> {
        let mut out = BTreeSet::new();
        self.collect_requirements(&mut out);
        out
    }

    fn collect_requirements(&self, out: &mut BTreeSet<Vec<String>>) {
        match self {
            Self::KbBridge(sources) => {
                out.insert(sources.clone());
            }
            Self::Combine(parts) => parts.iter().for_each(|p| p.collect_requirements(out)),
            _ => {}
        }
    }

    /// Runs the expression for one workflow. `bridges` maps each required
    /// source list to its pivot KB.
    pub fn apply(
        &self,
        workflow_id: &str,
        article: &BTreeSet<String>,
        code: &BTreeSet<String>,
        bridges: &BTreeMap<Vec<String>, KnowledgeBase>,
    ) -> Result<LinkSet, LinkError> {
        let tag = self.to_string();
        let out = match self {
            Self::Exact => link_exact(workflow_id, article, code),
            Self::Levenshtein(n) => link_levenshtein(workflow_id, article, code, *n),
            Self::PrefixSuffix(m) => link_prefix_suffix(workflow_id, article, code, *m),
            Self::KbBridge(sources) => {
                let kb = bridges
                    .get(sources)
                    .ok_or_else(|| LinkError::MissingKb(sources.join(",")))?;
                link_kb_bridge(workflow_id, article, code, kb).retag(&tag)
            }
            Self::Combine(parts) => {
                let sets = parts
                    .iter()
                    .map(|p| p.apply(workflow_id, article, code, bridges))
                    .collect::<Result<Vec<_>, _>>()?;
                return combine(&sets);
            }
        };
        Ok(out)
    }
}
