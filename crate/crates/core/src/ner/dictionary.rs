use aho_corasick::{AhoCorasick, MatchKind};

use super::{BoundaryMode, NerConfig};
use crate::corpus::{char_slice, AnnotatedDocument, Mention, TOOL_LABEL};
use crate::kb::{KnowledgeBase, NameNormalizer};

/// Multi-pattern matcher over the normalized aliases of one KB. Build once,
/// then scan any number of documents.
pub struct DictionaryMatcher {
    automaton: Option<AhoCorasick>,
    normalizer: NameNormalizer,
    boundary_mode: BoundaryMode,
}

// Case-folded view of a text with whitespace runs collapsed to one space.
// `origin[i]` is the char offset in the source text of folded char `i`.
struct FoldedText {
    folded: String,
    chars: Vec<char>,
    origin: Vec<usize>,
    byte_to_char: Vec<usize>,
}

impl FoldedText {
    fn new(text: &str, normalizer: &NameNormalizer) -> Self {
        let mut chars = Vec::new();
        let mut origin = Vec::new();
        let mut prev_space = false;
        for (i, c) in text.chars().enumerate() {
            let f = normalizer.fold_char(c);
            if f == ' ' && c.is_whitespace() {
                if prev_space {
                    continue;
                }
                prev_space = true;
            } else {
                prev_space = false;
            }
            chars.push(f);
            origin.push(i);
        }
        let folded: String = chars.iter().collect();
        let mut byte_to_char = vec![0; folded.len() + 1];
        for (ci, (bi, _)) in folded.char_indices().enumerate() {
            byte_to_char[bi] = ci;
        }
        byte_to_char[folded.len()] = chars.len();
        Self {
            folded,
            chars,
            origin,
            byte_to_char,
        }
    }
}

impl DictionaryMatcher {
    pub fn new(kb: &KnowledgeBase, cfg: &NerConfig) -> Self {
        let patterns: Vec<&str> = kb
            .aliases()
            .filter(|a| a.chars().count() >= cfg.min_match_length.max(1))
            .filter(|a| !cfg.stoplist.contains(*a))
            .collect();
        let automaton = (!patterns.is_empty()).then(|| {
            AhoCorasick::builder()
                .match_kind(MatchKind::Standard)
                .build(&patterns)
                .expect("alias automaton")
        });
        Self {
            automaton,
            normalizer: *kb.normalizer(),
            boundary_mode: cfg.boundary_mode,
        }
    }

    /// Non-overlapping tool mentions of `text`, in start order, ids `T1..Tn`.
    pub fn find(&self, text: &str, doc_id: &str) -> Vec<Mention> {
        let Some(automaton) = &self.automaton else {
            return Vec::new();
        };
        let view = FoldedText::new(text, &self.normalizer);
        let is_word = |i: usize| view.chars[i].is_alphanumeric();

        // Candidate spans in source char offsets.
        let mut candidates: Vec<(usize, usize)> = automaton
            .find_overlapping_iter(&view.folded)
            .filter_map(|m| {
                let (s, e) = (view.byte_to_char[m.start()], view.byte_to_char[m.end()]);
                if self.boundary_mode == BoundaryMode::TokenBoundary
                    && ((s > 0 && is_word(s - 1)) || (e < view.chars.len() && is_word(e)))
                {
                    return None;
                }
                Some((view.origin[s], view.origin[e - 1] + 1))
            })
            .collect();
        candidates.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)));
        candidates.dedup();

        let mut taken: Vec<(usize, usize)> = Vec::new();
        for (s, e) in candidates {
            if taken.iter().all(|&(ts, te)| e <= ts || te <= s) {
                taken.push((s, e));
            }
        }
        taken.sort_unstable();
        taken
            .into_iter()
            .enumerate()
            .map(|(i, (start, end))| Mention {
                mention_id: format!("T{}", i + 1),
                label: TOOL_LABEL.to_string(),
                start,
                end,
                surface: char_slice(text, start, end).to_string(),
                doc_id: doc_id.to_string(),
            })
            .collect()
    }
}

/// Maps the KB's aliases onto a document's text.
pub fn dictionary_ner(doc: &AnnotatedDocument, kb: &KnowledgeBase, cfg: &NerConfig) -> Vec<Mention> {
    DictionaryMatcher::new(kb, cfg).find(&doc.text, &doc.doc_id)
}
