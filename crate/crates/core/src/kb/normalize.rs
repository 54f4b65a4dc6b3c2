//! Tool-name canonicalization shared by every matching stage.

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

/// Canonicalizes tool names before they are indexed or compared.
///
/// The default form is NFC-composed, lowercased, trimmed, with internal
/// whitespace runs collapsed to one space. Hyphens and underscores stay
/// distinct unless `unify_separators` is set, in which case `_` folds to `-`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NameNormalizer {
    #[serde(default)]
    pub unify_separators: bool,
}

impl NameNormalizer {
    pub const fn new(unify_separators: bool) -> Self {
        Self { unify_separators }
    }

    pub fn normalize(&self, raw: &str) -> String {
        let composed: String = raw.nfc().collect();
        let lowered: String = composed.to_lowercase().nfc().collect();
        let mut out = String::with_capacity(lowered.len());
        for word in lowered.split_whitespace() {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(word);
        }
        if self.unify_separators {
            out = out.replace('_', "-");
        }
        out
    }

    /// Per-character fold used when scanning running text. It agrees with
    /// [`normalize`](Self::normalize) on every character whose lowercase form
    /// is a single character; whitespace folds to a plain space.
    pub fn fold_char(&self, c: char) -> char {
        if c.is_whitespace() {
            return ' ';
        }
        let mut lower = c.to_lowercase();
        let folded = match (lower.next(), lower.next()) {
            (Some(l), None) => l,
            _ => c,
        };
        if self.unify_separators && folded == '_' {
            '-'
        } else {
            folded
        }
    }
}

/// Normalizes with the default (separator-preserving) settings.
pub fn normalize_name(raw: &str) -> String {
    NameNormalizer::default().normalize(raw)
}
