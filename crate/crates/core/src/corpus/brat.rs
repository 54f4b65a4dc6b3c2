//! BRAT standoff text-bound annotations (`T` lines).

use std::collections::HashSet;
use std::fmt::Write;

use super::{char_slice, AnnotatedDocument, CorpusError, Mention, Modality};

/// Parses the `T` lines of an `.ann` file against `text`. Other annotation
/// kinds (relations, events, attributes, notes) are skipped.
pub fn parse_brat_mentions(
    text: &str,
    ann: &str,
    doc_id: &str,
) -> Result<Vec<Mention>, CorpusError> {
    let len = text.chars().count();
    let mut seen = HashSet::new();
    let mut mentions = Vec::new();
    for (idx, line) in ann.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if !line.starts_with('T') {
            continue;
        }
        let parse_err = |message: &str| CorpusError::Parse {
            doc: doc_id.to_string(),
            line: line_no,
            message: message.to_string(),
        };
        let mut fields = line.splitn(3, '\t');
        let id = fields.next().unwrap_or_default();
        let (Some(spec), Some(surface)) = (fields.next(), fields.next()) else {
            return Err(parse_err("expected `T<id>\\t<label> <start> <end>\\t<surface>`"));
        };
        if id.len() < 2 || !id[1..].chars().all(|c| c.is_ascii_alphanumeric()) {
            return Err(parse_err("malformed annotation id"));
        }
        let (label, offsets) = spec
            .split_once(' ')
            .ok_or_else(|| parse_err("missing offsets"))?;
        if label.is_empty() {
            return Err(parse_err("missing label"));
        }
        if offsets.contains(';') {
            return Err(CorpusError::Discontinuous {
                doc: doc_id.to_string(),
                id: id.to_string(),
            });
        }
        let mut nums = offsets.split(' ');
        let (Some(s), Some(e), None) = (nums.next(), nums.next(), nums.next()) else {
            return Err(parse_err("expected exactly two offsets"));
        };
        let start: usize = s.parse().map_err(|_| parse_err("start offset is not a number"))?;
        let end: usize = e.parse().map_err(|_| parse_err("end offset is not a number"))?;
        if start >= end || end > len {
            return Err(CorpusError::OutOfRange {
                doc: doc_id.to_string(),
                id: id.to_string(),
                start,
                end,
                len,
            });
        }
        let found = char_slice(text, start, end);
        if !surface_matches(surface, found) {
            return Err(CorpusError::Integrity {
                doc: doc_id.to_string(),
                id: id.to_string(),
                expected: surface.to_string(),
                found: found.to_string(),
            });
        }
        if !seen.insert(id.to_string()) {
            return Err(parse_err("duplicate annotation id"));
        }
        mentions.push(Mention {
            mention_id: id.to_string(),
            label: label.to_string(),
            start,
            end,
            surface: found.to_string(),
            doc_id: doc_id.to_string(),
        });
    }
    Ok(mentions)
}

// The .ann surface cannot hold line breaks or tabs; each one is written as a
// single space.
fn surface_matches(ann_surface: &str, text_span: &str) -> bool {
    ann_surface.chars().count() == text_span.chars().count()
        && ann_surface
            .chars()
            .zip(text_span.chars())
            .all(|(a, t)| a == t || (a == ' ' && t.is_whitespace()))
}

pub fn parse_brat(
    text: &str,
    ann: &str,
    doc_id: &str,
    workflow_id: &str,
    modality: Modality,
) -> Result<AnnotatedDocument, CorpusError> {
    let mentions = parse_brat_mentions(text, ann, doc_id)?;
    let mut doc = AnnotatedDocument::new(doc_id, workflow_id, modality, text);
    doc.mentions = mentions;
    Ok(doc)
}

/// Emits `T` lines sorted by `(start, end, label)` and numbered `T1..Tn`.
pub fn write_brat(doc: &AnnotatedDocument) -> String {
    let mut sorted: Vec<&Mention> = doc.mentions.iter().collect();
    sorted.sort_by(|a, b| (a.start, a.end, &a.label).cmp(&(b.start, b.end, &b.label)));
    let mut out = String::new();
    for (i, m) in sorted.iter().enumerate() {
        let surface: String = m
            .surface
            .chars()
            .map(|c| if c.is_whitespace() { ' ' } else { c })
            .collect();
        let _ = writeln!(out, "T{}\t{} {} {}\t{}", i + 1, m.label, m.start, m.end, surface);
    }
    out
}
