//! Simplified Nextflow process extraction: finds top-level
//! `process NAME { ... }` blocks with string- and comment-aware brace matching.

use serde::{Deserialize, Serialize};

use super::CorpusError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessBlock {
    pub process_name: String,
    /// From the opening `{` to its matching `}`, inclusive.
    pub body: String,
    pub source_path: String,
    /// Char offset of the opening brace.
    pub body_start: usize,
    /// Char offset of the `process` keyword.
    pub decl_start: usize,
    /// Contents of the `script:`/`shell:` stanza, when there is one.
    pub script: Option<String>,
}

impl ProcessBlock {
    pub fn body_end(&self) -> usize {
        self.body_start + self.body.chars().count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lex {
    Code,
    Quoted,
    Comment,
}

// Classifies every char as code, string literal, or comment.
fn classify(src: &[char]) -> Vec<Lex> {
    let mut out = vec![Lex::Code; src.len()];
    let at = |i: usize, s: &str| s.chars().enumerate().all(|(k, c)| src.get(i + k) == Some(&c));
    let mut i = 0;
    while i < src.len() {
        let start = i;
        if at(i, "//") {
            while i < src.len() && src[i] != '\n' {
                i += 1;
            }
            out[start..i].fill(Lex::Comment);
        } else if at(i, "/*") {
            i += 2;
            while i < src.len() && !at(i, "*/") {
                i += 1;
            }
            i = (i + 2).min(src.len());
            out[start..i].fill(Lex::Comment);
        } else if src[i] == '"' || src[i] == '\'' {
            let q = src[i];
            let triple = src.get(i + 1) == Some(&q) && src.get(i + 2) == Some(&q);
            i += if triple { 3 } else { 1 };
            while i < src.len() {
                if src[i] == '\\' {
                    i += 2;
                    continue;
                }
                if triple {
                    if src[i] == q && src.get(i + 1) == Some(&q) && src.get(i + 2) == Some(&q) {
                        i += 3;
                        break;
                    }
                } else if src[i] == q {
                    i += 1;
                    break;
                } else if src[i] == '\n' {
                    // Unterminated single-line literal.
                    break;
                }
                i += 1;
            }
            i = i.min(src.len());
            out[start..i].fill(Lex::Quoted);
        } else {
            i += 1;
        }
    }
    out
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

// At a code position holding `process`, returns (name, brace offset).
fn match_declaration(src: &[char], lex: &[Lex], i: usize) -> Option<(String, usize)> {
    let kw: Vec<char> = "process".chars().collect();
    if src.get(i..i + kw.len())? != kw.as_slice() {
        return None;
    }
    if i > 0 && is_ident(src[i - 1]) {
        return None;
    }
    let code_ws = |j: usize| lex[j] == Lex::Code && src[j].is_whitespace();
    let mut j = i + kw.len();
    let ws_start = j;
    while j < src.len() && code_ws(j) {
        j += 1;
    }
    if j == ws_start || j >= src.len() || !is_ident_start(src[j]) || lex[j] != Lex::Code {
        return None;
    }
    let name_start = j;
    while j < src.len() && is_ident(src[j]) && lex[j] == Lex::Code {
        j += 1;
    }
    let name: String = src[name_start..j].iter().collect();
    while j < src.len() && code_ws(j) {
        j += 1;
    }
    (j < src.len() && src[j] == '{' && lex[j] == Lex::Code).then_some((name, j))
}

const STANZAS: &[&str] = &[
    "input", "output", "when", "script", "shell", "exec", "stub",
];

// Text following a `script:` or `shell:` label up to the next stanza label
// or the closing brace.
fn script_stanza(body: &[char], lex: &[Lex]) -> Option<String> {
    // (label, offset of the label's first char, offset just past its line)
    let mut labels: Vec<(String, usize, usize)> = Vec::new();
    let mut line_start = 0;
    for (i, &c) in body.iter().enumerate() {
        if c != '\n' && i + 1 != body.len() {
            continue;
        }
        let mut k = line_start;
        while k < i && body[k].is_whitespace() {
            k += 1;
        }
        if lex[k..i].iter().all(|l| *l == Lex::Code) {
            let line: String = body[k..i].iter().collect();
            if let Some(label) = line.trim_end().strip_suffix(':') {
                let label = label.trim_end();
                if STANZAS.contains(&label) {
                    labels.push((label.to_string(), k, i + 1));
                }
            }
        }
        line_start = i + 1;
    }
    let idx = labels
        .iter()
        .position(|(l, _, _)| l == "script" || l == "shell")?;
    let from = labels[idx].2;
    let to = labels
        .get(idx + 1)
        .map(|(_, label_at, _)| *label_at)
        .unwrap_or(body.len().saturating_sub(1));
    Some(body[from.min(to)..to].iter().collect())
}

/// Extracts every top-level process of one Nextflow file, in source order.
pub fn extract_processes(
    nextflow_source: &str,
    source_path: &str,
) -> Result<Vec<ProcessBlock>, CorpusError> {
    let src: Vec<char> = nextflow_source.chars().collect();
    let lex = classify(&src);
    let mut blocks = Vec::new();
    let mut depth = 0usize;
    let mut i = 0;
    while i < src.len() {
        if lex[i] != Lex::Code {
            i += 1;
            continue;
        }
        if depth == 0 {
            if let Some((name, brace)) = match_declaration(&src, &lex, i) {
                let mut d = 0usize;
                let mut close = None;
                for k in brace..src.len() {
                    if lex[k] != Lex::Code {
                        continue;
                    }
                    match src[k] {
                        '{' => d += 1,
                        '}' => {
                            d -= 1;
                            if d == 0 {
                                close = Some(k);
                                break;
                            }
                        }
                        _ => {}
                    }
                }
                let Some(close) = close else {
                    return Err(CorpusError::UnclosedProcess {
                        path: source_path.to_string(),
                        name,
                    });
                };
                let body_chars = &src[brace..=close];
                blocks.push(ProcessBlock {
                    process_name: name,
                    body: body_chars.iter().collect(),
                    source_path: source_path.to_string(),
                    body_start: brace,
                    decl_start: i,
                    script: script_stanza(body_chars, &lex[brace..=close]),
                });
                i = close + 1;
                continue;
            }
        }
        match src[i] {
            '{' => depth += 1,
            '}' => depth = depth.saturating_sub(1),
            _ => {}
        }
        i += 1;
    }
    Ok(blocks)
}
