//! Rule-based extraction of the Materials-and-Methods-type section from
//! plain article text with one heading per line.

use regex::Regex;

/// Heading patterns, matched against each trimmed line.
#[derive(Debug, Clone)]
pub struct SectionRules {
    pub start: Vec<Regex>,
    pub stop: Vec<Regex>,
}

const DEFAULT_START: &str = r"(?i)^(?:\d+(?:\.\d+)*\.?\s*)?(?:materials? and methods|methods and materials|methods|implementation)\s*[:.]?$";
const DEFAULT_STOP: &[&str] = &[
    r"(?i)^(?:\d+\.?\s*)?(?:results(?: and discussion)?|discussion|conclusions?|references|bibliography|acknowledge?ments?|availability(?: .*)?|data availability|funding|supplementary (?:data|material|information)|author contributions|competing interests|conflicts? of interest|abstract|introduction|background)\s*[:.]?$",
    // Numbered top-level heading ("3 Results", "4. Discussion"), not "2.1 Data".
    r"^\d+\.?\s+[A-Z][^.]{0,80}$",
    // All-caps heading line.
    r"^[A-Z][A-Z0-9 ,&:-]{3,60}$",
];

impl Default for SectionRules {
    fn default() -> Self {
        Self {
            start: vec![Regex::new(DEFAULT_START).expect("valid default pattern")],
            stop: DEFAULT_STOP
                .iter()
                .map(|p| Regex::new(p).expect("valid default pattern"))
                .collect(),
        }
    }
}

impl SectionRules {
    /// Case-insensitive start patterns with the default stop list.
    pub fn with_start_patterns<S: AsRef<str>>(patterns: &[S]) -> Result<Self, regex::Error> {
        let start = patterns
            .iter()
            .map(|p| Regex::new(&format!("(?i){}", p.as_ref())))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            start,
            ..Self::default()
        })
    }

    fn is_start(&self, line: &str) -> bool {
        self.start.iter().any(|r| r.is_match(line))
    }

    fn is_stop(&self, line: &str) -> bool {
        self.stop.iter().any(|r| r.is_match(line))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodsSection {
    pub text: String,
    /// Offset in Unicode scalar values.
    pub char_offset: usize,
    pub byte_offset: usize,
}

/// Returns the body between the first start heading and the next stop
/// heading (or end of text). Heading lines themselves are excluded.
pub fn extract_methods_section(full_text: &str, rules: &SectionRules) -> Option<MethodsSection> {
    let mut pos = 0;
    let mut begin = None;
    let mut end = full_text.len();
    for line in full_text.split_inclusive('\n') {
        let line_start = pos;
        pos += line.len();
        let trimmed = line.trim();
        match begin {
            None if rules.is_start(trimmed) => begin = Some(pos),
            Some(_) if rules.is_stop(trimmed) => {
                end = line_start;
                break;
            }
            _ => {}
        }
    }
    let begin = begin?;
    Some(MethodsSection {
        text: full_text[begin..end].to_string(),
        char_offset: full_text[..begin].chars().count(),
        byte_offset: begin,
    })
}
