use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Counts {
    pub fn new(tp: usize, fp: usize, fn_: usize) -> Self {
        Self { tp, fp, fn_ }
    }

    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn f1(&self) -> f64 {
        f1(self.precision(), self.recall())
    }
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts::new(self.tp + o.tp, self.fp + o.fp, self.fn_ + o.fn_)
    }
}

impl std::iter::Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Counts {
        iter.fold(Counts::default(), |a, b| a + b)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Sum counts over units, then compute the ratios.
    #[default]
    Micro,
    /// Average per-unit precision and recall; F1 is their harmonic mean.
    Macro,
}

impl FromStr for Averaging {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "micro" => Ok(Self::Micro),
            "macro" => Ok(Self::Macro),
            other => Err(format!("unknown averaging `{other}` (expected micro or macro)")),
        }
    }
}

/// Score of one workflow (or one document, for NER).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitScore {
    pub id: String,
    #[serde(flatten)]
    pub counts: Counts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl UnitScore {
    pub fn new(id: impl Into<String>, counts: Counts) -> Self {
        Self {
            id: id.into(),
            counts,
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub strategy: String,
    pub corpus: String,
    pub averaging: Averaging,
    #[serde(flatten)]
    pub counts: Counts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_workflow: Vec<UnitScore>,
}

impl EvalReport {
    /// Aggregates unit scores; counts are always summed.
    pub fn aggregate(units: Vec<UnitScore>, averaging: Averaging) -> Self {
        let counts: Counts = units.iter().map(|u| u.counts).sum();
        let (precision, recall) = match averaging {
            Averaging::Micro => (counts.precision(), counts.recall()),
            Averaging::Macro if units.is_empty() => (0.0, 0.0),
            Averaging::Macro => {
                let n = units.len() as f64;
                (
                    units.iter().map(|u| u.precision).sum::<f64>() / n,
                    units.iter().map(|u| u.recall).sum::<f64>() / n,
                )
            }
        };
        Self {
            strategy: String::new(),
            corpus: String::new(),
            averaging,
            counts,
            precision,
            recall,
            f1: f1(precision, recall),
            per_workflow: units,
        }
    }

    pub fn labeled(mut self, strategy: impl Into<String>, corpus: impl Into<String>) -> Self {
        self.strategy = strategy.into();
        self.corpus = corpus.into();
        self
    }

    /// One JSON object, no trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Console table: one row per report, percentages with one decimal.
pub fn format_table(reports: &[EvalReport]) -> String {
    let width = reports
        .iter()
        .map(|r| r.strategy.len().max(r.corpus.len()))
        .max()
        .unwrap_or(0)
        .max(8);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:<width$}  {:>5} {:>5} {:>5}  {:>6} {:>6} {:>6}",
        "strategy", "corpus", "TP", "FP", "FN", "P", "R", "F1"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<width$}  {:<width$}  {:>5} {:>5} {:>5}  {:>6.1} {:>6.1} {:>6.1}",
            r.strategy,
            r.corpus,
            r.counts.tp,
            r.counts.fp,
            r.counts.fn_,
            r.precision * 100.0,
            r.recall * 100.0,
            r.f1 * 100.0
        );
    }
    out
}
