//! Precision, recall, F1 and confusion matrices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Row and column order of the confusion matrices.
    pub labels: Vec<String>,
    pub per_class: BTreeMap<String, ClassMetrics>,
    #[serde(rename = "macro")]
    pub macro_avg: Averages,
    pub weighted: Averages,
    /// `confusion[true][predicted]`
    pub confusion: Vec<Vec<usize>>,
    /// Each row divided by its sum; all-zero rows stay zero.
    pub confusion_normalized: Vec<Vec<f64>>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

impl EvalReport {
    /// All metrics are derived from the matrix, so recomputing them from
    /// `confusion` reproduces the report exactly.
    pub fn from_confusion(labels: Vec<String>, confusion: Vec<Vec<usize>>) -> Self {
        let k = labels.len();
        assert_eq!(confusion.len(), k, "confusion matrix must be square");
        let total: usize = confusion.iter().flatten().sum();
        let mut per_class = BTreeMap::new();
        let mut rows = Vec::with_capacity(k);
        for (i, label) in labels.iter().enumerate() {
            let tp = confusion[i][i];
            let support: usize = confusion[i].iter().sum();
            let predicted: usize = confusion.iter().map(|row| row[i]).sum();
            let p = ratio(tp, predicted);
            let r = ratio(tp, support);
            let m = ClassMetrics {
                p,
                r,
                f1: harmonic(p, r),
                support,
            };
            rows.push(m);
            per_class.insert(label.clone(), m);
        }

        let n = k.max(1) as f64;
        let macro_avg = Averages {
            p: rows.iter().map(|m| m.p).sum::<f64>() / n,
            r: rows.iter().map(|m| m.r).sum::<f64>() / n,
            f1: rows.iter().map(|m| m.f1).sum::<f64>() / n,
        };
        let w = |f: fn(&ClassMetrics) -> f64| {
            if total == 0 {
                0.0
            } else {
                rows.iter().map(|m| f(m) * m.support as f64).sum::<f64>() / total as f64
            }
        };
        let weighted = Averages {
            p: w(|m| m.p),
            r: w(|m| m.r),
            f1: w(|m| m.f1),
        };
        let confusion_normalized = confusion
            .iter()
            .map(|row| {
                let s: usize = row.iter().sum();
                row.iter().map(|&c| ratio(c, s)).collect()
            })
            .collect();
        EvalReport {
            labels,
            per_class,
            macro_avg,
            weighted,
            confusion,
            confusion_normalized,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Scores predictions. The label set is the union of true and predicted
/// labels, sorted; a test label the model never saw simply has no correct
/// predictions.
pub fn evaluate_labels<S: AsRef<str>>(y_true: &[S], y_pred: &[S]) -> EvalReport {
    assert_eq!(y_true.len(), y_pred.len(), "label vectors differ in length");
    let labels: Vec<String> = y_true
        .iter()
        .chain(y_pred)
        .map(|s| s.as_ref().to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let pos = |s: &str| labels.binary_search_by(|l| l.as_str().cmp(s)).unwrap();
    let mut confusion = vec![vec![0usize; labels.len()]; labels.len()];
    for (t, p) in y_true.iter().zip(y_pred) {
        confusion[pos(t.as_ref())][pos(p.as_ref())] += 1;
    }
    EvalReport::from_confusion(labels, confusion)
}

/// One row of a results table.
#[derive(Debug, Clone)]
pub struct TableRow<'a> {
    pub classifier: &'a str,
    pub features: &'a str,
    pub report: &'a EvalReport,
}

/// Aligned text table: classifier, feature set, macro and weighted P/R/F1.
pub fn render_table(rows: &[TableRow<'_>]) -> String {
    let cw = rows
        .iter()
        .map(|r| r.classifier.len())
        .max()
        .unwrap_or(0)
        .max(10);
    let fw = rows
        .iter()
        .map(|r| r.features.len())
        .max()
        .unwrap_or(0)
        .max(8);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<cw$}  {:<fw$}  {:>6} {:>6} {:>6}  {:>6} {:>6} {:>6}",
        "Classifier", "Features", "P(m)", "R(m)", "F1(m)", "P(w)", "R(w)", "F1(w)"
    );
    let _ = writeln!(out, "{}", "-".repeat(cw + fw + 48));
    let mut last = "";
    for r in rows {
        let name = if r.classifier == last {
            ""
        } else {
            r.classifier
        };
        last = r.classifier;
        let (m, w) = (&r.report.macro_avg, &r.report.weighted);
        let _ = writeln!(
            out,
            "{:<cw$}  {:<fw$}  {:>6.2} {:>6.2} {:>6.2}  {:>6.2} {:>6.2} {:>6.2}",
            name, r.features, m.p, m.r, m.f1, w.p, w.r, w.f1
        );
    }
    out
}

/// Per-class precision, recall and F1 followed by the row-normalized
/// confusion matrix.
pub fn render_per_class(report: &EvalReport) -> String {
    let lw = report
        .labels
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max(5);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<lw$}  {:>6} {:>6} {:>6} {:>8}",
        "Class", "P", "R", "F1", "Support"
    );
    for l in &report.labels {
        let m = &report.per_class[l];
        let _ = writeln!(
            out,
            "{:<lw$}  {:>6.2} {:>6.2} {:>6.2} {:>8}",
            l, m.p, m.r, m.f1, m.support
        );
    }
    let _ = writeln!(out);
    let _ = write!(out, "{:<lw$} ", "");
    for l in &report.labels {
        let _ = write!(out, " {l:>lw$}");
    }
    let _ = writeln!(out);
    for (l, row) in report.labels.iter().zip(&report.confusion_normalized) {
        let _ = write!(out, "{l:<lw$} ");
        for v in row {
            let _ = write!(out, " {v:>lw$.2}");
        }
        let _ = writeln!(out);
    }
    out
}
