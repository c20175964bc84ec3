//! Multinomial Naive Bayes and one-vs-rest logistic regression over sparse
//! feature rows, plus seeded train/test splitting.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::metrics::{evaluate_labels, EvalReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    NaiveBayes,
    LogReg,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 2] = [ClassifierKind::NaiveBayes, ClassifierKind::LogReg];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "nb",
            ClassifierKind::LogReg => "logreg",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "Naive Bayes",
            ClassifierKind::LogReg => "Logistic Regression",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" | "naive-bayes" => Ok(ClassifierKind::NaiveBayes),
            "logreg" | "lr" => Ok(ClassifierKind::LogReg),
            _ => Err(Error::Config(format!(
                "unknown classifier `{s}` (expected nb or logreg)"
            ))),
        }
    }
}

pub trait Classifier {
    /// Sorted class labels; predictions index into this.
    fn classes(&self) -> &[String];

    /// Per-class scores whose argmax is the prediction.
    fn scores(&self, row: &[(usize, f64)]) -> Vec<f64>;

    fn predict_index(&self, row: &[(usize, f64)]) -> usize {
        argmax(&self.scores(row))
    }

    fn predict(&self, x: &FeatureMatrix) -> Vec<String> {
        x.rows()
            .iter()
            .map(|r| self.classes()[self.predict_index(r)].clone())
            .collect()
    }
}

/// First index of the maximum.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn class_index<S: AsRef<str>>(x: &FeatureMatrix, y: &[S]) -> Result<(Vec<String>, Vec<usize>)> {
    if x.n_rows() != y.len() {
        return Err(Error::Training(format!(
            "{} rows but {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    let mut classes: Vec<String> = y.iter().map(|s| s.as_ref().to_string()).collect();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Training(format!(
            "need at least two classes, found {}",
            classes.len()
        )));
    }
    let idx = y
        .iter()
        .map(|s| {
            classes
                .binary_search_by(|c| c.as_str().cmp(s.as_ref()))
                .unwrap()
        })
        .collect();
    Ok((classes, idx))
}

#[derive(Debug, Clone)]
pub struct NaiveBayes {
    classes: Vec<String>,
    log_prior: Vec<f64>,
    /// `[class][feature]`
    log_likelihood: Vec<Vec<f64>>,
}

/// Multinomial Naive Bayes with additive smoothing `alpha`.
pub fn train_nb<S: AsRef<str>>(x: &FeatureMatrix, y: &[S], alpha: f64) -> Result<NaiveBayes> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Config(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let (classes, yi) = class_index(x, y)?;
    let k = classes.len();
    let v = x.n_cols;
    let mut doc_counts = vec![0usize; k];
    let mut feat = vec![vec![0.0f64; v]; k];
    for (row, &c) in x.rows().iter().zip(&yi) {
        doc_counts[c] += 1;
        for &(t, w) in row {
            feat[c][t] += w;
        }
    }
    let n = yi.len() as f64;
    let log_prior = doc_counts.iter().map(|&c| (c as f64 / n).ln()).collect();
    let log_likelihood = feat
        .into_iter()
        .map(|counts| {
            let denom = (counts.iter().sum::<f64>() + alpha * v as f64).ln();
            counts
                .into_iter()
                .map(|c| (c + alpha).ln() - denom)
                .collect()
        })
        .collect();
    Ok(NaiveBayes {
        classes,
        log_prior,
        log_likelihood,
    })
}

impl NaiveBayes {
    /// Joint log-probabilities, unnormalized.
    fn joint(&self, row: &[(usize, f64)]) -> Vec<f64> {
        self.log_prior
            .iter()
            .zip(&self.log_likelihood)
            .map(|(lp, ll)| {
                lp + row
                    .iter()
                    .filter(|(t, _)| *t < ll.len())
                    .map(|&(t, w)| w * ll[t])
                    .sum::<f64>()
            })
            .collect()
    }

    /// Posterior class probabilities.
    pub fn predict_proba(&self, row: &[(usize, f64)]) -> Vec<f64> {
        let j = self.joint(row);
        let m = j.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = j.iter().map(|x| (x - m).exp()).sum();
        j.iter().map(|x| (x - m).exp() / z).collect()
    }

    pub fn log_prior(&self) -> &[f64] {
        &self.log_prior
    }
}

impl Classifier for NaiveBayes {
    fn classes(&self) -> &[String] {
        &self.classes
    }

    fn scores(&self, row: &[(usize, f64)]) -> Vec<f64> {
        self.joint(row)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogRegConfig {
    pub l2: f64,
    pub epochs: usize,
    pub lr: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            l2: 1e-3,
            epochs: 300,
            lr: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LogReg {
    classes: Vec<String>,
    /// One weight vector and bias per class.
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    /// Loss of each one-vs-rest problem before every epoch and after the last.
    pub loss_history: Vec<Vec<f64>>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn dot(row: &[(usize, f64)], w: &[f64]) -> f64 {
    row.iter().map(|&(t, x)| x * w[t]).sum()
}

/// Mean binary cross-entropy plus `l2 / 2 * |w|^2`, with its gradient with
/// respect to the weights and the bias. Targets are 0 or 1.
pub fn binary_loss_and_grad(
    x: &FeatureMatrix,
    y: &[f64],
    w: &[f64],
    b: f64,
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = x.n_rows() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (row, &t) in x.rows().iter().zip(y) {
        let z = dot(row, w) + b;
        // -[t log s + (1 - t) log(1 - s)] = softplus(z) - t z
        loss += softplus(z) - t * z;
        let err = sigmoid(z) - t;
        for &(j, v) in row {
            gw[j] += err * v;
        }
        gb += err;
    }
    loss /= n;
    gb /= n;
    let mut reg = 0.0;
    for (g, &wj) in gw.iter_mut().zip(w) {
        *g = *g / n + l2 * wj;
        reg += wj * wj;
    }
    (loss + 0.5 * l2 * reg, gw, gb)
}

/// One-vs-rest logistic regression by full-batch gradient descent.
///
/// Weights start at zero and each bias at the log-odds of its class prior,
/// so an untrained model predicts the most frequent class.
pub fn train_logreg<S: AsRef<str>>(
    x: &FeatureMatrix,
    y: &[S],
    cfg: &LogRegConfig,
) -> Result<LogReg> {
    if !(cfg.lr > 0.0 && cfg.lr.is_finite() && cfg.l2 >= 0.0 && cfg.l2.is_finite()) {
        return Err(Error::Config(format!(
            "bad logistic regression settings {cfg:?}"
        )));
    }
    let (classes, yi) = class_index(x, y)?;
    let n = yi.len() as f64;
    let mut weights = Vec::with_capacity(classes.len());
    let mut bias = Vec::with_capacity(classes.len());
    let mut loss_history = Vec::with_capacity(classes.len());
    for (c, class) in classes.iter().enumerate() {
        let target: Vec<f64> = yi.iter().map(|&k| if k == c { 1.0 } else { 0.0 }).collect();
        let prior = target.iter().sum::<f64>() / n;
        let mut w = vec![0.0; x.n_cols];
        let mut b = (prior / (1.0 - prior)).ln();
        let mut history = Vec::with_capacity(cfg.epochs + 1);
        for epoch in 0..=cfg.epochs {
            let (loss, gw, gb) = binary_loss_and_grad(x, &target, &w, b, cfg.l2);
            if !loss.is_finite() {
                return Err(Error::Training(format!(
                    "non-finite loss for class `{}` at epoch {epoch}",
                    class
                )));
            }
            history.push(loss);
            if epoch == cfg.epochs {
                break;
            }
            for (wj, g) in w.iter_mut().zip(&gw) {
                *wj -= cfg.lr * g;
            }
            b -= cfg.lr * gb;
        }
        weights.push(w);
        bias.push(b);
        loss_history.push(history);
    }
    Ok(LogReg {
        classes,
        weights,
        bias,
        loss_history,
    })
}

impl LogReg {
    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }
}

impl Classifier for LogReg {
    fn classes(&self) -> &[String] {
        &self.classes
    }

    fn scores(&self, row: &[(usize, f64)]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| {
                let z: f64 = row
                    .iter()
                    .filter(|(t, _)| *t < w.len())
                    .map(|&(t, x)| x * w[t])
                    .sum();
                z + b
            })
            .collect()
    }
}

pub fn evaluate<C: Classifier + ?Sized, S: AsRef<str>>(
    model: &C,
    x_test: &FeatureMatrix,
    y_test: &[S],
) -> Result<EvalReport> {
    if x_test.n_rows() == 0 {
        return Err(Error::Contract("empty test set".into()));
    }
    if x_test.n_rows() != y_test.len() {
        return Err(Error::Contract(
            "test rows and labels differ in length".into(),
        ));
    }
    let pred = model.predict(x_test);
    let truth: Vec<&str> = y_test.iter().map(AsRef::as_ref).collect();
    let pred: Vec<&str> = pred.iter().map(String::as_str).collect();
    Ok(evaluate_labels(&truth, &pred))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
    pub test_fraction_permille: u32,
    pub stratified: bool,
}

/// Seeded train/test split. Stratified splits draw `round(n_c * fraction)`
/// test items from each class, keeping at least one item of every class in
/// the training side.
pub fn make_split<S: AsRef<str>>(
    labels: &[S],
    seed: u64,
    test_fraction: f64,
    stratified: bool,
) -> Result<Split> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Config(format!(
            "test fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    if labels.is_empty() {
        return Err(Error::Config("cannot split an empty corpus".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut take = |mut idx: Vec<usize>, rng: &mut ChaCha8Rng| {
        idx.shuffle(rng);
        let n_test = ((idx.len() as f64 * test_fraction).round() as usize).min(idx.len() - 1);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    };
    if stratified {
        let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            by_class.entry(l.as_ref()).or_default().push(i);
        }
        for (_, idx) in by_class {
            take(idx, &mut rng);
        }
    } else {
        take((0..labels.len()).collect(), &mut rng);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split {
        train,
        test,
        seed,
        test_fraction_permille: (test_fraction * 1000.0).round() as u32,
        stratified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{fit_vocabulary, transform, FeatureConfig, Scheme};
    use proptest::prelude::*;

    fn count_matrix(docs: &[&str]) -> (crate::features::Vocabulary, FeatureMatrix) {
        let v = fit_vocabulary(docs, Scheme::Count, &FeatureConfig::default()).unwrap();
        let m = transform(docs, &v);
        (v, m)
    }

    #[test]
    fn nb_two_document_toy() {
        // Character counts: "aa" -> a:2 (pos), "bb" -> b:2 (neg); V = 2, alpha = 1.
        // P(a|pos) = 3/4, P(a|neg) = 1/4, equal priors -> P(pos|"a") = 3/4.
        let x = FeatureMatrix::from_rows(Scheme::Count, 2, vec![vec![(0, 2.0)], vec![(1, 2.0)]]);
        let nb = train_nb(&x, &["pos", "neg"], 1.0).unwrap();
        let test = FeatureMatrix::from_rows(Scheme::Count, 2, vec![vec![(0, 1.0)]]);
        assert_eq!(nb.predict(&test), vec!["pos"]);
        let proba = nb.predict_proba(test.row(0));
        // classes sorted: ["neg", "pos"]
        assert!((proba[1] - 0.75).abs() < 1e-9);
        assert!((proba[0] - 0.25).abs() < 1e-9);
    }

    #[test]
    fn nb_identical_documents_follow_prior() {
        let (_, x) = count_matrix(&["x y", "x y", "x y"]);
        let nb = train_nb(&x, &["b", "a", "b"], 1.0).unwrap();
        assert_eq!(nb.predict(&x), vec!["b", "b", "b"]);
    }

    #[test]
    fn nb_huge_alpha_follows_prior() {
        let (_, x) = count_matrix(&["a a a", "b", "b", "a"]);
        let nb = train_nb(&x, &["pos", "neg", "neg", "neg"], 1e12).unwrap();
        assert_eq!(nb.predict(&x), vec!["neg"; 4]);
        let nb = train_nb(&x, &["pos", "neg", "neg", "neg"], 1.0).unwrap();
        assert_eq!(nb.predict(&x)[0], "pos");
    }

    #[test]
    fn nb_prior_scaling_keeps_argmax() {
        let (_, x) = count_matrix(&["a a b", "b c", "c c a", "a"]);
        let y = ["p", "q", "r", "p"];
        let nb = train_nb(&x, &y, 1.0).unwrap();
        let mut scaled = nb.clone();
        for lp in scaled.log_prior.iter_mut() {
            *lp += 3.7f64.ln();
        }
        assert_eq!(nb.predict(&x), scaled.predict(&x));
    }

    #[test]
    fn single_class_rejected() {
        let (_, x) = count_matrix(&["a", "b"]);
        assert!(matches!(
            train_nb(&x, &["s", "s"], 1.0),
            Err(Error::Training(_))
        ));
        assert!(matches!(
            train_logreg(&x, &["s", "s"], &LogRegConfig::default()),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn zero_epochs_predicts_prior() {
        let (_, x) = count_matrix(&["a", "b", "c", "d"]);
        let cfg = LogRegConfig {
            epochs: 0,
            ..Default::default()
        };
        let m = train_logreg(&x, &["q", "p", "q", "r"], &cfg).unwrap();
        assert_eq!(m.predict(&x), vec!["q"; 4]);
        // equal priors: lowest class index
        let m = train_logreg(&x, &["q", "p", "q", "p"], &cfg).unwrap();
        assert_eq!(m.predict(&x), vec!["p"; 4]);
    }

    fn separable() -> (FeatureMatrix, Vec<&'static str>) {
        let docs: Vec<String> = (0..20)
            .map(|i| {
                if i % 2 == 0 {
                    format!("good great w{i}")
                } else {
                    format!("bad awful w{i}")
                }
            })
            .collect();
        let v = fit_vocabulary(&docs, Scheme::TfidfWord, &FeatureConfig::default()).unwrap();
        let y = (0..20)
            .map(|i| if i % 2 == 0 { "pos" } else { "neg" })
            .collect();
        (transform(&docs, &v), y)
    }

    #[test]
    fn separable_toy_is_learned() {
        let (x, y) = separable();
        let cfg = LogRegConfig {
            epochs: 200,
            lr: 1.0,
            l2: 0.0,
        };
        let m = train_logreg(&x, &y, &cfg).unwrap();
        let report = evaluate(&m, &x, &y).unwrap();
        assert_eq!(report.macro_avg.f1, 1.0);
        for h in &m.loss_history {
            assert!(h.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let rows = vec![
            vec![(0, 1.0), (2, 0.5)],
            vec![(1, 2.0), (3, -1.0), (4, 0.3)],
            vec![(0, -0.7), (4, 1.5)],
            vec![(2, 1.1), (3, 0.2)],
        ];
        let x = FeatureMatrix::from_rows(Scheme::Count, 5, rows);
        let y = [1.0, 0.0, 1.0, 0.0];
        let w = [0.3, -0.2, 0.1, 0.4, -0.5];
        let b = 0.05;
        let l2 = 0.1;
        let (_, gw, gb) = binary_loss_and_grad(&x, &y, &w, b, l2);
        let h = 1e-6;
        for j in 0..5 {
            let mut wp = w;
            let mut wm = w;
            wp[j] += h;
            wm[j] -= h;
            let fd = (binary_loss_and_grad(&x, &y, &wp, b, l2).0
                - binary_loss_and_grad(&x, &y, &wm, b, l2).0)
                / (2.0 * h);
            assert!(
                (fd - gw[j]).abs() / gw[j].abs().max(1e-8) < 1e-5,
                "w{j}: {fd} vs {}",
                gw[j]
            );
        }
        let fd = (binary_loss_and_grad(&x, &y, &w, b + h, l2).0
            - binary_loss_and_grad(&x, &y, &w, b - h, l2).0)
            / (2.0 * h);
        assert!((fd - gb).abs() / gb.abs() < 1e-5);
    }

    #[test]
    fn nonfinite_loss_is_an_error() {
        let x =
            FeatureMatrix::from_rows(Scheme::Count, 1, vec![vec![(0, 1e200)], vec![(0, -1e200)]]);
        let cfg = LogRegConfig {
            epochs: 5,
            lr: 1e200,
            l2: 1.0,
        };
        assert!(matches!(
            train_logreg(&x, &["a", "b"], &cfg),
            Err(Error::Training(_))
        ));
    }

    #[test]
    fn split_one_per_class() {
        let labels: Vec<&str> = (0..10).map(|i| if i < 5 { "a" } else { "b" }).collect();
        let s = make_split(&labels, 7, 0.2, true).unwrap();
        assert_eq!(s.test.len(), 2);
        assert_eq!(s.test.iter().filter(|&&i| labels[i] == "a").count(), 1);
        assert_eq!(s, make_split(&labels, 7, 0.2, true).unwrap());
    }

    #[test]
    fn split_minority_class() {
        let labels: Vec<&str> = (0..10).map(|i| if i < 9 { "maj" } else { "min" }).collect();
        for seed in 0..20 {
            let s = make_split(&labels, seed, 0.5, true).unwrap();
            let minority = s.test.iter().filter(|&&i| labels[i] == "min").count();
            assert!(minority <= 1);
            assert!(s.train.iter().any(|&i| labels[i] == "min"));
        }
    }

    #[test]
    fn split_rejects_bad_fraction() {
        assert!(make_split(&["a", "b"], 0, 0.0, true).is_err());
        assert!(make_split(&["a", "b"], 0, 1.0, false).is_err());
    }

    proptest! {
        #[test]
        fn split_invariants(labels in proptest::collection::vec(0u8..4, 1..60), seed: u64, frac in 0.05f64..0.95, strat: bool) {
            let labels: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
            let s = make_split(&labels, seed, frac, strat).unwrap();
            let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
            if strat {
                let mut classes = labels.clone();
                classes.sort();
                classes.dedup();
                for c in classes {
                    let n = labels.iter().filter(|l| **l == c).count() as f64;
                    let t = s.test.iter().filter(|&&i| labels[i] == c).count() as f64;
                    prop_assert!((t - n * frac).abs() <= 1.0);
                }
            }
        }

        #[test]
        fn loss_never_increases(seed in 0u64..50) {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rows = Vec::new();
            for _ in 0..12 {
                let mut row = Vec::new();
                for j in 0..4 {
                    if rng.gen_bool(0.6) {
                        row.push((j, rng.gen_range(0.0..1.0)));
                    }
                }
                rows.push(row);
            }
            let x = FeatureMatrix::from_rows(Scheme::TfidfWord, 4, rows);
            let y: Vec<&str> = (0..12).map(|i| ["a", "b", "c"][i % 3]).collect();
            let m = train_logreg(&x, &y, &LogRegConfig { l2: 0.01, epochs: 50, lr: 0.5 }).unwrap();
            for h in &m.loss_history {
                prop_assert!(h.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            }
        }
    }
}
