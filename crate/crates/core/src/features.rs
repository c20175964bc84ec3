//! Surface features: count vectors and TF-IDF over words, word n-grams and
//! character n-grams.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Raw word counts.
    Count,
    TfidfWord,
    TfidfWordNgram,
    TfidfCharNgram,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Count,
        Scheme::TfidfWord,
        Scheme::TfidfWordNgram,
        Scheme::TfidfCharNgram,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Count => "count",
            Scheme::TfidfWord => "tfidf-word",
            Scheme::TfidfWordNgram => "tfidf-word-ngram",
            Scheme::TfidfCharNgram => "tfidf-char-ngram",
        }
    }

    /// Row labels used in text reports.
    pub fn title(self) -> &'static str {
        match self {
            Scheme::Count => "Count Vectors",
            Scheme::TfidfWord => "WordLevel TF-IDF",
            Scheme::TfidfWordNgram => "N-Gram Vectors",
            Scheme::TfidfCharNgram => "CharLevel Vectors",
        }
    }

    pub fn is_tfidf(self) -> bool {
        self != Scheme::Count
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown feature scheme `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FeatureConfig {
    /// Inclusive n range for word n-grams.
    pub word_ngram: (usize, usize),
    /// Inclusive n range for character n-grams.
    pub char_ngram: (usize, usize),
    pub min_df: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            word_ngram: (2, 3),
            char_ngram: (2, 3),
            min_df: 1,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("word", self.word_ngram), ("char", self.char_ngram)] {
            if lo == 0 || lo > hi {
                return Err(Error::Config(format!(
                    "bad {name} n-gram range {lo}..={hi}"
                )));
            }
        }
        if self.min_df == 0 {
            return Err(Error::Config("min_df must be at least 1".into()));
        }
        Ok(())
    }
}

/// Terms a document contributes under a scheme, with repetition.
pub fn terms(doc: &str, scheme: Scheme, cfg: &FeatureConfig) -> Vec<String> {
    match scheme {
        Scheme::Count | Scheme::TfidfWord => doc.split_whitespace().map(str::to_string).collect(),
        Scheme::TfidfWordNgram => {
            let words: Vec<&str> = doc.split_whitespace().collect();
            let (lo, hi) = cfg.word_ngram;
            (lo..=hi)
                .flat_map(|n| words.windows(n).map(|w| w.join(" ")).collect::<Vec<_>>())
                .collect()
        }
        Scheme::TfidfCharNgram => {
            let chars: Vec<char> = doc.chars().collect();
            let (lo, hi) = cfg.char_ngram;
            (lo..=hi)
                .flat_map(|n| {
                    chars
                        .windows(n)
                        .map(|w| w.iter().collect())
                        .collect::<Vec<_>>()
                })
                .collect()
        }
    }
}

/// Sorted term list with document frequencies from the fitting corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Vocabulary {
    pub scheme: Scheme,
    pub config: FeatureConfig,
    terms: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    n_docs: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn doc_freq(&self, idx: usize) -> usize {
        self.doc_freq[idx]
    }

    /// `ln((1 + N) / (1 + df)) + 1`
    pub fn idf(&self, idx: usize) -> f64 {
        ((1 + self.n_docs) as f64 / (1 + self.doc_freq[idx]) as f64).ln() + 1.0
    }

    /// `term<TAB>index` lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, t) in self.terms.iter().enumerate() {
            writeln!(out, "{t}\t{i}")?;
        }
        Ok(())
    }
}

pub fn fit_vocabulary<S: AsRef<str> + Sync>(
    corpus: &[S],
    scheme: Scheme,
    cfg: &FeatureConfig,
) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::Config(
            "cannot fit a vocabulary on an empty corpus".into(),
        ));
    }
    cfg.validate()?;
    let df: BTreeMap<String, usize> = corpus
        .par_iter()
        .map(|doc| {
            terms(doc.as_ref(), scheme, cfg)
                .into_iter()
                .collect::<BTreeSet<String>>()
        })
        .fold(BTreeMap::new, |mut acc: BTreeMap<String, usize>, set| {
            for t in set {
                *acc.entry(t).or_default() += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (t, n) in b {
                *a.entry(t).or_default() += n;
            }
            a
        });

    let (terms, doc_freq): (Vec<String>, Vec<usize>) =
        df.into_iter().filter(|(_, n)| *n >= cfg.min_df).unzip();
    let index = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(Vocabulary {
        scheme,
        config: *cfg,
        terms,
        index,
        doc_freq,
        n_docs: corpus.len(),
    })
}

/// Sparse document-term matrix; each row is sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub scheme: Scheme,
    pub n_cols: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl FeatureMatrix {
    pub fn from_rows(scheme: Scheme, n_cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        FeatureMatrix {
            scheme,
            n_cols,
            rows,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn select(&self, idx: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            scheme: self.scheme,
            n_cols: self.n_cols,
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(d, r)| r.iter().map(move |&(t, w)| (d, t, w)))
    }

    /// `doc<TAB>term_index<TAB>weight` lines.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (d, t, w) in self.triples() {
            writeln!(out, "{d}\t{t}\t{w}")?;
        }
        Ok(())
    }

    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.n_cols];
        for &(t, w) in &self.rows[i] {
            v[t] = w;
        }
        v
    }
}

fn vectorize(doc: &str, vocab: &Vocabulary) -> Vec<(usize, f64)> {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for t in terms(doc, vocab.scheme, &vocab.config) {
        if let Some(i) = vocab.index_of(&t) {
            *counts.entry(i).or_default() += 1.0;
        }
    }
    let mut row: Vec<(usize, f64)> = counts.into_iter().collect();
    if vocab.scheme.is_tfidf() {
        for (i, w) in row.iter_mut() {
            *w *= vocab.idf(*i);
        }
        let norm = row.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, w) in row.iter_mut() {
                *w /= norm;
            }
        }
    }
    row
}

/// Vectorizes documents against a fitted vocabulary. Terms outside the
/// vocabulary are ignored.
pub fn transform<S: AsRef<str> + Sync>(corpus: &[S], vocab: &Vocabulary) -> FeatureMatrix {
    let rows = corpus
        .par_iter()
        .map(|doc| vectorize(doc.as_ref(), vocab))
        .collect();
    FeatureMatrix {
        scheme: vocab.scheme,
        n_cols: vocab.len(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> FeatureConfig {
        FeatureConfig::default()
    }

    #[test]
    fn word_vocabulary() {
        let v = fit_vocabulary(&["a b", "b c"], Scheme::Count, &cfg()).unwrap();
        assert_eq!(v.terms(), ["a", "b", "c"]);
    }

    #[test]
    fn char_bigrams() {
        let c = FeatureConfig {
            char_ngram: (2, 2),
            ..cfg()
        };
        let v = fit_vocabulary(&["ab"], Scheme::TfidfCharNgram, &c).unwrap();
        assert_eq!(v.terms(), ["ab"]);
    }

    #[test]
    fn char_ngrams_include_spaces() {
        let c = FeatureConfig {
            char_ngram: (2, 2),
            ..cfg()
        };
        let v = fit_vocabulary(&["a b"], Scheme::TfidfCharNgram, &c).unwrap();
        assert_eq!(v.terms(), [" b", "a "]);
    }

    #[test]
    fn word_ngrams_two_and_three() {
        let v = fit_vocabulary(&["w x y z"], Scheme::TfidfWordNgram, &cfg()).unwrap();
        let mut expected = vec!["w x", "x y", "y z", "w x y", "x y z"];
        expected.sort();
        assert_eq!(v.terms(), expected.as_slice());
    }

    #[test]
    fn empty_corpus_rejected() {
        let empty: [&str; 0] = [];
        assert!(fit_vocabulary(&empty, Scheme::Count, &cfg()).is_err());
    }

    #[test]
    fn min_df_filters() {
        let c = FeatureConfig { min_df: 2, ..cfg() };
        let v = fit_vocabulary(&["a b", "b c", "b a"], Scheme::Count, &c).unwrap();
        assert_eq!(v.terms(), ["a", "b"]);
    }

    #[test]
    fn counts() {
        let docs = ["a a b"];
        let v = fit_vocabulary(&docs, Scheme::Count, &cfg()).unwrap();
        let m = transform(&docs, &v);
        assert_eq!(m.row(0), &[(0, 2.0), (1, 1.0)]);
    }

    #[test]
    fn tfidf_by_hand() {
        // N = 2; "a" in both docs, "b" only in doc 0.
        // idf(a) = ln(3/3) + 1 = 1, idf(b) = ln(3/2) + 1
        // doc 0 = "a b": raw (1, 1.405465...) then L2-normalised
        let docs = ["a b", "a"];
        let v = fit_vocabulary(&docs, Scheme::TfidfWord, &cfg()).unwrap();
        let idf_b = 1.5f64.ln() + 1.0;
        assert!((v.idf(0) - 1.0).abs() < 1e-15);
        assert!((v.idf(1) - idf_b).abs() < 1e-15);
        let m = transform(&docs, &v);
        let norm = (1.0 + idf_b * idf_b).sqrt();
        let r0 = m.row(0);
        assert!((r0[0].1 - 1.0 / norm).abs() < 1e-12);
        assert!((r0[1].1 - idf_b / norm).abs() < 1e-12);
        assert_eq!(m.row(1), &[(0, 1.0)]);
    }

    #[test]
    fn unseen_terms_ignored() {
        let v = fit_vocabulary(&["a b"], Scheme::Count, &cfg()).unwrap();
        let m = transform(&["c a"], &v);
        assert_eq!(m.row(0), &[(0, 1.0)]);
    }

    #[test]
    fn tsv_export() {
        let docs = ["b a", "a"];
        let v = fit_vocabulary(&docs, Scheme::Count, &cfg()).unwrap();
        let m = transform(&docs, &v);
        let mut vb = Vec::new();
        v.write_tsv(&mut vb).unwrap();
        assert_eq!(String::from_utf8(vb).unwrap(), "a\t0\nb\t1\n");
        let mut mb = Vec::new();
        m.write_tsv(&mut mb).unwrap();
        assert_eq!(
            String::from_utf8(mb).unwrap(),
            "0\t0\t1\n0\t1\t1\n1\t0\t1\n"
        );
    }

    proptest! {
        #[test]
        fn matrix_invariants(docs in proptest::collection::vec("[abc ]{1,12}", 1..12), s in 0usize..4) {
            let scheme = Scheme::ALL[s];
            let v = fit_vocabulary(&docs, scheme, &cfg()).unwrap();
            prop_assert!(v.terms().windows(2).all(|w| w[0] < w[1]));
            let m = transform(&docs, &v);
            prop_assert_eq!(m.clone(), transform(&docs, &v));
            for (i, doc) in docs.iter().enumerate() {
                let row = m.row(i);
                let distinct: BTreeSet<String> = terms(doc, scheme, &cfg()).into_iter().collect();
                prop_assert!(row.len() <= distinct.len());
                prop_assert!(row.iter().all(|&(_, w)| w >= 0.0));
                if scheme.is_tfidf() && !row.is_empty() {
                    let n: f64 = row.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
                    prop_assert!((n - 1.0).abs() < 1e-9);
                }
                if !scheme.is_tfidf() {
                    prop_assert!(row.iter().all(|&(_, w)| w.fract() == 0.0));
                }
            }
            if scheme == Scheme::Count {
                for (t, term) in v.terms().iter().enumerate() {
                    let col: f64 = (0..m.n_rows()).map(|i| m.dense_row(i)[t]).sum();
                    let freq = docs.iter().map(|d| d.split_whitespace().filter(|w| w == term).count()).sum::<usize>();
                    prop_assert_eq!(col as usize, freq);
                }
            }
        }
    }
}
