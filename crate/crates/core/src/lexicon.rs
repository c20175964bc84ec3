//! Wordlist dictionaries with edit-distance suggestions, and unigram
//! frequency tables used to break English/Hindi ambiguity.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levenshtein::distance_within;
use crate::script::{has_devanagari, has_latin, is_devanagari, is_latin_letter, nfc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    English,
    DevanagariHindi,
}

impl Language {
    fn accepts_word(self, word: &str) -> bool {
        match self {
            Language::English => word.chars().all(|c| is_latin_letter(c) || c == '\''),
            Language::DevanagariHindi => word.chars().all(is_devanagari),
        }
    }

    /// Whether a query is written in this dictionary's script at all.
    fn same_script(self, word: &str) -> bool {
        match self {
            Language::English => !has_devanagari(word),
            Language::DevanagariHindi => has_devanagari(word) && !has_latin(word),
        }
    }

    fn normalize(self, word: &str) -> String {
        match self {
            Language::English => nfc(word).to_lowercase(),
            Language::DevanagariHindi => nfc(word),
        }
    }
}

/// Unigram counts for one language.
#[derive(Debug, Clone, Default)]
pub struct FrequencyModel {
    counts: HashMap<String, u64>,
}

impl FrequencyModel {
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut model = FrequencyModel::default();
        for (w, c) in counts {
            *model
                .counts
                .entry(nfc(w.as_ref()).to_lowercase())
                .or_default() += c;
        }
        model
    }

    /// Loads `word<TAB>count` lines. Repeated words accumulate.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (word, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, i as u64 + 1, "expected `word<TAB>count`"))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, i as u64 + 1, format!("bad count `{count}`")))?;
            pairs.push((word.trim().to_string(), count));
        }
        Ok(FrequencyModel::from_counts(pairs))
    }

    pub fn frequency(&self, word: &str) -> u64 {
        self.counts
            .get(word)
            .or_else(|| self.counts.get(&nfc(word).to_lowercase()))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// A set of known words in one language.
#[derive(Debug, Clone)]
pub struct Dictionary {
    language: Language,
    words: HashSet<String>,
    by_len: BTreeMap<usize, Vec<(String, Vec<char>)>>,
    max_suggest_distance: usize,
    ranking: Option<FrequencyModel>,
}

impl Dictionary {
    pub fn new<I, S>(language: Language, words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = HashSet::new();
        for w in words {
            let w = language.normalize(w.as_ref().trim());
            if w.is_empty() {
                continue;
            }
            if !language.accepts_word(&w) {
                return Err(Error::Config(format!(
                    "word `{w}` is not valid for a {language:?} dictionary"
                )));
            }
            set.insert(w);
        }
        Ok(Self::from_set(language, set))
    }

    fn from_set(language: Language, words: HashSet<String>) -> Self {
        let mut by_len: BTreeMap<usize, Vec<(String, Vec<char>)>> = BTreeMap::new();
        for w in &words {
            let chars: Vec<char> = w.chars().collect();
            by_len
                .entry(chars.len())
                .or_default()
                .push((w.clone(), chars));
        }
        for bucket in by_len.values_mut() {
            bucket.sort();
        }
        Dictionary {
            language,
            words,
            by_len,
            max_suggest_distance: 1,
            ranking: None,
        }
    }

    /// One word per line.
    pub fn load(language: Language, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut set = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let w = language.normalize(line.trim());
            if w.is_empty() {
                continue;
            }
            if !language.accepts_word(&w) {
                return Err(Error::parse(
                    path,
                    i as u64 + 1,
                    format!("`{w}` is not a valid {language:?} word"),
                ));
            }
            set.insert(w);
        }
        Ok(Self::from_set(language, set))
    }

    pub fn with_max_suggest_distance(mut self, distance: usize) -> Self {
        self.max_suggest_distance = distance;
        self
    }

    /// Breaks suggestion ties in favour of more frequent words.
    pub fn with_ranking(mut self, freq: FrequencyModel) -> Self {
        self.ranking = Some(freq);
        self
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn max_suggest_distance(&self) -> usize {
        self.max_suggest_distance
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    /// Exact membership; English lookups ignore case.
    pub fn detect(&self, word: &str) -> bool {
        if word.is_empty() {
            return false;
        }
        self.words.contains(word) || self.words.contains(&self.language.normalize(word))
    }

    /// Closest known word within the distance cap, or `None`.
    ///
    /// Ties go to the more frequent word when a ranking is attached, then to
    /// the lexicographically smaller one. Queries in a different script than
    /// the dictionary never match.
    pub fn suggest(&self, word: &str) -> Option<String> {
        let word = self.language.normalize(word);
        if word.is_empty() || !self.language.same_script(&word) {
            return None;
        }
        let query: Vec<char> = word.chars().collect();
        let cap = self.max_suggest_distance;
        let lo = query.len().saturating_sub(cap);
        let hi = query.len() + cap;
        let mut row = Vec::new();
        let mut best: Option<(usize, u64, &str)> = None;
        for bucket in self.by_len.range(lo..=hi).map(|(_, b)| b) {
            for (cand, chars) in bucket {
                let Some(d) = distance_within(&query, chars, cap, &mut row) else {
                    continue;
                };
                let freq = self.ranking.as_ref().map_or(0, |f| f.frequency(cand));
                let better = match best {
                    None => true,
                    Some((bd, bf, bw)) => {
                        (d, std::cmp::Reverse(freq), cand.as_str())
                            < (bd, std::cmp::Reverse(bf), bw)
                    }
                };
                if better {
                    best = Some((d, freq, cand));
                }
            }
        }
        best.map(|(_, _, w)| w.to_string())
    }
}
