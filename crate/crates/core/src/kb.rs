//! Roman-Hindi to Devanagari knowledge base: building from word-pair and
//! sentence-pair sources, pruning English-only keys, persistence, and a
//! length-bucketed index for fuzzy lookups.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::corpus::clean_text;
use crate::error::{Error, Result};
use crate::lexicon::Dictionary;
use crate::script::{has_devanagari, nfc};

/// Immutable Roman key to Devanagari value map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    entries: BTreeMap<String, String>,
    /// Keys grouped by length in codepoints; each bucket sorted.
    length_index: BTreeMap<usize, Vec<String>>,
}

fn normalize_key(key: &str) -> String {
    nfc(key.trim()).to_lowercase()
}

fn check_entry(key: &str, value: &str) -> std::result::Result<(), String> {
    if key.is_empty() {
        return Err("empty key".into());
    }
    if key.chars().any(char::is_whitespace) {
        return Err(format!("key `{key}` contains whitespace"));
    }
    if key.to_lowercase() != key {
        return Err(format!("key `{key}` is not lowercase"));
    }
    if !has_devanagari(value) {
        return Err(format!("value `{value}` has no Devanagari characters"));
    }
    Ok(())
}

impl KnowledgeBase {
    /// Builds from already-clean pairs. Keys are lowercased and NFC
    /// normalized; the first value for a key wins.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut entries = BTreeMap::new();
        for (k, v) in pairs {
            let key = normalize_key(k.as_ref());
            let value = nfc(v.as_ref().trim());
            check_entry(&key, &value).map_err(Error::Config)?;
            entries.entry(key).or_insert(value);
        }
        Ok(Self::from_entries(entries))
    }

    fn from_entries(entries: BTreeMap<String, String>) -> Self {
        let mut length_index: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        // BTreeMap iteration is sorted, so every bucket comes out sorted.
        for key in entries.keys() {
            length_index
                .entry(key.chars().count())
                .or_default()
                .push(key.clone());
        }
        KnowledgeBase {
            entries,
            length_index,
        }
    }

    pub fn lookup(&self, word: &str) -> Option<&str> {
        self.entries.get(word).map(String::as_str)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn length_index(&self) -> &BTreeMap<usize, Vec<String>> {
        &self.length_index
    }

    pub fn bucket(&self, len: usize) -> &[String] {
        self.length_index.get(&len).map_or(&[], Vec::as_slice)
    }

    /// Writes `roman<TAB>devanagari` lines in key order.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        for (k, v) in &self.entries {
            writeln!(w, "{k}\t{v}").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Strict loader for files produced by [`KnowledgeBase::save`]: any
    /// malformed line, invalid entry or repeated key is an error.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i as u64 + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, line_no, "expected `roman<TAB>devanagari`"))?;
            let key = normalize_key(k);
            let value = nfc(v.trim());
            check_entry(&key, &value).map_err(|m| Error::parse(path, line_no, m))?;
            if entries.insert(key, value).is_some() {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("duplicate key `{}`", k.trim()),
                ));
            }
        }
        Ok(Self::from_entries(entries))
    }
}

/// Input files for [`build_kb`], applied in this order: pair files, the
/// profanity list, then sentence pairs.
#[derive(Debug, Clone, Default)]
pub struct KbSources {
    pub pair_files: Vec<PathBuf>,
    pub sentence_pair_files: Vec<PathBuf>,
    pub profanity_file: Option<PathBuf>,
}

impl KbSources {
    fn validate(&self) -> Result<()> {
        if self.pair_files.is_empty()
            && self.sentence_pair_files.is_empty()
            && self.profanity_file.is_none()
        {
            return Err(Error::Config("no knowledge-base sources given".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    /// Valid pairs read from pair files and the profanity list.
    pub loaded: usize,
    /// Aligned token pairs taken from sentence files.
    pub from_sentences: usize,
    /// Sentence pairs whose token counts differ.
    pub skipped_unaligned: usize,
    pub malformed: usize,
    /// Repeated keys whose value differs from the one already kept.
    pub conflicts: usize,
    pub pruned: usize,
    #[serde(rename = "final")]
    pub final_count: usize,
}

struct Builder {
    entries: BTreeMap<String, String>,
    report: BuildReport,
}

impl Builder {
    fn insert(&mut self, key: String, value: String) {
        match self.entries.entry(key) {
            Entry::Vacant(e) => {
                e.insert(value);
            }
            Entry::Occupied(e) => {
                if *e.get() != value {
                    self.report.conflicts += 1;
                }
            }
        }
    }

    fn add_pair_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('\t') else {
                self.report.malformed += 1;
                continue;
            };
            let key = normalize_key(k);
            let value = nfc(v.trim());
            if check_entry(&key, &value).is_err() {
                self.report.malformed += 1;
                continue;
            }
            self.report.loaded += 1;
            self.insert(key, value);
        }
        Ok(())
    }

    /// Either column order is accepted; the side containing Devanagari is
    /// the value side.
    fn add_sentence_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let Some((a, b)) = line.split_once('\t') else {
                self.report.malformed += 1;
                continue;
            };
            let (roman, deva) = match (has_devanagari(a), has_devanagari(b)) {
                (false, true) => (a, b),
                (true, false) => (b, a),
                _ => {
                    self.report.malformed += 1;
                    continue;
                }
            };
            let roman = clean_text(roman);
            let deva = clean_text(deva);
            let rt: Vec<&str> = roman.split_whitespace().collect();
            let dt: Vec<&str> = deva.split_whitespace().collect();
            if rt.len() != dt.len() {
                self.report.skipped_unaligned += 1;
                continue;
            }
            for (k, v) in rt.into_iter().zip(dt) {
                let key = normalize_key(k);
                if check_entry(&key, v).is_err() {
                    self.report.malformed += 1;
                    continue;
                }
                self.report.from_sentences += 1;
                self.insert(key, v.to_string());
            }
        }
        Ok(())
    }
}

/// Builds the knowledge base and removes entries whose key is an English
/// word while the value is not a known Hindi word.
pub fn build_kb(
    sources: &KbSources,
    en_dict: &Dictionary,
    hi_dict: &Dictionary,
) -> Result<(KnowledgeBase, BuildReport)> {
    sources.validate()?;
    let mut b = Builder {
        entries: BTreeMap::new(),
        report: BuildReport::default(),
    };
    for p in &sources.pair_files {
        b.add_pair_file(p)?;
    }
    if let Some(p) = &sources.profanity_file {
        b.add_pair_file(p)?;
    }
    for p in &sources.sentence_pair_files {
        b.add_sentence_file(p)?;
    }

    let before = b.entries.len();
    b.entries
        .retain(|key, value| !(en_dict.detect(key) && !hi_dict.detect(value)));
    b.report.pruned = before - b.entries.len();
    b.report.final_count = b.entries.len();
    Ok((KnowledgeBase::from_entries(b.entries), b.report))
}
