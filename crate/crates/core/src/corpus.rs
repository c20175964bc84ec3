//! Corpus loading and the text-cleaning pass that runs before language
//! identification.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::script::{is_devanagari, is_latin_letter, nfc};

/// One social-media post.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Post {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Option<String>) -> Self {
        Post {
            id: id.into(),
            text: text.into(),
            label,
        }
    }
}

/// Column layout of a delimited corpus file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSchema {
    pub text_column: String,
    /// When set, the column must exist in the header.
    pub label_column: Option<String>,
    /// When unset, posts are numbered by record (1-based).
    pub id_column: Option<String>,
    pub delimiter: u8,
}

impl Default for CorpusSchema {
    fn default() -> Self {
        CorpusSchema {
            text_column: "text".into(),
            label_column: Some("label".into()),
            id_column: Some("id".into()),
            delimiter: b',',
        }
    }
}

impl CorpusSchema {
    pub fn unlabeled() -> Self {
        CorpusSchema {
            label_column: None,
            ..CorpusSchema::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    /// Data rows seen, including dropped and malformed ones.
    pub rows: usize,
    pub loaded: usize,
    pub dropped_empty: usize,
    pub errors: Vec<RowError>,
}

#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub posts: Vec<Post>,
    pub report: LoadReport,
}

/// Reads a delimited corpus with a header row.
///
/// Text is NFC-normalized. Rows whose text is blank are dropped and counted.
/// Malformed rows are recorded with their line number and skipped.
pub fn load_posts(path: impl AsRef<Path>, schema: &CorpusSchema) -> Result<LoadedCorpus> {
    let path = path.as_ref();
    let mut raw = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut raw))
        .map_err(|e| Error::io(path, e))?;
    read_posts(raw.as_slice(), schema)
}

pub fn read_posts<R: Read>(mut input: R, schema: &CorpusSchema) -> Result<LoadedCorpus> {
    let mut buf = Vec::new();
    input
        .read_to_end(&mut buf)
        .map_err(|e| Error::io("<input>", e))?;
    if buf.iter().all(u8::is_ascii_whitespace) {
        return Ok(LoadedCorpus {
            posts: Vec::new(),
            report: LoadReport::default(),
        });
    }

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(buf.as_slice());
    let headers = reader.headers()?.clone();
    let column = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Schema(format!("missing column `{name}`")))
    };
    let text_idx = column(&schema.text_column)?;
    let label_idx = schema.label_column.as_deref().map(column).transpose()?;
    let id_idx = schema.id_column.as_deref().map(column).transpose()?;

    let mut posts = Vec::new();
    let mut report = LoadReport::default();
    for (n, record) in reader.records().enumerate() {
        report.rows += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                report.errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let text = nfc(record.get(text_idx).unwrap_or(""));
        if text.trim().is_empty() {
            report.dropped_empty += 1;
            continue;
        }
        let id = match id_idx {
            Some(i) => record.get(i).unwrap_or("").to_string(),
            None => (n + 1).to_string(),
        };
        let label = label_idx.map(|i| record.get(i).unwrap_or("").to_string());
        posts.push(Post { id, text, label });
    }
    report.loaded = posts.len();
    Ok(LoadedCorpus { posts, report })
}

/// Reads a file written by [`write_posts`]: `id,text[,label]`.
pub fn load_canonical(path: impl AsRef<Path>) -> Result<LoadedCorpus> {
    let path = path.as_ref();
    let mut raw = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut raw))
        .map_err(|e| Error::io(path, e))?;
    let has_label = {
        let mut r = csv::ReaderBuilder::new().from_reader(raw.as_slice());
        r.headers()
            .map(|h| h.iter().any(|c| c == "label"))
            .unwrap_or(false)
    };
    let schema = if has_label {
        CorpusSchema::default()
    } else {
        CorpusSchema::unlabeled()
    };
    read_posts(raw.as_slice(), &schema)
}

/// Writes `id,text[,label]` CSV. The label column is present iff any post
/// carries a label.
pub fn write_posts<W: Write>(out: W, posts: &[Post]) -> Result<()> {
    let labeled = posts.iter().any(|p| p.label.is_some());
    let mut w = csv::Writer::from_writer(out);
    if labeled {
        w.write_record(["id", "text", "label"])?;
    } else {
        w.write_record(["id", "text"])?;
    }
    for p in posts {
        if labeled {
            w.write_record([&p.id, &p.text, p.label.as_deref().unwrap_or("")])?;
        } else {
            w.write_record([&p.id, &p.text])?;
        }
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}

fn is_url(token: &str) -> bool {
    token.starts_with("http://") || token.starts_with("https://") || token.starts_with("www.")
}

fn is_kept(c: char) -> bool {
    is_latin_letter(c) || is_devanagari(c) || c.is_ascii_digit() || c == '\''
}

/// Cleans one raw post.
///
/// Lowercases, drops URL and `@mention` tokens, replaces every character
/// that is not a Latin or Devanagari letter, digit or apostrophe with a
/// space, caps runs of the same character at two, and collapses whitespace.
pub fn clean_text(raw: &str) -> String {
    let lowered = nfc(raw).to_lowercase();

    let mut filtered = String::with_capacity(lowered.len());
    for token in lowered.split_whitespace() {
        if is_url(token) || token.starts_with('@') {
            continue;
        }
        filtered.extend(token.chars().map(|c| if is_kept(c) { c } else { ' ' }));
        filtered.push(' ');
    }

    let mut out = String::with_capacity(filtered.len());
    let mut prev: Option<char> = None;
    let mut run = 0usize;
    let mut pending_space = false;
    for c in filtered.chars() {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
            prev = None;
            run = 0;
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= 2 {
            out.push(c);
        }
    }
    out
}

/// Cleans every post and drops those left empty. Returns the number dropped.
pub fn clean_posts(posts: Vec<Post>) -> (Vec<Post>, usize) {
    let before = posts.len();
    let cleaned: Vec<Post> = posts
        .into_iter()
        .filter_map(|p| {
            let text = clean_text(&p.text);
            (!text.is_empty()).then_some(Post { text, ..p })
        })
        .collect();
    let dropped = before - cleaned.len();
    (cleaned, dropped)
}

pub fn write_posts_to(path: impl AsRef<Path>, posts: &[Post]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_posts(io::BufWriter::new(file), posts)
}
