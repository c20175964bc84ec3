//! Levenshtein distance over Unicode scalar values.

use std::cmp::min;

/// Minimum number of single-character insertions, deletions and
/// substitutions turning `a` into `b`. Characters are codepoints, so a
/// Devanagari matra counts as one edit.
pub fn lev_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    distance_chars(&a, &b)
}

pub fn distance_chars(a: &[char], b: &[char]) -> usize {
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let next = min(min(row[j], row[j + 1]) + 1, diag + usize::from(ca != cb));
            diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[b.len()]
}

/// Distance if it is at most `limit`, otherwise `None`. Stops as soon as
/// every cell of the current row exceeds the limit.
pub fn distance_within(
    a: &[char],
    b: &[char],
    limit: usize,
    row: &mut Vec<usize>,
) -> Option<usize> {
    if a.len().abs_diff(b.len()) > limit {
        return None;
    }
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    if b.is_empty() {
        return (a.len() <= limit).then_some(a.len());
    }
    row.clear();
    row.extend(0..=b.len());
    for (i, &ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        let mut best = row[0];
        for (j, &cb) in b.iter().enumerate() {
            let next = min(min(row[j], row[j + 1]) + 1, diag + usize::from(ca != cb));
            diag = row[j + 1];
            row[j + 1] = next;
            best = best.min(next);
        }
        if best > limit {
            return None;
        }
    }
    let d = row[b.len()];
    (d <= limit).then_some(d)
}

/// `1 - distance / max(len)`; two empty strings are identical.
pub fn lev_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    similarity_from(distance_chars(&a, &b), a.len().max(b.len()))
}

/// Similarity for a known distance and longer length. Every comparison in
/// the crate goes through this so that bounds and scores round identically.
#[inline]
pub fn similarity_from(distance: usize, max_len: usize) -> f64 {
    if max_len == 0 {
        1.0
    } else {
        1.0 - distance as f64 / max_len as f64
    }
}
