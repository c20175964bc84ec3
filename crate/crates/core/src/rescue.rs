//! Moves out-of-vocabulary Roman words onto the closest knowledge-base key
//! when their Levenshtein similarity clears a threshold.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::langid::{LanguageTag, Step, TaggedToken};
use crate::script::has_latin;

use crate::levenshtein::{distance_within, similarity_from};
pub use crate::levenshtein::{lev_distance, lev_similarity};

pub const DEFAULT_THRESHOLD: f64 = 0.70;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescueConfig {
    threshold: f64,
}

impl Default for RescueConfig {
    fn default() -> Self {
        RescueConfig {
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl RescueConfig {
    /// Threshold must lie strictly between 0 and 1.
    pub fn new(threshold: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::Config(format!(
                "threshold must be in (0, 1), got {threshold}"
            )));
        }
        Ok(RescueConfig { threshold })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Upper bound on similarity for two lengths, since the distance is at
    /// least the length difference.
    fn length_admits(&self, a: usize, b: usize) -> bool {
        similarity_from(a.abs_diff(b), a.max(b)) > self.threshold
    }

    /// Largest distance that still scores above the threshold for this
    /// longer length.
    fn distance_limit(&self, max_len: usize) -> Option<usize> {
        (0..=max_len)
            .rev()
            .find(|&d| similarity_from(d, max_len) > self.threshold)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RescueResult {
    pub matched_key: String,
    pub devanagari: String,
    pub similarity: f64,
}

/// Keys whose length could possibly reach the threshold against `word`,
/// in lexicographic order.
pub fn fuzzy_candidates<'a>(
    word: &str,
    kb: &'a KnowledgeBase,
    cfg: &RescueConfig,
) -> impl Iterator<Item = &'a str> + 'a {
    let len = word.chars().count();
    let cfg = *cfg;
    kb.length_index()
        .iter()
        .filter(move |(&k, _)| cfg.length_admits(len, k))
        .map(|(_, bucket)| bucket.iter().map(String::as_str))
        .kmerge()
}

/// Best knowledge-base match for a word, or `None` if nothing scores
/// strictly above the threshold. Among equal scores the lexicographically
/// smallest key wins.
pub fn best_match(word: &str, kb: &KnowledgeBase, cfg: &RescueConfig) -> Option<RescueResult> {
    let query: Vec<char> = word.chars().collect();
    if query.is_empty() {
        return None;
    }
    let mut row = Vec::new();
    let mut cand = Vec::new();
    let mut best: Option<(f64, &str)> = None;
    for key in fuzzy_candidates(word, kb, cfg) {
        cand.clear();
        cand.extend(key.chars());
        let max_len = query.len().max(cand.len());
        let Some(limit) = cfg.distance_limit(max_len) else {
            continue;
        };
        let Some(d) = distance_within(&query, &cand, limit, &mut row) else {
            continue;
        };
        let sim = similarity_from(d, max_len);
        // Keys arrive in order, so strict improvement keeps the first key
        // seen at the best score.
        if sim > cfg.threshold && best.is_none_or(|(s, _)| sim > s) {
            best = Some((sim, key));
        }
    }
    best.map(|(similarity, key)| RescueResult {
        matched_key: key.to_string(),
        devanagari: kb.lookup(key).unwrap_or_default().to_string(),
        similarity,
    })
}

fn apply(mut token: TaggedToken, found: Option<&RescueResult>) -> TaggedToken {
    match found {
        Some(r) => {
            token.tag = LanguageTag::RomHindi;
            token.corrected = r.matched_key.clone();
            token.devanagari = Some(r.devanagari.clone());
            token.trace.push(Step::RescueMatched);
        }
        None => {
            token.tag = LanguageTag::Na;
            token.trace.push(Step::RescueFailed);
        }
    }
    token
}

/// Resolves one OOV token to ROM_HINDI or NA. Tokens with other tags are
/// returned unchanged; OOV tokens without Latin letters always become NA.
pub fn rescue_oov(token: TaggedToken, kb: &KnowledgeBase, cfg: &RescueConfig) -> TaggedToken {
    if token.tag != LanguageTag::Oov {
        return token;
    }
    let found = if has_latin(&token.corrected) {
        best_match(&token.corrected, kb, cfg)
    } else {
        None
    };
    apply(token, found.as_ref())
}

/// One line of the optional rescue trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RescueTrace {
    pub surface: String,
    pub matched_key: Option<String>,
    pub similarity: Option<f64>,
    pub tag: LanguageTag,
}

/// Rescues every OOV token across many posts. Distinct OOV spellings are
/// matched once, in parallel; the result is identical to rescuing token by
/// token in order.
pub fn rescue_all(
    posts: Vec<Vec<TaggedToken>>,
    kb: &KnowledgeBase,
    cfg: &RescueConfig,
) -> (Vec<Vec<TaggedToken>>, Vec<RescueTrace>) {
    let distinct: BTreeSet<&str> = posts
        .iter()
        .flatten()
        .filter(|t| t.tag == LanguageTag::Oov && has_latin(&t.corrected))
        .map(|t| t.corrected.as_str())
        .collect();
    let matches: HashMap<String, Option<RescueResult>> = distinct
        .into_par_iter()
        .map(|w| (w.to_string(), best_match(w, kb, cfg)))
        .collect();

    let mut trace = Vec::new();
    let posts = posts
        .into_iter()
        .map(|tokens| {
            tokens
                .into_iter()
                .map(|t| {
                    if t.tag != LanguageTag::Oov {
                        return t;
                    }
                    let found = matches.get(&t.corrected).and_then(Option::as_ref);
                    let out = apply(t, found);
                    trace.push(RescueTrace {
                        surface: out.surface.clone(),
                        matched_key: found.map(|r| r.matched_key.clone()),
                        similarity: found.map(|r| r.similarity),
                        tag: out.tag,
                    });
                    out
                })
                .collect()
        })
        .collect();
    (posts, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kb(pairs: &[(&str, &str)]) -> KnowledgeBase {
        KnowledgeBase::from_pairs(pairs.iter().copied()).unwrap()
    }

    fn oov(word: &str) -> TaggedToken {
        TaggedToken {
            surface: word.into(),
            corrected: word.into(),
            tag: LanguageTag::Oov,
            devanagari: None,
            trace: vec![],
        }
    }

    /// Scans every key in order and keeps the first strictly better score.
    fn exhaustive(word: &str, kb: &KnowledgeBase, t: f64) -> Option<(String, f64)> {
        let mut best: Option<(String, f64)> = None;
        let mut max_sim = 0.0;
        for key in kb.keys() {
            let sim = lev_similarity(word, key);
            if sim > t && sim > max_sim {
                max_sim = sim;
                best = Some((key.to_string(), sim));
            }
        }
        best
    }

    #[test]
    fn namaste_variants() {
        let kb = kb(&[("namaste", "नमस्ते")]);
        let cfg = RescueConfig::default();
        for w in ["namste", "namastey", "namuste"] {
            let t = rescue_oov(oov(w), &kb, &cfg);
            assert_eq!(t.tag, LanguageTag::RomHindi, "{w}");
            assert_eq!(t.devanagari.as_deref(), Some("नमस्ते"));
            assert_eq!(t.corrected, "namaste");
            assert_eq!(t.surface, w);
            assert_eq!(t.replay(), Some(LanguageTag::RomHindi));
        }
        let t = rescue_oov(oov("nafrat"), &kb, &cfg);
        assert_eq!(t.tag, LanguageTag::Na);
        assert_eq!(t.corrected, "nafrat");
        assert_eq!(t.replay(), Some(LanguageTag::Na));
    }

    #[test]
    fn exactly_at_threshold_is_rejected() {
        // 10 characters, 3 substitutions: similarity is exactly 0.7
        let kb = kb(&[("abcdefghij", "क")]);
        assert_eq!(lev_distance("abcdefgxyz", "abcdefghij"), 3);
        assert_eq!(lev_similarity("abcdefgxyz", "abcdefghij"), 0.7);
        let t = rescue_oov(oov("abcdefgxyz"), &kb, &RescueConfig::default());
        assert_eq!(t.tag, LanguageTag::Na);
        let t = rescue_oov(oov("abcdefghyz"), &kb, &RescueConfig::default());
        assert_eq!(t.tag, LanguageTag::RomHindi);
    }

    #[test]
    fn ties_go_to_smaller_key() {
        let kb = kb(&[("kaam", "काम"), ("naam", "नाम")]);
        let r = best_match("xaam", &kb, &RescueConfig::default()).unwrap();
        assert_eq!(r.matched_key, "kaam");
    }

    #[test]
    fn devanagari_oov_becomes_na() {
        let kb = kb(&[("namaste", "नमस्ते")]);
        let t = rescue_oov(oov("नमसत"), &kb, &RescueConfig::default());
        assert_eq!(t.tag, LanguageTag::Na);
    }

    #[test]
    fn non_oov_untouched() {
        let kb = kb(&[("namaste", "नमस्ते")]);
        let mut t = oov("namste");
        t.tag = LanguageTag::English;
        assert_eq!(rescue_oov(t.clone(), &kb, &RescueConfig::default()), t);
    }

    #[test]
    fn threshold_validation() {
        assert!(RescueConfig::new(1.5).is_err());
        assert!(RescueConfig::new(0.0).is_err());
        assert!(RescueConfig::new(1.0).is_err());
        assert!(RescueConfig::new(f64::NAN).is_err());
        assert!(RescueConfig::new(0.7).is_ok());
    }

    #[test]
    fn candidate_lengths_for_seven_letters() {
        let words: Vec<String> = (1..=14).map(|n| "a".repeat(n)).collect();
        let kb = kb(&words.iter().map(|w| (w.as_str(), "क")).collect::<Vec<_>>());
        let lens: Vec<usize> = fuzzy_candidates("abcdefg", &kb, &RescueConfig::default())
            .map(|k| k.len())
            .sorted()
            .collect();
        // |l - 7| < 0.3 * max(l, 7) holds for l in 6..=9 strictly;
        // l = 5 gives 2 < 2.1, l = 10 gives 3 < 3.0 (false).
        let expected: Vec<usize> = (1..=14usize)
            .filter(|&l| (l.abs_diff(7) as f64) < 0.3 * (l.max(7) as f64) - 1e-12)
            .collect();
        assert_eq!(expected, vec![5, 6, 7, 8, 9]);
        assert_eq!(lens, expected);
    }

    #[test]
    fn near_one_threshold_keeps_equal_lengths() {
        let kb = kb(&[("ab", "क"), ("abc", "क"), ("abd", "क"), ("abcd", "क")]);
        let cfg = RescueConfig::new(0.999).unwrap();
        let got: Vec<&str> = fuzzy_candidates("xyz", &kb, &cfg).collect();
        assert_eq!(got, vec!["abc", "abd"]);
    }

    #[test]
    fn rescue_all_matches_per_token() {
        let kb = kb(&[("namaste", "नमस्ते"), ("liye", "लिए")]);
        let cfg = RescueConfig::default();
        let mut english = oov("weather");
        english.tag = LanguageTag::English;
        let posts = vec![
            vec![oov("namste"), english.clone(), oov("lye")],
            vec![oov("nafrat"), oov("namste")],
        ];
        let expected: Vec<Vec<TaggedToken>> = posts
            .iter()
            .map(|p| {
                p.iter()
                    .cloned()
                    .map(|t| rescue_oov(t, &kb, &cfg))
                    .collect()
            })
            .collect();
        let (got, trace) = rescue_all(posts, &kb, &cfg);
        assert_eq!(got, expected);
        assert_eq!(trace.len(), 4);
        assert!(got.iter().flatten().all(|t| t.tag != LanguageTag::Oov));
    }

    proptest! {
        #[test]
        fn candidates_are_sorted_and_sound(
            keys in proptest::collection::btree_set("[abc]{1,9}", 1..60),
            word in "[abc]{1,9}",
            t in 0.3f64..0.95,
        ) {
            let kb = kb(&keys.iter().map(|k| (k.as_str(), "क")).collect::<Vec<_>>());
            let cfg = RescueConfig::new(t).unwrap();
            let cands: Vec<&str> = fuzzy_candidates(&word, &kb, &cfg).collect();
            prop_assert!(cands.windows(2).all(|w| w[0] < w[1]));
            for k in kb.keys() {
                if !cands.contains(&k) {
                    prop_assert!(lev_similarity(&word, k) <= t);
                }
            }
            let got = best_match(&word, &kb, &cfg).map(|r| (r.matched_key, r.similarity));
            prop_assert_eq!(got, exhaustive(&word, &kb, t));
        }
    }
}
