//! Word-level language identification and English/Hindi disambiguation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Post;
use crate::kb::KnowledgeBase;
use crate::lexicon::{Dictionary, FrequencyModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LanguageTag {
    #[serde(rename = "ENGLISH")]
    English,
    #[serde(rename = "DEV_HINDI")]
    DevHindi,
    #[serde(rename = "ROM_HINDI")]
    RomHindi,
    #[serde(rename = "OOV")]
    Oov,
    /// Only assigned by OOV rescue when no knowledge-base key is close enough.
    #[serde(rename = "NA")]
    Na,
}

impl LanguageTag {
    pub fn as_str(self) -> &'static str {
        match self {
            LanguageTag::English => "ENGLISH",
            LanguageTag::DevHindi => "DEV_HINDI",
            LanguageTag::RomHindi => "ROM_HINDI",
            LanguageTag::Oov => "OOV",
            LanguageTag::Na => "NA",
        }
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for LanguageTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "ENGLISH" => LanguageTag::English,
            "DEV_HINDI" => LanguageTag::DevHindi,
            "ROM_HINDI" => LanguageTag::RomHindi,
            "OOV" => LanguageTag::Oov,
            "NA" => LanguageTag::Na,
            _ => return Err(format!("unknown tag `{s}`")),
        })
    }
}

/// One decision taken while tagging a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    HindiDetected,
    HindiSuggested,
    EnglishDetected,
    EnglishSuggested,
    KbHit,
    FrequencyEnglish,
    /// Hindi frequency was greater or equal.
    FrequencyHindi,
    RescueMatched,
    RescueFailed,
}

/// Which terminal branch a tagged word went through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    DevHindiDetected,
    DevHindiSuggested,
    EnglishDetected,
    EnglishSuggested,
    RomHindiKb,
    AmbiguousEnglish,
    AmbiguousRomHindi,
    Oov,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub surface: String,
    pub corrected: String,
    pub tag: LanguageTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub devanagari: Option<String>,
    #[serde(skip)]
    pub trace: Vec<Step>,
}

impl TaggedToken {
    /// Recomputes the tag from the trace alone.
    pub fn replay(&self) -> Option<LanguageTag> {
        replay(&self.trace)
    }

    pub fn branch(&self) -> Option<Branch> {
        branch(&self.trace)
    }
}

fn has(trace: &[Step], s: Step) -> bool {
    trace.contains(&s)
}

pub fn branch(trace: &[Step]) -> Option<Branch> {
    use Step::*;
    if has(trace, HindiDetected) {
        return Some(Branch::DevHindiDetected);
    }
    if has(trace, HindiSuggested) {
        return Some(Branch::DevHindiSuggested);
    }
    let english = has(trace, EnglishDetected) || has(trace, EnglishSuggested);
    let hindi = has(trace, KbHit);
    Some(match (english, hindi) {
        (true, false) if has(trace, EnglishDetected) => Branch::EnglishDetected,
        (true, false) => Branch::EnglishSuggested,
        (false, true) => Branch::RomHindiKb,
        (true, true) if has(trace, FrequencyEnglish) => Branch::AmbiguousEnglish,
        (true, true) if has(trace, FrequencyHindi) => Branch::AmbiguousRomHindi,
        (true, true) => return None,
        (false, false) => Branch::Oov,
    })
}

/// Tag implied by a trace, including any rescue steps appended to it.
pub fn replay(trace: &[Step]) -> Option<LanguageTag> {
    if has(trace, Step::RescueMatched) {
        return Some(LanguageTag::RomHindi);
    }
    if has(trace, Step::RescueFailed) {
        return Some(LanguageTag::Na);
    }
    Some(match branch(trace)? {
        Branch::DevHindiDetected | Branch::DevHindiSuggested => LanguageTag::DevHindi,
        Branch::EnglishDetected | Branch::EnglishSuggested | Branch::AmbiguousEnglish => {
            LanguageTag::English
        }
        Branch::RomHindiKb | Branch::AmbiguousRomHindi => LanguageTag::RomHindi,
        Branch::Oov => LanguageTag::Oov,
    })
}

/// Everything the tagger consults. Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Resources {
    pub kb: KnowledgeBase,
    pub en_dict: Dictionary,
    pub hi_dict: Dictionary,
    pub freq_en: FrequencyModel,
    /// Counts keyed by the Roman spelling of Hindi words.
    pub freq_hi: FrequencyModel,
}

impl Resources {
    pub fn tag_word(&self, word: &str) -> TaggedToken {
        tag_word(
            word,
            &self.kb,
            &self.en_dict,
            &self.hi_dict,
            &self.freq_en,
            &self.freq_hi,
        )
    }

    pub fn tag_post(&self, post: &Post) -> Vec<TaggedToken> {
        tag_text(&post.text, self)
    }
}

/// Tags a single cleaned token.
///
/// Devanagari detection and correction are tried first and end the search.
/// Otherwise the English dictionary and the knowledge base are each
/// consulted; a word claimed by both goes to whichever language has the
/// strictly higher frequency, with ties resolved to Hindi. The knowledge
/// base is queried with the surface spelling, not the English correction.
pub fn tag_word(
    word: &str,
    kb: &KnowledgeBase,
    en_dict: &Dictionary,
    hi_dict: &Dictionary,
    freq_en: &FrequencyModel,
    freq_hi: &FrequencyModel,
) -> TaggedToken {
    let mut trace = Vec::with_capacity(3);
    let token = |corrected: String, tag, devanagari, trace| TaggedToken {
        surface: word.to_string(),
        corrected,
        tag,
        devanagari,
        trace,
    };

    if hi_dict.detect(word) {
        trace.push(Step::HindiDetected);
        return token(
            word.to_string(),
            LanguageTag::DevHindi,
            Some(word.to_string()),
            trace,
        );
    }
    if let Some(fixed) = hi_dict.suggest(word) {
        trace.push(Step::HindiSuggested);
        return token(fixed.clone(), LanguageTag::DevHindi, Some(fixed), trace);
    }

    let w_eng = if en_dict.detect(word) {
        trace.push(Step::EnglishDetected);
        Some(word.to_string())
    } else if let Some(fixed) = en_dict.suggest(word) {
        trace.push(Step::EnglishSuggested);
        Some(fixed)
    } else {
        None
    };

    let w_hin = kb.lookup(word).map(str::to_string);
    if w_hin.is_some() {
        trace.push(Step::KbHit);
    }

    match (w_eng, w_hin) {
        (Some(eng), None) => token(eng, LanguageTag::English, None, trace),
        (None, Some(hin)) => token(word.to_string(), LanguageTag::RomHindi, Some(hin), trace),
        (Some(eng), Some(hin)) => {
            if freq_en.frequency(&eng) > freq_hi.frequency(word) {
                trace.push(Step::FrequencyEnglish);
                token(eng, LanguageTag::English, None, trace)
            } else {
                trace.push(Step::FrequencyHindi);
                token(word.to_string(), LanguageTag::RomHindi, Some(hin), trace)
            }
        }
        (None, None) => token(word.to_string(), LanguageTag::Oov, None, trace),
    }
}

/// Whitespace-tokenizes and tags each token in order.
pub fn tag_text(text: &str, res: &Resources) -> Vec<TaggedToken> {
    text.split_whitespace().map(|w| res.tag_word(w)).collect()
}

pub fn tag_post(post: &Post, res: &Resources) -> Vec<TaggedToken> {
    res.tag_post(post)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Language;

    fn res() -> Resources {
        Resources {
            kb: KnowledgeBase::from_pairs([
                ("tum", "तुम"),
                ("bahar", "बाहर"),
                ("accha", "अच्छा"),
                ("hai", "है"),
                ("main", "मैं"),
            ])
            .unwrap(),
            en_dict: Dictionary::new(Language::English, ["tum", "weather", "main", "good"])
                .unwrap(),
            hi_dict: Dictionary::new(Language::DevanagariHindi, ["नमस्ते", "अच्छा"]).unwrap(),
            freq_en: FrequencyModel::from_counts([
                ("tum", 20u64),
                ("main", 5000),
                ("weather", 900),
            ]),
            freq_hi: FrequencyModel::from_counts([("tum", 9500u64), ("main", 4000)]),
        }
    }

    #[test]
    fn tum_is_hindi_by_frequency() {
        let t = res().tag_word("tum");
        assert_eq!(t.tag, LanguageTag::RomHindi);
        assert_eq!(t.devanagari.as_deref(), Some("तुम"));
        assert_eq!(t.branch(), Some(Branch::AmbiguousRomHindi));
    }

    #[test]
    fn main_is_english_by_frequency() {
        let t = res().tag_word("main");
        assert_eq!(t.tag, LanguageTag::English);
        assert_eq!(t.devanagari, None);
    }

    #[test]
    fn devanagari_detected() {
        let t = res().tag_word("नमस्ते");
        assert_eq!(t.tag, LanguageTag::DevHindi);
        assert_eq!(t.corrected, "नमस्ते");
    }

    #[test]
    fn unknown_word_is_oov() {
        let t = res().tag_word("namastey");
        assert_eq!(t.tag, LanguageTag::Oov);
        assert_eq!(t.replay(), Some(LanguageTag::Oov));
    }

    #[test]
    fn code_switched_sentence() {
        let tags: Vec<_> = tag_text("bahar accha weather hai", &res())
            .into_iter()
            .map(|t| t.tag)
            .collect();
        use LanguageTag::*;
        assert_eq!(tags, vec![RomHindi, RomHindi, English, RomHindi]);
        assert!(tag_text("", &res()).is_empty());
    }

    #[test]
    fn tag_strings() {
        for t in [
            LanguageTag::English,
            LanguageTag::DevHindi,
            LanguageTag::RomHindi,
            LanguageTag::Oov,
            LanguageTag::Na,
        ] {
            let json = serde_json::to_string(&t).unwrap();
            assert_eq!(json, format!("\"{}\"", t.as_str()));
            assert_eq!(t.as_str().parse::<LanguageTag>().unwrap(), t);
        }
    }
}
