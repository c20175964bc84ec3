#![allow(dead_code)]

use std::path::PathBuf;

use moh::kb::{build_kb, KbSources, KnowledgeBase};
use moh::langid::Resources;
use moh::lexicon::{Dictionary, FrequencyModel, Language};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn fixture_str(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

pub fn en_dict() -> Dictionary {
    Dictionary::load(Language::English, fixture("en_dict.txt"))
        .unwrap()
        .with_ranking(FrequencyModel::load(fixture("freq_en.tsv")).unwrap())
}

pub fn hi_dict() -> Dictionary {
    Dictionary::load(Language::DevanagariHindi, fixture("hi_dict.txt")).unwrap()
}

pub fn kb_sources() -> KbSources {
    KbSources {
        pair_files: vec![fixture("pairs_main.tsv"), fixture("pairs_extra.tsv")],
        sentence_pair_files: vec![fixture("sentences.tsv")],
        profanity_file: Some(fixture("profanity.tsv")),
    }
}

pub fn resources() -> Resources {
    Resources {
        kb: KnowledgeBase::load(fixture("kb.tsv")).unwrap(),
        en_dict: en_dict(),
        hi_dict: hi_dict(),
        freq_en: FrequencyModel::load(fixture("freq_en.tsv")).unwrap(),
        freq_hi: FrequencyModel::load(fixture("freq_hi.tsv")).unwrap(),
    }
}

pub fn rebuilt_kb() -> KnowledgeBase {
    build_kb(
        &kb_sources(),
        &Dictionary::load(Language::English, fixture("en_dict.txt")).unwrap(),
        &hi_dict(),
    )
    .unwrap()
    .0
}

/// Arguments shared by commands that need the tagger resources.
pub fn resource_args() -> Vec<String> {
    let mut v = Vec::new();
    for (flag, file) in [
        ("--kb", "kb.tsv"),
        ("--en-dict", "en_dict.txt"),
        ("--hi-dict", "hi_dict.txt"),
        ("--freq-en", "freq_en.tsv"),
        ("--freq-hi", "freq_hi.tsv"),
        ("--profanity", "profanity.tsv"),
    ] {
        v.push(flag.to_string());
        v.push(fixture_str(file));
    }
    v
}

/// Small hand-built resources where each listed word ends in a different
/// tagging branch.
pub fn branch_resources() -> Resources {
    Resources {
        kb: KnowledgeBase::from_pairs([("mausam", "मौसम"), ("main", "मैं"), ("to", "तो")]).unwrap(),
        en_dict: Dictionary::new(Language::English, ["weather", "main", "to"]).unwrap(),
        hi_dict: Dictionary::new(Language::DevanagariHindi, ["नमस्ते"]).unwrap(),
        freq_en: FrequencyModel::from_counts([("main", 5000u64), ("to", 100)]),
        freq_hi: FrequencyModel::from_counts([("main", 4000u64), ("to", 100)]),
    }
}

pub fn branch_cases() -> Vec<(
    &'static str,
    moh::langid::Branch,
    moh::langid::LanguageTag,
    &'static str,
)> {
    use moh::langid::{Branch as B, LanguageTag as T};
    vec![
        ("नमस्ते", B::DevHindiDetected, T::DevHindi, "नमस्ते"),
        ("नमस्त", B::DevHindiSuggested, T::DevHindi, "नमस्ते"),
        ("weather", B::EnglishDetected, T::English, "weather"),
        ("wether", B::EnglishSuggested, T::English, "weather"),
        ("mausam", B::RomHindiKb, T::RomHindi, "mausam"),
        ("main", B::AmbiguousEnglish, T::English, "main"),
        ("to", B::AmbiguousRomHindi, T::RomHindi, "to"),
        ("xyzzy", B::Oov, T::Oov, "xyzzy"),
    ]
}
