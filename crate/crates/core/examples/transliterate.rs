//! Compares the word-level transformation with the character-level
//! baselines on one sentence.

use std::path::PathBuf;

use moh::corpus::clean_text;
use moh::kb::KnowledgeBase;
use moh::langid::{tag_text, Resources};
use moh::lexicon::{Dictionary, FrequencyModel, Language};
use moh::rescue::{rescue_oov, RescueConfig};
use moh::translit::{char_translit, simulate, CharRuleTable, TransformVariant};

fn main() -> moh::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let freq_en = FrequencyModel::load(dir.join("freq_en.tsv"))?;
    let res = Resources {
        kb: KnowledgeBase::load(dir.join("kb.tsv"))?,
        en_dict: Dictionary::load(Language::English, dir.join("en_dict.txt"))?
            .with_ranking(freq_en.clone()),
        hi_dict: Dictionary::load(Language::DevanagariHindi, dir.join("hi_dict.txt"))?,
        freq_en,
        freq_hi: FrequencyModel::load(dir.join("freq_hi.tsv"))?,
    };
    let profanity = KnowledgeBase::load(dir.join("profanity.tsv"))?;
    let rules = CharRuleTable::default();

    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "ramu suchha journalist h haramkor nahi".into());
    let cfg = RescueConfig::default();
    let tokens: Vec<_> = tag_text(&clean_text(&text), &res)
        .into_iter()
        .map(|t| rescue_oov(t, &res.kb, &cfg))
        .collect();

    println!("{:<16} {text}", "input");
    for v in TransformVariant::ALL {
        println!(
            "{:<16} {}",
            v.as_str(),
            simulate(v, &tokens, &profanity, &rules)?
        );
    }
    println!();
    for w in ["tamatar", "aaj", "bhai", "journalist"] {
        println!("char_translit({w}) = {}", char_translit(w, &rules));
    }
    Ok(())
}
