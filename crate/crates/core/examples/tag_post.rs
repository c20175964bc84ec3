//! Tags each word of a sentence and shows which decision produced the tag.
//!
//!     cargo run --example tag_post -- "ramu suchha journalist h haramkor nahi"

use std::path::PathBuf;

use moh::corpus::clean_text;
use moh::kb::KnowledgeBase;
use moh::langid::{tag_text, Resources};
use moh::lexicon::{Dictionary, FrequencyModel, Language};

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
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "iss lye main to tum se baat karunga mausam accha hai".into());
    for t in tag_text(&clean_text(&text), &res) {
        println!(
            "{:<12} {:<10} {:<12} {:<10} {:?}",
            t.surface,
            t.tag,
            t.corrected,
            t.devanagari.as_deref().unwrap_or("-"),
            t.branch().unwrap()
        );
    }
    Ok(())
}
