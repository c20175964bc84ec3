//! Builds the knowledge base from the shipped pair, sentence and profanity
//! files and prints what happened along the way.

use std::path::PathBuf;

use moh::kb::{build_kb, KbSources};
use moh::lexicon::{Dictionary, Language};

fn main() -> moh::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let sources = KbSources {
        pair_files: vec![dir.join("pairs_main.tsv"), dir.join("pairs_extra.tsv")],
        sentence_pair_files: vec![dir.join("sentences.tsv")],
        profanity_file: Some(dir.join("profanity.tsv")),
    };
    let en = Dictionary::load(Language::English, dir.join("en_dict.txt"))?;
    let hi = Dictionary::load(Language::DevanagariHindi, dir.join("hi_dict.txt"))?;
    let (kb, report) = build_kb(&sources, &en, &hi)?;

    println!("{}", serde_json::to_string_pretty(&report)?);
    for word in ["namaste", "liye", "haramkor", "empowered"] {
        println!("{word:>10} -> {}", kb.lookup(word).unwrap_or("(not in KB)"));
    }
    for (len, keys) in kb.length_index().iter().take(4) {
        println!("length {len}: {} keys", keys.len());
    }
    Ok(())
}
