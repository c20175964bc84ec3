//! Moves misspelled Roman Hindi words onto the closest knowledge-base key.
//!
//!     cargo run --example oov_rescue -- 0.8

use moh::kb::KnowledgeBase;
use moh::rescue::{best_match, lev_distance, lev_similarity, RescueConfig};

fn main() -> moh::Result<()> {
    let threshold = std::env::args()
        .nth(1)
        .map(|t| t.parse().expect("threshold is a number"))
        .unwrap_or(0.70);
    let cfg = RescueConfig::new(threshold)?;
    let kb = KnowledgeBase::from_pairs([
        ("namaste", "नमस्ते"),
        ("liye", "लिए"),
        ("nafrat", "नफ़रत"),
        ("batein", "बातें"),
    ])?;

    println!("threshold {threshold}");
    for word in [
        "namste", "namastey", "namuste", "nafrt", "lye", "batey", "xyz",
    ] {
        match best_match(word, &kb, &cfg) {
            Some(hit) => println!(
                "{word:<9} -> {:<8} {} (LD {}, similarity {:.3})",
                hit.matched_key,
                hit.devanagari,
                lev_distance(word, &hit.matched_key),
                hit.similarity
            ),
            None => {
                let (key, s) = kb
                    .keys()
                    .map(|k| (k, lev_similarity(word, k)))
                    .fold(("", f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
                println!("{word:<9} -> NA (closest {key}, similarity {s:.3})");
            }
        }
    }
    Ok(())
}
