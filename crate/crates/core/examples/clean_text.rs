//! Cleans raw posts the way the pipeline does before tagging.
//!
//!     cargo run --example clean_text -- "Iss lye I am so happyyyy!!! @dost https://t.co/x"

use moh::corpus::clean_text;

fn main() {
    let inputs: Vec<String> = std::env::args().skip(1).collect();
    let samples = if inputs.is_empty() {
        vec![
            "Today I am so happyyy".to_string(),
            "@neta_ji iss liye sarkar bekar hai https://t.co/abc".to_string(),
            "मेरा नाम राम है and I love cricket 🏏".to_string(),
        ]
    } else {
        inputs
    };
    for raw in samples {
        println!("{raw}\n  -> {}", clean_text(&raw));
    }
}
