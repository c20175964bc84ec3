//! Shows how two spellings of one word split the count vectors, and how the
//! transformed text brings them back together.

use moh::features::{fit_vocabulary, transform, FeatureConfig, Scheme};

fn show(title: &str, docs: &[&str]) -> moh::Result<()> {
    let vocab = fit_vocabulary(docs, Scheme::Count, &FeatureConfig::default())?;
    let x = transform(docs, &vocab);
    println!("{title}: vocabulary {:?}", vocab.terms());
    for (i, d) in docs.iter().enumerate() {
        println!("  {d:<12} {:?}", x.dense_row(i));
    }
    Ok(())
}

fn main() -> moh::Result<()> {
    show("original", &["iss lye", "iss liye"])?;
    show("transformed", &["इस लिए", "इस लिए"])?;

    let docs = ["tum log chor ho", "bahar accha weather hai", "accha hai"];
    let cfg = FeatureConfig::default();
    for scheme in Scheme::ALL {
        let vocab = fit_vocabulary(&docs, scheme, &cfg)?;
        let x = transform(&docs, &vocab);
        println!(
            "{:<20} {} terms, row 2 = {:?}",
            scheme.title(),
            vocab.len(),
            x.row(2)
        );
    }
    Ok(())
}
