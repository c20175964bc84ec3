//! Trains both classifiers on a tiny labelled set and prints the report
//! table.

use moh::classify::{evaluate, make_split, train_logreg, train_nb, LogRegConfig};
use moh::features::{fit_vocabulary, transform, FeatureConfig, Scheme};
use moh::metrics::{render_per_class, render_table, TableRow};

fn main() -> moh::Result<()> {
    let data = [
        ("तुम चोर हो", "OFF"),
        ("कमीना नेता चोर है", "OFF"),
        ("सरकार बेकार है चोर", "OFF"),
        ("ये सब झूठ है fake news", "OFF"),
        ("हरामखोर नेता", "OFF"),
        ("तुम लोग कमीना", "OFF"),
        ("नमस्ते दोस्त आज का मौसम अच्छा है", "NOT"),
        ("बाहर अच्छा weather है", "NOT"),
        ("नमस्ते भाई क्या हाल है", "NOT"),
        ("i love cricket", "NOT"),
        ("आज बहुत अच्छा दिन", "NOT"),
        ("दोस्त happy है", "NOT"),
    ];
    let (docs, labels): (Vec<&str>, Vec<&str>) = data.iter().copied().unzip();
    let split = make_split(&labels, 7, 0.34, true)?;
    let pick = |idx: &[usize]| -> (Vec<&str>, Vec<&str>) {
        idx.iter().map(|&i| (docs[i], labels[i])).unzip()
    };
    let (tr_x, tr_y) = pick(&split.train);
    let (te_x, te_y) = pick(&split.test);

    let mut reports = Vec::new();
    for scheme in [Scheme::Count, Scheme::TfidfWord] {
        let vocab = fit_vocabulary(&tr_x, scheme, &FeatureConfig::default())?;
        let (xtr, xte) = (transform(&tr_x, &vocab), transform(&te_x, &vocab));
        reports.push((
            "Naive Bayes",
            scheme,
            evaluate(&train_nb(&xtr, &tr_y, 1.0)?, &xte, &te_y)?,
        ));
        let lr = train_logreg(&xtr, &tr_y, &LogRegConfig::default())?;
        reports.push(("Logistic Regression", scheme, evaluate(&lr, &xte, &te_y)?));
    }
    reports.sort_by_key(|r| r.0);
    let rows: Vec<TableRow> = reports
        .iter()
        .map(|(c, s, r)| TableRow {
            classifier: c,
            features: s.title(),
            report: r,
        })
        .collect();
    print!("{}", render_table(&rows));
    println!();
    print!("{}", render_per_class(&reports[0].2));
    Ok(())
}
