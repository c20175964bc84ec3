use moh::kb::KnowledgeBase;
use moh::rescue::{best_match, RescueConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ROMAN: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
const DEVA: &[char] = &[
    'क', 'ख', 'ग', 'च', 'ज', 'त', 'द', 'न', 'प', 'ब', 'म', 'र', 'ल', 'स', 'ह', 'ा', 'ि', 'ी', 'ु',
    'े',
];

#[test]
fn full_size_kb_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(72635);
    let mut pairs = std::collections::BTreeMap::new();
    while pairs.len() < 72_635 {
        let n = rng.gen_range(2..=12);
        let key: String = (0..n)
            .map(|_| ROMAN[rng.gen_range(0..ROMAN.len())] as char)
            .collect();
        let val: String = (0..n.min(8))
            .map(|_| DEVA[rng.gen_range(0..DEVA.len())])
            .collect();
        pairs.entry(key).or_insert(val);
    }
    let kb =
        KnowledgeBase::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str()))).unwrap();
    assert_eq!(kb.len(), 72_635);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("kb.tsv");
    kb.save(&path).unwrap();
    let back = KnowledgeBase::load(&path).unwrap();
    assert_eq!(back, kb);
    let indexed: usize = back.length_index().values().map(Vec::len).sum();
    assert_eq!(indexed, 72_635);

    // an exact key always rescues to itself
    let cfg = RescueConfig::default();
    let (k, v) = pairs.iter().find(|(k, _)| k.len() >= 6).unwrap();
    let hit = best_match(k, &back, &cfg).unwrap();
    assert_eq!(
        (
            hit.matched_key.as_str(),
            hit.devanagari.as_str(),
            hit.similarity
        ),
        (k.as_str(), v.as_str(), 1.0)
    );
}
