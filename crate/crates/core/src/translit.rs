//! Output assembly: the word-level knowledge-base transform, and the
//! character-level baselines it is compared against.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::langid::{LanguageTag, TaggedToken};
use crate::script::{has_latin, is_devanagari_consonant, is_latin_letter};

const VIRAMA: char = '\u{094D}';
const DEFAULT_RULES: &str = include_str!("default_rules.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformVariant {
    /// Knowledge-base mapping of Roman Hindi; English kept.
    Moh,
    /// Character-level transliteration of every Latin token.
    Indic,
    /// Profane words from the profanity list, the rest character-level.
    IndicP,
    /// English kept, profane words from the list, the rest character-level.
    IndicSkipEnP,
}

impl TransformVariant {
    pub const ALL: [TransformVariant; 4] = [
        TransformVariant::Moh,
        TransformVariant::Indic,
        TransformVariant::IndicP,
        TransformVariant::IndicSkipEnP,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TransformVariant::Moh => "moh",
            TransformVariant::Indic => "indic",
            TransformVariant::IndicP => "indic-p",
            TransformVariant::IndicSkipEnP => "indic-skip-en-p",
        }
    }
}

impl fmt::Display for TransformVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for TransformVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TransformVariant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown variant `{s}` (expected moh, indic, indic-p or indic-skip-en-p)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Rule {
    pattern: String,
    replacement: String,
    /// Present for vowels: the dependent sign, empty for the inherent vowel.
    sign: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Consonant,
    Vowel,
    Other,
}

impl Rule {
    fn kind(&self) -> Kind {
        if self.sign.is_some() {
            Kind::Vowel
        } else if self
            .replacement
            .chars()
            .last()
            .is_some_and(is_devanagari_consonant)
        {
            Kind::Consonant
        } else {
            Kind::Other
        }
    }
}

/// Ordered Latin pattern to Devanagari rules, applied greedily with the
/// longest pattern first.
///
/// A consonant directly followed by another consonant gets a virama. A
/// vowel rule contributes its dependent sign after a consonant and its
/// independent letter elsewhere.
#[derive(Debug, Clone)]
pub struct CharRuleTable {
    rules: Vec<Rule>,
    by_pattern: HashMap<String, usize>,
    longest: usize,
}

impl Default for CharRuleTable {
    fn default() -> Self {
        CharRuleTable::parse(DEFAULT_RULES, Path::new("<default rules>"))
            .expect("built-in rule table is valid")
    }
}

impl CharRuleTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses `pattern<TAB>replacement[<TAB>vowel-sign]` lines. Blank lines
    /// and `#` comments are ignored.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i as u64 + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if !(2..=3).contains(&cols.len()) {
                return Err(Error::parse(
                    origin,
                    line_no,
                    "expected 2 or 3 tab-separated columns",
                ));
            }
            let pattern = cols[0].trim();
            let n = pattern.chars().count();
            if !(1..=3).contains(&n) || !pattern.chars().all(|c| c.is_ascii_lowercase()) {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("pattern `{pattern}` must be 1-3 lowercase Latin letters"),
                ));
            }
            let replacement = cols[1].trim().nfc().collect::<String>();
            let sign = cols.get(2).map(|s| match s.trim() {
                "_" => String::new(),
                s => s.nfc().collect(),
            });
            if replacement.is_empty()
                || has_latin(&replacement)
                || sign.as_deref().is_some_and(has_latin)
            {
                return Err(Error::parse(
                    origin,
                    line_no,
                    "replacement must be non-empty and contain no Latin letters",
                ));
            }
            rules.push(Rule {
                pattern: pattern.to_string(),
                replacement,
                sign,
            });
        }
        let mut by_pattern = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            by_pattern.entry(r.pattern.clone()).or_insert(i);
        }
        if let Some(c) = ('a'..='z').find(|c| !by_pattern.contains_key(&c.to_string())) {
            return Err(Error::Config(format!(
                "{}: no single-letter rule for `{c}`",
                origin.display()
            )));
        }
        let longest = rules.iter().map(|r| r.pattern.len()).max().unwrap_or(1);
        Ok(CharRuleTable {
            rules,
            by_pattern,
            longest,
        })
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn longest_match(&self, chars: &[char]) -> Option<(usize, &Rule)> {
        let mut key = String::with_capacity(self.longest);
        (1..=self.longest.min(chars.len())).rev().find_map(|n| {
            key.clear();
            key.extend(&chars[..n]);
            self.by_pattern.get(&key).map(|&i| (n, &self.rules[i]))
        })
    }
}

enum Unit<'a> {
    Rule(&'a Rule),
    Keep(char),
}

/// Transliterates one word character by character.
///
/// Accents are stripped before matching; Latin letters with no rule become
/// `?`; anything else (digits, Devanagari) is copied through.
pub fn char_translit(word: &str, rules: &CharRuleTable) -> String {
    let chars: Vec<char> = word
        .nfd()
        .filter(|c| !('\u{0300}'..='\u{036F}').contains(c))
        .flat_map(char::to_lowercase)
        .collect();

    let mut units = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        if let Some((n, rule)) = rules.longest_match(&chars[i..]) {
            units.push(Unit::Rule(rule));
            i += n;
        } else {
            let c = chars[i];
            units.push(Unit::Keep(if is_latin_letter(c) { '?' } else { c }));
            i += 1;
        }
    }

    let kind = |u: Option<&Unit>| match u {
        Some(Unit::Rule(r)) => r.kind(),
        _ => Kind::Other,
    };
    let mut out = String::with_capacity(word.len() * 3);
    for (idx, unit) in units.iter().enumerate() {
        match unit {
            Unit::Keep(c) => out.push(*c),
            Unit::Rule(rule) => match rule.kind() {
                Kind::Consonant => {
                    out.push_str(&rule.replacement);
                    if kind(units.get(idx + 1)) == Kind::Consonant {
                        out.push(VIRAMA);
                    }
                }
                Kind::Vowel => {
                    let after_consonant = idx > 0 && kind(units.get(idx - 1)) == Kind::Consonant;
                    match (&rule.sign, after_consonant) {
                        (Some(sign), true) => out.push_str(sign),
                        _ => out.push_str(&rule.replacement),
                    }
                }
                Kind::Other => out.push_str(&rule.replacement),
            },
        }
    }
    out.nfc().collect()
}

/// Joins tokens into the final text: Roman Hindi becomes its Devanagari
/// form, English and Devanagari Hindi keep their corrected spelling, and NA
/// tokens pass through as written.
pub fn moh_transform(tokens: &[TaggedToken]) -> Result<String> {
    let mut out = Vec::with_capacity(tokens.len());
    for t in tokens {
        let word = match t.tag {
            LanguageTag::RomHindi => t.devanagari.as_deref().ok_or_else(|| {
                Error::Contract(format!(
                    "ROM_HINDI token `{}` has no Devanagari form",
                    t.surface
                ))
            })?,
            LanguageTag::DevHindi | LanguageTag::English => t.corrected.as_str(),
            LanguageTag::Na => t.surface.as_str(),
            LanguageTag::Oov => {
                return Err(Error::Contract(format!(
                    "token `{}` is still OOV; run rescue first",
                    t.surface
                )))
            }
        };
        out.push(word);
    }
    Ok(out.join(" "))
}

/// Produces the output text for one post under the chosen variant.
pub fn simulate(
    variant: TransformVariant,
    tokens: &[TaggedToken],
    profanity: &KnowledgeBase,
    rules: &CharRuleTable,
) -> Result<String> {
    if variant == TransformVariant::Moh {
        return moh_transform(tokens);
    }
    let words: Vec<String> = tokens
        .iter()
        .map(|t| {
            let w = t.surface.as_str();
            if variant == TransformVariant::IndicSkipEnP && t.tag == LanguageTag::English {
                return w.to_string();
            }
            if variant != TransformVariant::Indic {
                if let Some(p) = profanity.lookup(w) {
                    return p.to_string();
                }
            }
            char_translit(w, rules)
        })
        .collect();
    Ok(words.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::has_devanagari;

    fn tok(surface: &str, tag: LanguageTag, deva: Option<&str>) -> TaggedToken {
        TaggedToken {
            surface: surface.into(),
            corrected: surface.into(),
            tag,
            devanagari: deva.map(Into::into),
            trace: vec![],
        }
    }

    #[test]
    fn default_table_is_total() {
        let rules = CharRuleTable::default();
        assert!(rules.len() >= 50);
        for c in 'a'..='z' {
            let out = char_translit(&c.to_string(), &rules);
            assert!(!out.is_empty() && !has_latin(&out), "{c} -> {out}");
        }
    }

    #[test]
    fn tamatar_by_hand() {
        // t->त, a->(inherent), m->म, a, t->त, a, r->र
        assert_eq!(char_translit("tamatar", &CharRuleTable::default()), "तमतर");
    }

    #[test]
    fn conjuncts_and_vowel_signs() {
        let rules = CharRuleTable::default();
        // h a r a m k o r: म is followed directly by क, so it takes a virama
        assert_eq!(char_translit("haramkor", &rules), "हरम्कोर");
        // j ou r n a l i s t
        assert_eq!(char_translit("journalist", &rules), "जौर्नलिस्त");
        // word-initial vowel uses the independent letter
        assert_eq!(char_translit("aaj", &rules), "आज");
        assert_eq!(char_translit("bhai", &rules), "भै");
    }

    #[test]
    fn empty_and_passthrough() {
        let rules = CharRuleTable::default();
        assert_eq!(char_translit("", &rules), "");
        assert_eq!(char_translit("नमस्ते", &rules), "नमस्ते");
        assert_eq!(char_translit("2020", &rules), "2020");
        assert_eq!(char_translit("café", &rules), "कफे");
        assert!(!has_latin(&char_translit("straße", &rules)));
    }

    #[test]
    fn table_validation() {
        let p = Path::new("t.tsv");
        assert!(
            CharRuleTable::parse("a\tअ\n", p).is_err(),
            "missing letters"
        );
        let mut ok: String = ('a'..='z').map(|c| format!("{c}\tक\n")).collect();
        assert!(CharRuleTable::parse(&ok, p).is_ok());
        ok.push_str("abcd\tक\n");
        assert!(matches!(
            CharRuleTable::parse(&ok, p),
            Err(Error::Parse { line: 27, .. })
        ));
        assert!(CharRuleTable::parse("A\tक\n", p).is_err());
        assert!(CharRuleTable::parse("a\tb\n", p).is_err());
    }

    #[test]
    fn variant_names() {
        for v in TransformVariant::ALL {
            assert_eq!(v.as_str().parse::<TransformVariant>().unwrap(), v);
        }
        assert!("bogus".parse::<TransformVariant>().is_err());
    }

    #[test]
    fn moh_rejects_oov() {
        let err = moh_transform(&[tok("namste", LanguageTag::Oov, None)]).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn moh_keeps_english_and_na() {
        let tokens = vec![
            tok("iss", LanguageTag::RomHindi, Some("इस")),
            tok("problem", LanguageTag::English, None),
            tok("xqzt", LanguageTag::Na, None),
            tok("नहीं", LanguageTag::DevHindi, Some("नहीं")),
        ];
        assert_eq!(moh_transform(&tokens).unwrap(), "इस problem xqzt नहीं");
    }

    #[test]
    fn indic_variants() {
        let rules = CharRuleTable::default();
        let prof = KnowledgeBase::from_pairs([("haramkor", "हरामखोर")]).unwrap();
        let tokens = vec![
            tok("journalist", LanguageTag::English, None),
            tok("haramkor", LanguageTag::RomHindi, Some("हरामखोर")),
            tok("नहीं", LanguageTag::DevHindi, Some("नहीं")),
        ];
        let indic = simulate(TransformVariant::Indic, &tokens, &prof, &rules).unwrap();
        assert!(!has_latin(&indic));
        assert!(!indic.contains("हरामखोर"));
        let p = simulate(TransformVariant::IndicP, &tokens, &prof, &rules).unwrap();
        assert_eq!(p.split(' ').nth(1), Some("हरामखोर"));
        assert!(!has_latin(&p));
        let skip = simulate(TransformVariant::IndicSkipEnP, &tokens, &prof, &rules).unwrap();
        assert_eq!(
            skip.split(' ').collect::<Vec<_>>(),
            vec!["journalist", "हरामखोर", "नहीं"]
        );
        assert!(has_devanagari(&skip));
    }

    #[test]
    fn indic_is_identity_on_devanagari() {
        let rules = CharRuleTable::default();
        let prof = KnowledgeBase::default();
        let tokens = vec![
            tok("मेरा", LanguageTag::DevHindi, Some("मेरा")),
            tok("नाम", LanguageTag::DevHindi, Some("नाम")),
        ];
        assert_eq!(
            simulate(TransformVariant::Indic, &tokens, &prof, &rules).unwrap(),
            "मेरा नाम"
        );
    }
}
