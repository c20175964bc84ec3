//! Character-class helpers shared by the cleaner, the lexicons and the
//! transliterator.

use unicode_normalization::UnicodeNormalization;

pub const DEVANAGARI_START: char = '\u{0900}';
pub const DEVANAGARI_END: char = '\u{097F}';

#[inline]
pub fn is_devanagari(c: char) -> bool {
    (DEVANAGARI_START..=DEVANAGARI_END).contains(&c)
}

/// Alphabetic characters from Basic Latin, Latin-1, Latin Extended-A/B and
/// Latin Extended Additional.
#[inline]
pub fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic()
        || (c.is_alphabetic() && matches!(c, '\u{00C0}'..='\u{024F}' | '\u{1E00}'..='\u{1EFF}'))
}

pub fn has_devanagari(s: &str) -> bool {
    s.chars().any(is_devanagari)
}

pub fn has_latin(s: &str) -> bool {
    s.chars().any(is_latin_letter)
}

/// Devanagari consonant letters, including the precomposed nukta forms.
#[inline]
pub fn is_devanagari_consonant(c: char) -> bool {
    matches!(c, '\u{0915}'..='\u{0939}' | '\u{0958}'..='\u{095F}')
}

pub fn nfc(s: &str) -> String {
    s.nfc().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes() {
        assert!(is_devanagari('न'));
        assert!(is_devanagari('्'));
        assert!(!is_devanagari('a'));
        assert!(is_latin_letter('é'));
        assert!(is_latin_letter('Z'));
        assert!(!is_latin_letter('×'));
        assert!(!is_latin_letter('1'));
        assert!(!is_latin_letter('д'));
        assert!(is_devanagari_consonant('क'));
        assert!(!is_devanagari_consonant('ा'));
    }
}
