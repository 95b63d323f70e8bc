//! Words to phoneme feature vectors: ARPAbet lookup followed by a fixed
//! 12-component articulatory encoding.

mod lexicon;
mod table;

pub use lexicon::PronouncingLexicon;
pub use table::{PhonemeTable, FEATURES, PHONEME_ROWS, SILENCE, VOWELS};

use crate::error::Result;

pub fn word_to_phonemes<'a>(lexicon: &'a PronouncingLexicon, word: &str) -> Result<&'a [String]> {
    lexicon.phonemes(word)
}

pub fn phoneme_to_vector(table: &PhonemeTable, symbol: &str) -> Result<[f64; FEATURES]> {
    table.vector(symbol)
}

/// Feature vectors of `words` spoken as one stream, with a single silence
/// vector between consecutive words.
pub fn encode_word_sequence<S: AsRef<str>>(
    lexicon: &PronouncingLexicon,
    table: &PhonemeTable,
    words: &[S],
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (i, word) in words.iter().enumerate() {
        if i > 0 {
            out.push(table.vector(SILENCE)?.to_vec());
        }
        for sym in lexicon.phonemes(word.as_ref())? {
            out.push(table.vector(sym)?.to_vec());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    fn setup() -> (PronouncingLexicon, PhonemeTable) {
        (PronouncingLexicon::embedded(), PhonemeTable::new())
    }

    #[test]
    fn ball_matrix() {
        let (lex, table) = setup();
        let m = encode_word_sequence(&lex, &table, &["ball"]).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(
            m[0],
            vec![0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0]
        );
        assert_eq!(m[1], table.vector("AO").unwrap().to_vec());
        assert_eq!(
            m[2],
            vec![0.0, 0.0, 0.0, 0.0, 0.45, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, 1.0]
        );
    }

    #[test]
    fn empty_sequence() {
        let (lex, table) = setup();
        let none: [&str; 0] = [];
        assert!(encode_word_sequence(&lex, &table, &none)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn separator_between_words() {
        let (lex, table) = setup();
        let m = encode_word_sequence(&lex, &table, &["bed", "fork"]).unwrap();
        let mut expect = Vec::new();
        for s in ["B", "EH", "D", "#", "F", "AO", "R", "K"] {
            expect.push(table.vector(s).unwrap().to_vec());
        }
        assert_eq!(m, expect);
    }

    #[test]
    fn unknown_word_is_named() {
        let (lex, table) = setup();
        match encode_word_sequence(&lex, &table, &["bed", "florp"]) {
            Err(Error::UnknownWord(w)) => assert_eq!(w, "florp"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn embedded_lexicon_uses_known_symbols() {
        let (lex, table) = setup();
        for w in lex.words() {
            for s in lex.phonemes(w).unwrap() {
                assert!(table.contains(s), "{w}: {s}");
            }
        }
    }
}
