use std::collections::HashMap;

use crate::error::{Error, Result};

pub const FEATURES: usize = 12;

/// Symbol for silence, used between consecutive words.
pub const SILENCE: &str = "#";

/// Articulatory feature rows. Vowels use the first four components,
/// consonants the last eight.
#[rustfmt::skip]
pub const PHONEME_ROWS: [(&str, [f64; FEATURES]); 40] = [
    ("AA", [1.0, 0.5, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("AE", [1.0, -0.5, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("AH", [0.67, 0.0, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("AO", [0.33, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("AW", [0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("AY", [0.0, 0.0, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("EH", [0.33, -0.5, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("ER", [0.33, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("IH", [-0.67, -0.5, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("IY", [-1.0, -1.0, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("OY", [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("OW", [-0.33, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("EY", [-0.33, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("UH", [-0.67, 0.5, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("UW", [-1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
    ("B",  [0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0]),
    ("CH", [0.0, 0.0, 0.0, 0.0, 0.27, -1.0, -1.0, 0.0, -1.0, -1.0, -1.0, -1.0]),
    ("D",  [0.0, 0.0, 0.0, 0.0, 0.45, -1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0]),
    ("DH", [0.0, 0.0, 0.0, 0.0, 0.64, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0]),
    ("F",  [0.0, 0.0, 0.0, 0.0, 0.82, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0, -1.0]),
    ("G",  [0.0, 0.0, 0.0, 0.0, -0.27, -1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0]),
    ("HH", [0.0, 0.0, 0.0, 0.0, -1.0, -1.0, -1.0, 1.0, 0.0, -1.0, -1.0, -1.0]),
    ("JH", [0.0, 0.0, 0.0, 0.0, 0.45, -1.0, -1.0, 0.0, 1.0, -1.0, -1.0, -1.0]),
    ("K",  [0.0, 0.0, 0.0, 0.0, -0.27, -1.0, 1.0, -1.0, -1.0, -1.0, -1.0, -1.0]),
    ("L",  [0.0, 0.0, 0.0, 0.0, 0.45, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, 1.0]),
    ("M",  [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0]),
    ("N",  [0.0, 0.0, 0.0, 0.0, 0.45, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0]),
    ("NG", [0.0, 0.0, 0.0, 0.0, -0.27, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0]),
    ("P",  [0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0, -1.0, -1.0]),
    ("R",  [0.0, 0.0, 0.0, 0.0, 0.27, -1.0, -1.0, -1.0, 1.0, -1.0, 1.0, -1.0]),
    ("S",  [0.0, 0.0, 0.0, 0.0, 0.45, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0, -1.0]),
    ("SH", [0.0, 0.0, 0.0, 0.0, 0.27, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0, -1.0]),
    ("T",  [0.0, 0.0, 0.0, 0.0, 0.45, -1.0, 1.0, -1.0, -1.0, -1.0, -1.0, -1.0]),
    ("TH", [0.0, 0.0, 0.0, 0.0, 0.64, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0, -1.0]),
    ("V",  [0.0, 0.0, 0.0, 0.0, 0.82, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0]),
    ("W",  [0.0, 0.0, 0.0, 0.0, 1.0, -1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0]),
    ("Y",  [0.0, 0.0, 0.0, 0.0, -0.09, -1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0]),
    ("Z",  [0.0, 0.0, 0.0, 0.0, 0.45, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0]),
    ("ZH", [0.0, 0.0, 0.0, 0.0, 0.27, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0]),
    ("#",  [0.0; FEATURES]),
];

/// Number of vowel rows at the head of [`PHONEME_ROWS`].
pub const VOWELS: usize = 15;

#[derive(Debug, Clone)]
pub struct PhonemeTable {
    index: HashMap<&'static str, usize>,
}

impl Default for PhonemeTable {
    fn default() -> Self {
        PhonemeTable::new()
    }
}

impl PhonemeTable {
    pub fn new() -> Self {
        let index = PHONEME_ROWS
            .iter()
            .enumerate()
            .map(|(i, (sym, _))| (*sym, i))
            .collect();
        PhonemeTable { index }
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.index.contains_key(symbol)
    }

    pub fn vector(&self, symbol: &str) -> Result<[f64; FEATURES]> {
        self.index
            .get(symbol)
            .map(|&i| PHONEME_ROWS[i].1)
            .ok_or_else(|| Error::UnknownPhoneme(symbol.to_string()))
    }

    pub fn symbols(&self) -> impl Iterator<Item = &'static str> {
        PHONEME_ROWS.iter().map(|(s, _)| *s)
    }

    /// All rows in table order, the training set of the auditory codebook.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        PHONEME_ROWS.iter().map(|(_, v)| v.to_vec()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forty_distinct_symbols() {
        let t = PhonemeTable::new();
        assert_eq!(t.symbols().count(), 40);
        assert_eq!(t.index.len(), 40);
    }

    #[test]
    fn block_structure() {
        for (i, (sym, row)) in PHONEME_ROWS.iter().enumerate() {
            assert!(row.iter().all(|v| (-1.0..=1.0).contains(v)), "{sym}");
            if *sym == SILENCE {
                assert!(row.iter().all(|&v| v == 0.0));
            } else if i < VOWELS {
                assert!(row[4..].iter().all(|&v| v == 0.0), "{sym}");
            } else {
                assert!(row[..4].iter().all(|&v| v == 0.0), "{sym}");
            }
        }
    }

    #[test]
    fn selected_rows() {
        let t = PhonemeTable::new();
        assert_eq!(
            t.vector("AA").unwrap(),
            [1.0, 0.5, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(t.vector("#").unwrap(), [0.0; 12]);
        assert_eq!(
            t.vector("B").unwrap(),
            [0.0, 0.0, 0.0, 0.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -1.0]
        );
        assert!(matches!(t.vector("QQ"), Err(Error::UnknownPhoneme(s)) if s == "QQ"));
    }
}
