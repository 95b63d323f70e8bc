use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::phoneme::PhonemeTable;

const EMBEDDED: &str = include_str!("../../data/lexicon.txt");

/// Word to ARPAbet pronunciation map. Keys are lowercase.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PronouncingLexicon {
    entries: HashMap<String, Vec<String>>,
}

impl PronouncingLexicon {
    /// Lexicon covering every word of the shipped experiment designs.
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED, "embedded lexicon").expect("embedded lexicon is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses `word<TAB>SYM SYM ...` lines. Lines starting with `;` are
    /// comments, stress digits are dropped, and of several variants
    /// (`word(2)`) only the first is kept.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let table = PhonemeTable::new();
        let mut entries: HashMap<String, Vec<String>> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() || line.starts_with(';') {
                continue;
            }
            let (word, pron) = line
                .split_once('\t')
                .or_else(|| line.split_once("  "))
                .ok_or_else(|| Error::parse(source, i + 1, "expected `word<TAB>phonemes`"))?;
            let word = word.trim().to_lowercase();
            let base = match word.find('(') {
                Some(k) if word.ends_with(')') => word[..k].to_string(),
                _ => word,
            };
            if base.is_empty() {
                return Err(Error::parse(source, i + 1, "empty word"));
            }
            let mut symbols = Vec::new();
            for tok in pron.split_whitespace() {
                let sym = tok.trim_end_matches(|c: char| c.is_ascii_digit());
                if !table.contains(sym) {
                    return Err(Error::parse(
                        source,
                        i + 1,
                        format!("unknown phoneme `{tok}` for `{base}`"),
                    ));
                }
                symbols.push(sym.to_string());
            }
            if symbols.is_empty() {
                return Err(Error::parse(
                    source,
                    i + 1,
                    format!("no phonemes for `{base}`"),
                ));
            }
            entries.entry(base).or_insert(symbols);
        }
        Ok(PronouncingLexicon { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&word.to_lowercase())
    }

    /// Adds or replaces the pronunciation of `word`.
    pub fn insert(&mut self, word: &str, symbols: Vec<String>) {
        self.entries.insert(word.to_lowercase(), symbols);
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn phonemes(&self, word: &str) -> Result<&[String]> {
        if word.is_empty() {
            return Err(Error::EmptyInput("word"));
        }
        self.entries
            .get(&word.to_lowercase())
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownWord(word.to_string()))
    }
}
