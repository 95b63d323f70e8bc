use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::phoneme::PronouncingLexicon;
use crate::representation::synthetic::{self, SyntheticConfig};
use crate::representation::{load_descriptors, ObjectDescriptors};

/// File names looked up inside a dataset directory.
pub const DESCRIPTOR_FILE: &str = "descriptors.txt";
pub const LEXICON_FILE: &str = "lexicon.txt";

/// Seed of the default synthetic image corpus. The corpus stands for fixed
/// external data, so it does not follow the run seed.
pub const DEFAULT_DATASET_SEED: u64 = 7;

/// Object descriptors plus the pronouncing lexicon.
#[derive(Debug, Clone)]
pub struct Dataset {
    objects: Vec<ObjectDescriptors>,
    index: HashMap<String, usize>,
    lexicon: PronouncingLexicon,
}

impl Dataset {
    pub fn new(objects: Vec<ObjectDescriptors>, lexicon: PronouncingLexicon) -> Result<Self> {
        let mut index = HashMap::with_capacity(objects.len());
        for (i, o) in objects.iter().enumerate() {
            if o.descriptors.is_empty() {
                return Err(Error::Malformed(format!(
                    "object `{}` has no descriptors",
                    o.name
                )));
            }
            if index.insert(o.name.clone(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate object `{}`", o.name)));
            }
        }
        Ok(Dataset {
            objects,
            index,
            lexicon,
        })
    }

    /// Reads `descriptors.txt` from `dir`, and `lexicon.txt` when present
    /// (the embedded lexicon otherwise).
    pub fn load(dir: &Path) -> Result<Self> {
        let objects = load_descriptors(&dir.join(DESCRIPTOR_FILE))?;
        let lex_path = dir.join(LEXICON_FILE);
        let lexicon = if lex_path.exists() {
            PronouncingLexicon::load(&lex_path)?
        } else {
            PronouncingLexicon::embedded()
        };
        Dataset::new(objects, lexicon)
    }

    /// Synthetic descriptors for `names` with the embedded lexicon.
    pub fn synthetic(names: &[String], cfg: &SyntheticConfig, seed: u64) -> Result<Self> {
        let objects = synthetic::generate(names, cfg, seed)?;
        Dataset::new(objects, PronouncingLexicon::embedded())
    }

    pub fn objects(&self) -> &[ObjectDescriptors] {
        &self.objects
    }

    pub fn lexicon(&self) -> &PronouncingLexicon {
        &self.lexicon
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn descriptors(&self, name: &str) -> Result<&[Vec<f64>]> {
        self.index
            .get(name)
            .map(|&i| self.objects[i].descriptors.as_slice())
            .ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    /// Every descriptor in dataset order, the visual codebook's stream.
    pub fn all_descriptors(&self) -> Vec<Vec<f64>> {
        self.objects
            .iter()
            .flat_map(|o| o.descriptors.iter().cloned())
            .collect()
    }
}
