//! The four layers wired together: codebook histograms of both senses feed
//! the context network, and histograms plus context form the inputs of the
//! association map.

mod dataset;

pub use dataset::{Dataset, DEFAULT_DATASET_SEED, DESCRIPTOR_FILE, LEXICON_FILE};

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::art2::Art2Network;
use crate::config::{ContextGranularity, ModelParams, Weighting};
use crate::error::{Error, Result};
use crate::phoneme::{encode_word_sequence, PhonemeTable};
use crate::representation::{Codebook, FeatureHistogram, Modality};
use crate::som::{SomMap, StepEvent};

/// Words heard as one stream together with the objects on display.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stimulus {
    pub words: Vec<String>,
    pub referents: Vec<String>,
}

impl Stimulus {
    pub fn new<W: Into<String>, R: Into<String>>(
        words: impl IntoIterator<Item = W>,
        referents: impl IntoIterator<Item = R>,
    ) -> Self {
        Stimulus {
            words: words.into_iter().map(Into::into).collect(),
            referents: referents.into_iter().map(Into::into).collect(),
        }
    }
}

/// One pairing of the word stream with a single referent.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationInput {
    pub visual: Vec<f64>,
    pub auditory: Vec<f64>,
    pub context: Vec<f64>,
}

impl AssociationInput {
    pub fn concat(&self) -> Vec<f64> {
        let mut v =
            Vec::with_capacity(self.visual.len() + self.auditory.len() + self.context.len());
        v.extend_from_slice(&self.visual);
        v.extend_from_slice(&self.auditory);
        v.extend_from_slice(&self.context);
        v
    }
}

/// Whether the context network may store what it is shown.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Train,
    Test,
}

/// Frozen codebooks and the visual histogram of every dataset object.
/// Built once per run and shared by all participants.
#[derive(Debug)]
pub struct Representations {
    visual: Codebook,
    auditory: Codebook,
    objects: HashMap<String, FeatureHistogram>,
    dataset: Dataset,
    table: PhonemeTable,
    weighting: Weighting,
}

impl Representations {
    /// Trains both codebooks. The visual one sees every descriptor of the
    /// dataset, the auditory one every row of the phoneme table.
    pub fn build(dataset: Dataset, params: &ModelParams, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let passes = params.codebook_passes;

        let descriptors = dataset.all_descriptors();
        let vparams = params.visual.map_params(descriptors.len() * passes);
        let visual = Codebook::build(&descriptors, vparams, passes, rng.gen(), Modality::Visual)?;

        let table = PhonemeTable::new();
        let rows = table.rows();
        let aparams = params.auditory.map_params(rows.len() * passes);
        let auditory = Codebook::build(&rows, aparams, passes, rng.gen(), Modality::Auditory)?;

        Representations::from_codebooks(dataset, visual, auditory, params.histogram_weighting)
    }

    pub fn from_codebooks(
        dataset: Dataset,
        visual: Codebook,
        auditory: Codebook,
        weighting: Weighting,
    ) -> Result<Self> {
        let mut objects = HashMap::new();
        for o in dataset.objects() {
            objects.insert(o.name.clone(), visual.encode(&o.descriptors, weighting)?);
        }
        Ok(Representations {
            visual,
            auditory,
            objects,
            dataset,
            table: PhonemeTable::new(),
            weighting,
        })
    }

    pub fn visual_codebook(&self) -> &Codebook {
        &self.visual
    }

    pub fn auditory_codebook(&self) -> &Codebook {
        &self.auditory
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn visual_size(&self) -> usize {
        self.visual.size()
    }

    pub fn auditory_size(&self) -> usize {
        self.auditory.size()
    }

    pub fn visual(&self, object: &str) -> Result<&FeatureHistogram> {
        self.objects
            .get(object)
            .ok_or_else(|| Error::UnknownObject(object.to_string()))
    }

    /// Histogram of `words` heard as one stream.
    pub fn auditory<S: AsRef<str>>(&self, words: &[S]) -> Result<FeatureHistogram> {
        let stream = encode_word_sequence(self.dataset.lexicon(), &self.table, words)?;
        self.auditory.encode(&stream, self.weighting)
    }

    /// Errors unless every word and referent of `stim` can be encoded.
    pub fn check(&self, stim: &Stimulus) -> Result<()> {
        if stim.words.is_empty() || stim.referents.is_empty() {
            return Err(Error::EmptyInput("stimulus"));
        }
        for w in &stim.words {
            self.dataset.lexicon().phonemes(w)?;
        }
        for r in &stim.referents {
            self.visual(r)?;
        }
        Ok(())
    }
}

/// Per-trial result of [`ModelState::train_trial_scored`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// Nodes inserted into the association map.
    pub created: usize,
    /// Winner activation of each referent before the trial's learning.
    pub activations: Vec<f64>,
    /// Index of the referent the model would pick.
    pub choice: usize,
}

/// One simulated participant.
#[derive(Debug, Clone)]
pub struct ModelState {
    repr: Arc<Representations>,
    context: Art2Network,
    association: SomMap,
    granularity: ContextGranularity,
    context_held: bool,
    rng: ChaCha8Rng,
    seed: u64,
}

impl ModelState {
    /// Fresh context network and an association map holding one random
    /// node.
    pub fn new(repr: Arc<Representations>, params: &ModelParams, seed: u64) -> Result<Self> {
        let n = repr.visual_size() + repr.auditory_size();
        let mut cparams = params.context.clone();
        cparams.n = n;
        let context = Art2Network::new(cparams)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 2 * n;
        let association =
            SomMap::with_random_node(params.association.map_params(0), dim, rng.gen())?;
        Ok(ModelState {
            repr,
            context,
            association,
            granularity: params.context_granularity,
            context_held: false,
            rng,
            seed,
        })
    }

    pub fn representations(&self) -> &Representations {
        &self.repr
    }

    pub fn association(&self) -> &SomMap {
        &self.association
    }

    pub fn context(&self) -> &Art2Network {
        &self.context
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Input width of the association map.
    pub fn input_dim(&self) -> usize {
        self.association.dim()
    }

    fn advance_context(&mut self, visual: &[f64], auditory: &[f64], phase: Phase) -> Result<()> {
        if self.context_held {
            return Ok(());
        }
        let mut s = Vec::with_capacity(visual.len() + auditory.len());
        s.extend_from_slice(visual);
        s.extend_from_slice(auditory);
        match phase {
            Phase::Train => {
                self.context.train_pattern(&s)?;
            }
            Phase::Test => match self.context.recognize_pattern(&s) {
                Ok(_) => {}
                // nothing stored yet; storing is the only way to move the context
                Err(Error::NoGroups) => {
                    self.context.train_pattern(&s)?;
                }
                Err(e) => return Err(e),
            },
        }
        Ok(())
    }

    /// One input per referent, all sharing the histogram of the word
    /// stream. The context network advances before pairing: once on the
    /// mean visual histogram of the referents, or once per pair under
    /// [`ContextGranularity::Pair`].
    pub fn build_trial_inputs(
        &mut self,
        stim: &Stimulus,
        phase: Phase,
    ) -> Result<Vec<AssociationInput>> {
        self.repr.check(stim)?;
        let repr = Arc::clone(&self.repr);
        let auditory = repr.auditory(&stim.words)?.values;
        let visuals: Vec<&[f64]> = stim
            .referents
            .iter()
            .map(|r| repr.visual(r).map(|h| h.values.as_slice()))
            .collect::<Result<_>>()?;
        match self.granularity {
            ContextGranularity::Trial => {
                let k = visuals.len() as f64;
                let mut mean = vec![0.0; repr.visual_size()];
                for v in &visuals {
                    mean.iter_mut().zip(v.iter()).for_each(|(m, x)| *m += x / k);
                }
                self.advance_context(&mean, &auditory, phase)?;
                let context = self.context.context_vector();
                Ok(visuals
                    .iter()
                    .map(|v| AssociationInput {
                        visual: v.to_vec(),
                        auditory: auditory.clone(),
                        context: context.clone(),
                    })
                    .collect())
            }
            ContextGranularity::Pair => {
                let mut out = Vec::with_capacity(visuals.len());
                for v in &visuals {
                    self.advance_context(v, &auditory, phase)?;
                    out.push(AssociationInput {
                        visual: v.to_vec(),
                        auditory: auditory.clone(),
                        context: self.context.context_vector(),
                    });
                }
                Ok(out)
            }
        }
    }

    /// Feeds the trial's inputs to the association map in shuffled order and
    /// returns how many nodes were inserted.
    pub fn train_trial(&mut self, stim: &Stimulus) -> Result<usize> {
        let inputs = self.build_trial_inputs(stim, Phase::Train)?;
        self.learn(&inputs)
    }

    /// As [`train_trial`](Self::train_trial), also reporting which referent
    /// the map preferred before learning.
    pub fn train_trial_scored(&mut self, stim: &Stimulus) -> Result<TrialOutcome> {
        let inputs = self.build_trial_inputs(stim, Phase::Train)?;
        let activations = inputs
            .iter()
            .map(|i| self.association.best_match(&i.concat()).map(|(_, a)| a))
            .collect::<Result<Vec<_>>>()?;
        let order = self.ranked_order(&activations);
        let created = self.learn(&inputs)?;
        Ok(TrialOutcome {
            created,
            activations,
            choice: order[0],
        })
    }

    fn learn(&mut self, inputs: &[AssociationInput]) -> Result<usize> {
        let mut order: Vec<usize> = (0..inputs.len()).collect();
        order.shuffle(&mut self.rng);
        let mut created = 0;
        for i in order {
            let step = self.association.organize_step(&inputs[i].concat())?;
            if matches!(step.event, StepEvent::Inserted(_)) {
                created += 1;
            }
        }
        Ok(created)
    }

    /// Winner activation for `word` paired with `referent` under the current
    /// context. Nothing is learned.
    pub fn score_pairing(&self, word: &str, referent: &str) -> Result<f64> {
        let input = AssociationInput {
            visual: self.repr.visual(referent)?.values.clone(),
            auditory: self.repr.auditory(&[word])?.values,
            context: self.context.context_vector(),
        };
        Ok(self.association.best_match(&input.concat())?.1)
    }

    /// Indices in a random presentation order, stably sorted by descending
    /// score; equal scores therefore come out in random order.
    fn ranked_order(&mut self, scores: &[f64]) -> Vec<usize> {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.shuffle(&mut self.rng);
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        order
    }

    /// `referents` ordered from strongest to weakest association with
    /// `word` under the current context.
    pub fn rank_candidates(&mut self, word: &str, referents: &[String]) -> Result<Vec<String>> {
        if referents.is_empty() {
            return Err(Error::EmptyInput("candidate referents"));
        }
        let scores = referents
            .iter()
            .map(|r| self.score_pairing(word, r))
            .collect::<Result<Vec<_>>>()?;
        let order = self.ranked_order(&scores);
        Ok(order.into_iter().map(|i| referents[i].clone()).collect())
    }

    /// A test trial: the context advances on the word and its candidates as
    /// it would in training, then the candidates are ranked.
    pub fn test_trial(&mut self, word: &str, candidates: &[String]) -> Result<Vec<String>> {
        let stim = Stimulus::new([word], candidates.iter().cloned());
        let inputs = self.build_trial_inputs(&stim, Phase::Test)?;
        let scores = inputs
            .iter()
            .map(|i| self.association.best_match(&i.concat()).map(|(_, a)| a))
            .collect::<Result<Vec<_>>>()?;
        let order = self.ranked_order(&scores);
        Ok(order.into_iter().map(|i| candidates[i].clone()).collect())
    }

    /// Sets the context units to `uc` and keeps them there; the context
    /// network is no longer presented with anything.
    pub fn hold_context(&mut self, uc: &[f64]) -> Result<()> {
        self.context.set_context(uc)?;
        self.context_held = true;
        Ok(())
    }
}
