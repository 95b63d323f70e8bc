use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::design::{DesignKind, ExperimentDesign, InductionCondition, Presentation, WordList};
use crate::error::{Error, Result};
use crate::pipeline::Stimulus;

/// One word to rank a set of candidate referents for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestItem {
    pub word: String,
    pub candidates: Vec<String>,
    pub correct: Vec<String>,
    /// Double words of ordered designs: the referent shown first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub early: Option<String>,
}

/// Context induction followed by a probe of the ambiguous word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextProbe {
    pub condition: String,
    pub induction: Vec<TestItem>,
    pub probe: TestItem,
    /// Referent of the list presented last.
    pub expected: String,
    /// Referent of the list presented first.
    pub competitor: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSchedule {
    pub design: String,
    pub trials: Vec<Stimulus>,
    /// Index of the first trial of every learning cycle; empty when the
    /// design has no cycles.
    pub cycle_starts: Vec<usize>,
    pub tests: Vec<TestItem>,
    pub probes: Vec<ContextProbe>,
}

impl TrialSchedule {
    /// Trial index range of cycle `c`.
    pub fn cycle(&self, c: usize) -> std::ops::Range<usize> {
        let start = self.cycle_starts[c];
        let end = self
            .cycle_starts
            .get(c + 1)
            .copied()
            .unwrap_or(self.trials.len());
        start..end
    }
}

pub fn gen_schedule(design: &ExperimentDesign, seed: u64) -> Result<TrialSchedule> {
    design.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = TrialSchedule {
        design: design.id.clone(),
        trials: Vec::new(),
        cycle_starts: Vec::new(),
        tests: Vec::new(),
        probes: Vec::new(),
    };
    match &design.kind {
        DesignKind::Uncertainty {
            words,
            per_trial,
            repetitions,
            foils,
        } => {
            let total = words.len() * repetitions;
            if total % per_trial != 0 {
                return Err(Error::Infeasible(format!(
                    "{total} word occurrences do not split into trials of {per_trial}"
                )));
            }
            let demand = vec![*per_trial; total / per_trial];
            let mut trials = fill_slots(&demand, words, *repetitions, &mut rng)?;
            trials.shuffle(&mut rng);
            for t in trials {
                s.trials.push(paired_trial(t, &mut rng));
            }
            for w in words {
                let item = test_item(w, vec![w.clone()], words, *foils, None, &mut rng);
                s.tests.push(item);
            }
            s.tests.shuffle(&mut rng);
        }
        DesignKind::MultiReferent {
            presentation,
            singles,
            doubles,
            noise,
            repetitions,
            trial_mix,
            foils_single,
            foils_double,
        } => {
            multi_referent(
                &mut s,
                &mut rng,
                MultiSpec {
                    presentation: *presentation,
                    singles,
                    doubles: &doubles
                        .iter()
                        .map(|d| (d.word.clone(), d.referents.clone()))
                        .collect::<Vec<_>>(),
                    noise,
                    repetitions: *repetitions,
                    trial_mix: *trial_mix,
                    foils_single: *foils_single,
                    foils_double: *foils_double,
                },
            )?;
        }
        DesignKind::ProposeVerify {
            words,
            cycles,
            referents_per_trial,
        } => {
            let mut order = words.clone();
            order.shuffle(&mut rng);
            for c in 0..*cycles {
                s.cycle_starts.push(s.trials.len());
                // each object is a foil exactly referents_per_trial - 1 times per cycle
                let mut ring = words.clone();
                ring.shuffle(&mut rng);
                let pos: BTreeMap<&String, usize> =
                    ring.iter().enumerate().map(|(i, w)| (w, i)).collect();
                for w in &order {
                    let p = pos[w];
                    let mut refs: Vec<String> = (0..*referents_per_trial)
                        .map(|k| ring[(p + k) % ring.len()].clone())
                        .collect();
                    refs.shuffle(&mut rng);
                    s.trials.push(Stimulus::new([w.clone()], refs));
                }
                debug_assert_eq!(s.trials.len(), (c + 1) * words.len());
            }
        }
        DesignKind::Context {
            list_a,
            list_b,
            ambiguous,
            referent_a,
            referent_b,
            cycles,
            presentations_per_cycle,
            referents_per_trial,
            induction_referents,
            conditions,
        } => {
            let referent = |list: WordList, w: &String| -> String {
                match (w == ambiguous, list) {
                    (true, WordList::A) => referent_a.clone(),
                    (true, WordList::B) => referent_b.clone(),
                    (false, _) => w.clone(),
                }
            };
            let words_of = |list: WordList| match list {
                WordList::A => list_a,
                WordList::B => list_b,
            };
            for c in 0..*cycles {
                s.cycle_starts.push(s.trials.len());
                let list = if c % 2 == 0 { WordList::A } else { WordList::B };
                let words = words_of(list);
                let refs: Vec<String> = words.iter().map(|w| referent(list, w)).collect();
                let mut seq: Vec<usize> = (0..words.len())
                    .flat_map(|i| std::iter::repeat_n(i, *presentations_per_cycle))
                    .collect();
                seq.shuffle(&mut rng);
                for i in seq {
                    let lures: Vec<String> =
                        refs.iter().filter(|r| **r != refs[i]).cloned().collect();
                    let mut shown: Vec<String> = lures
                        .choose_multiple(&mut rng, referents_per_trial - 1)
                        .cloned()
                        .collect();
                    shown.push(refs[i].clone());
                    shown.shuffle(&mut rng);
                    s.trials.push(Stimulus::new([words[i].clone()], shown));
                }
            }
            for name in conditions {
                let cond = InductionCondition::parse(name)?;
                let mut induction = Vec::new();
                for (list, count) in [
                    (cond.first, cond.first_count),
                    (cond.late(), cond.second_count),
                ] {
                    let plain: Vec<String> = words_of(list)
                        .iter()
                        .filter(|w| *w != ambiguous)
                        .cloned()
                        .collect();
                    for w in plain.choose_multiple(&mut rng, count) {
                        let item = test_item(
                            w,
                            vec![w.clone()],
                            &plain,
                            induction_referents - 1,
                            None,
                            &mut rng,
                        );
                        induction.push(item);
                    }
                }
                let plain_of = |list: WordList| -> Vec<String> {
                    words_of(list)
                        .iter()
                        .filter(|w| *w != ambiguous)
                        .cloned()
                        .collect()
                };
                let lure_a = plain_of(WordList::A).choose(&mut rng).cloned().unwrap();
                let lure_b = plain_of(WordList::B).choose(&mut rng).cloned().unwrap();
                let expected = referent(cond.late(), ambiguous);
                let competitor = referent(cond.first, ambiguous);
                let mut candidates = vec![referent_a.clone(), referent_b.clone(), lure_a, lure_b];
                candidates.shuffle(&mut rng);
                s.probes.push(ContextProbe {
                    condition: name.clone(),
                    induction,
                    probe: TestItem {
                        word: ambiguous.clone(),
                        candidates,
                        correct: vec![expected.clone()],
                        early: None,
                    },
                    expected,
                    competitor,
                });
            }
        }
    }
    Ok(s)
}

/// Words in stream order and their referents in presentation order, each
/// shuffled independently.
fn paired_trial(mut words: Vec<String>, rng: &mut ChaCha8Rng) -> Stimulus {
    words.shuffle(rng);
    let mut refs = words.clone();
    refs.shuffle(rng);
    Stimulus {
        words,
        referents: refs,
    }
}

/// `correct` plus `foils` referents drawn from `pool` without the correct
/// ones, shuffled.
fn test_item(
    word: &str,
    correct: Vec<String>,
    pool: &[String],
    foils: usize,
    early: Option<String>,
    rng: &mut ChaCha8Rng,
) -> TestItem {
    let others: Vec<&String> = pool.iter().filter(|p| !correct.contains(p)).collect();
    let mut candidates: Vec<String> = correct.clone();
    candidates.extend(others.choose_multiple(rng, foils).map(|s| (*s).clone()));
    candidates.shuffle(rng);
    TestItem {
        word: word.to_string(),
        candidates,
        correct,
        early,
    }
}

/// Distributes `count` occurrences of every item over trials needing
/// `demand[t]` distinct items each. Trials are filled largest first, each
/// taking the items with the most occurrences left (ties broken at random),
/// which succeeds whenever a solution exists for equal counts. The result is
/// in the order of `demand`.
fn fill_slots(
    demand: &[usize],
    items: &[String],
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<String>>> {
    let needed: usize = demand.iter().sum();
    if needed != items.len() * count {
        return Err(Error::Infeasible(format!(
            "{needed} slots for {} items occurring {count} times each",
            items.len()
        )));
    }
    let mut left = vec![count; items.len()];
    let mut order: Vec<usize> = (0..demand.len()).collect();
    order.shuffle(rng);
    order.sort_by(|a, b| demand[*b].cmp(&demand[*a]));
    let mut out = vec![Vec::new(); demand.len()];
    for t in order {
        let mut idx: Vec<usize> = (0..items.len()).collect();
        idx.shuffle(rng);
        idx.sort_by(|a, b| left[*b].cmp(&left[*a]));
        let take = &idx[..demand[t].min(idx.len())];
        if take.len() < demand[t] || take.iter().any(|&i| left[i] == 0) {
            return Err(Error::Infeasible(format!(
                "no {} distinct items left for a trial",
                demand[t]
            )));
        }
        for &i in take {
            left[i] -= 1;
            out[t].push(items[i].clone());
        }
    }
    Ok(out)
}

struct MultiSpec<'a> {
    presentation: Presentation,
    singles: &'a [String],
    doubles: &'a [(String, [String; 2])],
    noise: &'a [String],
    repetitions: usize,
    trial_mix: [usize; 3],
    foils_single: usize,
    foils_double: usize,
}

/// Trial types as (singles, doubles, fillers).
const MIX_TYPES: [(usize, usize, usize); 3] = [(4, 0, 0), (2, 1, 1), (0, 2, 2)];

fn multi_referent(s: &mut TrialSchedule, rng: &mut ChaCha8Rng, m: MultiSpec<'_>) -> Result<()> {
    let mut types = Vec::new();
    for (k, &n) in m.trial_mix.iter().enumerate() {
        types.extend(std::iter::repeat_n(MIX_TYPES[k], n));
    }
    types.shuffle(rng);
    let reps = m.repetitions;
    let double_words: Vec<String> = m.doubles.iter().map(|d| d.0.clone()).collect();
    let single_demand: Vec<usize> = types.iter().map(|t| t.0).collect();
    let singles = fill_slots(&single_demand, m.singles, reps, rng)?;
    let (doubles, noise) = if m.presentation == Presentation::Both {
        let d: Vec<usize> = types.iter().map(|t| t.1).collect();
        let f: Vec<usize> = types.iter().map(|t| t.2).collect();
        (
            fill_slots(&d, &double_words, reps, rng)?,
            fill_slots(&f, m.noise, reps, rng)?,
        )
    } else {
        if !m.noise.is_empty() {
            return Err(Error::Infeasible(
                "noise words need both referents of doubles on display".into(),
            ));
        }
        // fillers are further double words, each shown with one referent
        let d: Vec<usize> = types.iter().map(|t| t.1 + t.2).collect();
        (
            fill_slots(&d, &double_words, 2 * reps, rng)?,
            vec![Vec::new(); types.len()],
        )
    };

    // which referent each double-word occurrence shows, in trial order
    let referent_of: BTreeMap<&String, &[String; 2]> =
        m.doubles.iter().map(|(w, r)| (w, r)).collect();
    let mut shown: BTreeMap<&String, Vec<String>> = BTreeMap::new();
    let mut early: BTreeMap<&String, String> = BTreeMap::new();
    if m.presentation != Presentation::Both {
        for (w, r) in m.doubles {
            let first = if m.presentation == Presentation::Ordered {
                rng.gen_range(0..2)
            } else {
                0
            };
            let mut seq: Vec<String> = std::iter::repeat_n(r[first].clone(), reps)
                .chain(std::iter::repeat_n(r[1 - first].clone(), reps))
                .collect();
            if m.presentation == Presentation::One {
                seq.shuffle(rng);
            } else {
                early.insert(w, r[first].clone());
            }
            seq.reverse();
            shown.insert(w, seq);
        }
    }

    for t in 0..types.len() {
        let mut words: Vec<String> = Vec::new();
        let mut refs: Vec<String> = Vec::new();
        for w in &singles[t] {
            words.push(w.clone());
            refs.push(w.clone());
        }
        for w in &doubles[t] {
            words.push(w.clone());
            if m.presentation == Presentation::Both {
                refs.extend(referent_of[w].iter().cloned());
            } else {
                refs.push(shown.get_mut(w).unwrap().pop().unwrap());
            }
        }
        words.extend(noise[t].iter().cloned());
        words.shuffle(rng);
        refs.shuffle(rng);
        s.trials.push(Stimulus {
            words,
            referents: refs,
        });
    }

    let pool: Vec<String> = m
        .singles
        .iter()
        .cloned()
        .chain(m.doubles.iter().flat_map(|d| d.1.iter().cloned()))
        .collect();
    for w in m.singles {
        s.tests.push(test_item(
            w,
            vec![w.clone()],
            &pool,
            m.foils_single,
            None,
            rng,
        ));
    }
    for (w, r) in m.doubles {
        let e = early.get(w).cloned();
        s.tests
            .push(test_item(w, r.to_vec(), &pool, m.foils_double, e, rng));
    }
    s.tests.shuffle(rng);
    Ok(())
}
