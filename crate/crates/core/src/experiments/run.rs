use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::design::{DesignKind, ExperimentDesign, InductionCondition, Presentation};
use super::schedule::{gen_schedule, TestItem};
use super::scoring::{order_rates, score_conditional, score_rank_test, OrderedDouble, RankOutcome};
use crate::config::ModelParams;
use crate::error::Result;
use crate::pipeline::{ModelState, Representations};

/// Ranking produced for one test item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemResult {
    pub word: String,
    pub ranked: Vec<String>,
    pub correct: Vec<String>,
    pub outcome: RankOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub early_first: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantResult {
    pub design: String,
    pub participant: usize,
    pub seed: u64,
    /// Named proportions and counts; a metric is missing when undefined for
    /// this participant.
    pub scores: BTreeMap<String, f64>,
    pub items: Vec<ItemResult>,
    /// Association nodes inserted by each training trial.
    pub created_per_trial: Vec<usize>,
    /// Whether the choice made during each training trial was right; only
    /// for designs tested on every trial.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trial_correct: Vec<bool>,
    pub association_nodes: usize,
    pub context_groups: usize,
}

/// A reported quantity and the score expected from guessing, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub chance: Option<f64>,
}

fn metric(name: impl Into<String>, chance: Option<f64>) -> Metric {
    Metric {
        name: name.into(),
        chance,
    }
}

/// Chance lines of the two-referent scores.
pub const EITHER_CHANCE: f64 = 0.5;
pub const BOTH_CHANCE: f64 = 0.17;

/// Metrics reported for `design`, in report order.
pub fn design_metrics(design: &ExperimentDesign) -> Vec<Metric> {
    match &design.kind {
        DesignKind::Uncertainty { foils, .. } => {
            vec![metric("accuracy", Some(1.0 / (foils + 1) as f64))]
        }
        DesignKind::MultiReferent {
            presentation,
            foils_single,
            ..
        } => {
            let mut m = vec![
                metric("single", Some(1.0 / (foils_single + 1) as f64)),
                metric("either", Some(EITHER_CHANCE)),
                metric("both", Some(BOTH_CHANCE)),
            ];
            if *presentation == Presentation::Ordered {
                m.push(metric("early_first", None));
                m.push(metric("late_first", None));
            }
            m
        }
        DesignKind::ProposeVerify {
            cycles,
            referents_per_trial,
            ..
        } => {
            let chance = Some(1.0 / *referents_per_trial as f64);
            let mut m: Vec<Metric> = (1..=*cycles)
                .map(|c| metric(format!("cycle_{c}"), chance))
                .collect();
            m.push(metric("after_right", chance));
            m.push(metric("after_wrong", chance));
            m.extend((1..=*cycles).map(|c| metric(format!("nodes_cycle_{c}"), None)));
            m
        }
        DesignKind::Context { conditions, .. } => {
            let mut groups: Vec<String> = Vec::new();
            for c in conditions {
                if let Ok(c) = InductionCondition::parse(c) {
                    if !groups.contains(&c.group()) {
                        groups.push(c.group());
                    }
                }
            }
            groups
                .into_iter()
                .map(|g| metric(format!("ctx_{g}"), Some(0.25)))
                .collect()
        }
    }
}

/// Within-design pairs of metrics compared by a paired test, the first
/// expected to be larger.
pub fn design_pairs(design: &ExperimentDesign) -> Vec<(String, String)> {
    let p = |a: &str, b: &str| (a.to_string(), b.to_string());
    match &design.kind {
        DesignKind::Uncertainty { .. } => Vec::new(),
        DesignKind::MultiReferent { presentation, .. } => {
            let mut v = vec![p("single", "both")];
            if *presentation == Presentation::Ordered {
                v.push(p("early_first", "late_first"));
            }
            v
        }
        DesignKind::ProposeVerify { .. } => vec![p("after_right", "after_wrong")],
        DesignKind::Context { .. } => {
            let names: Vec<String> = design_metrics(design).into_iter().map(|m| m.name).collect();
            names
                .windows(2)
                .map(|w| (w[0].clone(), w[1].clone()))
                .collect()
        }
    }
}

/// Independent stream `tag` of the seed `base`.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(base ^ mix(tag))
}

/// Seed of the shared codebooks of a run.
pub fn codebook_seed(run_seed: u64) -> u64 {
    derive_seed(run_seed, u64::MAX)
}

/// Seed of participant `i` of a run; equal across the designs of one
/// experiment so that conditions can be compared pairwise.
pub fn participant_seed(run_seed: u64, i: usize) -> u64 {
    derive_seed(run_seed, i as u64)
}

fn rank_item(model: &mut ModelState, item: &TestItem) -> Result<ItemResult> {
    let ranked = model.test_trial(&item.word, &item.candidates)?;
    let outcome = score_rank_test(&ranked, &item.correct)?;
    let early_first = item.early.as_ref().map(|e| &ranked[0] == e);
    Ok(ItemResult {
        word: item.word.clone(),
        ranked,
        correct: item.correct.clone(),
        outcome,
        early_first,
        condition: None,
    })
}

fn fraction(items: &[&ItemResult], hit: RankOutcome) -> Option<f64> {
    (!items.is_empty())
        .then(|| items.iter().filter(|i| i.outcome == hit).count() as f64 / items.len() as f64)
}

/// Trains a fresh model on a schedule drawn for `seed` and runs the
/// design's test phase.
pub fn run_participant(
    design: &ExperimentDesign,
    repr: Arc<Representations>,
    params: &ModelParams,
    participant: usize,
    seed: u64,
) -> Result<ParticipantResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schedule = gen_schedule(design, rng.gen())?;
    let mut model = ModelState::new(repr, params, rng.gen())?;
    let mut res = ParticipantResult {
        design: design.id.clone(),
        participant,
        seed,
        scores: BTreeMap::new(),
        items: Vec::new(),
        created_per_trial: Vec::with_capacity(schedule.trials.len()),
        trial_correct: Vec::new(),
        association_nodes: 0,
        context_groups: 0,
    };

    match &design.kind {
        DesignKind::ProposeVerify { .. } => {
            for stim in &schedule.trials {
                let out = model.train_trial_scored(stim)?;
                res.created_per_trial.push(out.created);
                res.trial_correct
                    .push(stim.referents[out.choice] == stim.words[0]);
            }
            let cycles: Vec<Vec<bool>> = (0..schedule.cycle_starts.len())
                .map(|c| res.trial_correct[schedule.cycle(c)].to_vec())
                .collect();
            let cond = score_conditional(&cycles)?;
            for (c, acc) in cond.per_cycle.iter().enumerate() {
                res.scores.insert(format!("cycle_{}", c + 1), *acc);
                let r = schedule.cycle(c);
                let n = r.len() as f64;
                let created: usize = res.created_per_trial[r].iter().sum();
                res.scores
                    .insert(format!("nodes_cycle_{}", c + 1), created as f64 / n);
            }
            if let Some(v) = cond.after_right {
                res.scores.insert("after_right".into(), v);
            }
            if let Some(v) = cond.after_wrong {
                res.scores.insert("after_wrong".into(), v);
            }
        }
        _ => {
            for stim in &schedule.trials {
                res.created_per_trial.push(model.train_trial(stim)?);
            }
        }
    }

    match &design.kind {
        DesignKind::Uncertainty { .. } => {
            for item in &schedule.tests {
                res.items.push(rank_item(&mut model, item)?);
            }
            let all: Vec<&ItemResult> = res.items.iter().collect();
            if let Some(v) = fraction(&all, RankOutcome::Single) {
                res.scores.insert("accuracy".into(), v);
            }
        }
        DesignKind::MultiReferent { presentation, .. } => {
            for item in &schedule.tests {
                res.items.push(rank_item(&mut model, item)?);
            }
            let singles: Vec<&ItemResult> =
                res.items.iter().filter(|i| i.correct.len() == 1).collect();
            let doubles: Vec<&ItemResult> =
                res.items.iter().filter(|i| i.correct.len() == 2).collect();
            let mut put = |k: &str, v: Option<f64>| {
                if let Some(v) = v {
                    res.scores.insert(k.to_string(), v);
                }
            };
            put("single", fraction(&singles, RankOutcome::Single));
            put("either", fraction(&doubles, RankOutcome::Either));
            put("both", fraction(&doubles, RankOutcome::Double));
            if *presentation == Presentation::Ordered {
                let ordered: Vec<OrderedDouble> = doubles
                    .iter()
                    .map(|i| OrderedDouble {
                        outcome: i.outcome,
                        early_first: i.early_first.unwrap_or(false),
                    })
                    .collect();
                let (e, l) = order_rates(&ordered);
                put("early_first", Some(e));
                put("late_first", Some(l));
            }
        }
        DesignKind::ProposeVerify { .. } => {}
        DesignKind::Context { .. } => {
            let mut by_group: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for probe in &schedule.probes {
                // every condition starts from the trained state
                let mut m = model.clone();
                for item in &probe.induction {
                    m.test_trial(&item.word, &item.candidates)?;
                }
                let mut r = rank_item(&mut m, &probe.probe)?;
                r.condition = Some(probe.condition.clone());
                let hit = r.outcome == RankOutcome::Single;
                res.items.push(r);
                let group = InductionCondition::parse(&probe.condition)?.group();
                by_group
                    .entry(group)
                    .or_default()
                    .push(if hit { 1.0 } else { 0.0 });
            }
            for (g, hits) in by_group {
                let mean = hits.iter().sum::<f64>() / hits.len() as f64;
                res.scores.insert(format!("ctx_{g}"), mean);
            }
        }
    }
    res.association_nodes = model.association().len();
    res.context_groups = model.context().group_count();
    Ok(res)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRun {
    pub design: ExperimentDesign,
    pub participants: Vec<ParticipantResult>,
}

/// Runs `participants` simulated participants of every design in
/// parallel. Participant `i` uses the same seed in every design.
pub fn run_designs(
    designs: &[ExperimentDesign],
    repr: Arc<Representations>,
    params: &ModelParams,
    run_seed: u64,
    participants: Option<usize>,
) -> Result<Vec<DesignRun>> {
    designs
        .iter()
        .map(|d| {
            let n = participants.unwrap_or(d.participants);
            let results = (0..n)
                .into_par_iter()
                .map(|i| {
                    run_participant(
                        d,
                        Arc::clone(&repr),
                        params,
                        i,
                        participant_seed(run_seed, i),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DesignRun {
                design: d.clone(),
                participants: results,
            })
        })
        .collect()
}
