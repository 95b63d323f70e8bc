use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shipped designs as `(id, toml)`.
pub const BUILTIN_DESIGNS: [(&str, &str); 8] = [
    ("exp1_2x2", include_str!("../../designs/exp1_2x2.toml")),
    ("exp1_3x3", include_str!("../../designs/exp1_3x3.toml")),
    ("exp1_4x4", include_str!("../../designs/exp1_4x4.toml")),
    ("exp2", include_str!("../../designs/exp2.toml")),
    ("exp3", include_str!("../../designs/exp3.toml")),
    ("exp4", include_str!("../../designs/exp4.toml")),
    ("exp5", include_str!("../../designs/exp5.toml")),
    ("exp6", include_str!("../../designs/exp6.toml")),
];

/// Experiment names accepted on the command line and the designs they run.
/// `exp1` runs its three conditions on the same participant seeds.
pub fn experiment_designs(id: &str) -> Result<Vec<ExperimentDesign>> {
    let ids: Vec<&str> = match id {
        "exp1" => vec!["exp1_2x2", "exp1_3x3", "exp1_4x4"],
        other => vec![other],
    };
    ids.into_iter().map(ExperimentDesign::builtin).collect()
}

pub fn experiment_ids() -> Vec<&'static str> {
    let mut ids = vec!["exp1"];
    ids.extend(BUILTIN_DESIGNS.iter().map(|(id, _)| *id));
    ids
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleWord {
    pub word: String,
    pub referents: [String; 2],
}

/// How a double word's two referents are shown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presentation {
    /// Both referents in every trial with the word.
    Both,
    /// One referent per trial, in random order.
    One,
    /// One referent per trial; every trial with one referent, chosen at
    /// random, comes before any trial with the other.
    Ordered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DesignKind {
    /// `per_trial` words with their referents per trial; each word occurs
    /// `repetitions` times. Every word is tested against its referent and
    /// `foils` other trained referents.
    Uncertainty {
        words: Vec<String>,
        per_trial: usize,
        repetitions: usize,
        foils: usize,
    },
    /// Four-word trials mixing single, double and noise words.
    MultiReferent {
        presentation: Presentation,
        singles: Vec<String>,
        doubles: Vec<DoubleWord>,
        #[serde(default)]
        noise: Vec<String>,
        repetitions: usize,
        trial_mix: [usize; 3],
        foils_single: usize,
        foils_double: usize,
    },
    /// One word per trial among `referents_per_trial` pictures; the model's
    /// choice is recorded on every trial.
    ProposeVerify {
        words: Vec<String>,
        cycles: usize,
        referents_per_trial: usize,
    },
    /// Two word lists sharing the `ambiguous` word.
    Context {
        list_a: Vec<String>,
        list_b: Vec<String>,
        ambiguous: String,
        referent_a: String,
        referent_b: String,
        cycles: usize,
        presentations_per_cycle: usize,
        referents_per_trial: usize,
        induction_referents: usize,
        conditions: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDesign {
    pub id: String,
    pub participants: usize,
    #[serde(flatten)]
    pub kind: DesignKind,
}

/// A parsed context-induction condition such as `4a+2b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InductionCondition {
    pub first: WordList,
    pub first_count: usize,
    pub second_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordList {
    A,
    B,
}

impl WordList {
    pub fn other(self) -> WordList {
        match self {
            WordList::A => WordList::B,
            WordList::B => WordList::A,
        }
    }
}

impl InductionCondition {
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidParam(format!("bad induction condition `{text}`"));
        let (l, r) = text.split_once('+').ok_or_else(bad)?;
        let part = |s: &str| -> Result<(usize, WordList)> {
            let s = s.trim();
            let (n, list) = s.split_at(s.len().saturating_sub(1));
            let list = match list {
                "a" | "A" => WordList::A,
                "b" | "B" => WordList::B,
                _ => return Err(bad()),
            };
            Ok((n.parse().map_err(|_| bad())?, list))
        };
        let (n1, l1) = part(l)?;
        let (n2, l2) = part(r)?;
        if l1 == l2 || n1 == 0 || n2 == 0 {
            return Err(bad());
        }
        Ok(InductionCondition {
            first: l1,
            first_count: n1,
            second_count: n2,
        })
    }

    /// The list presented last, whose referent the probe should recover.
    pub fn late(&self) -> WordList {
        self.first.other()
    }

    /// Condition name without list order, e.g. `4+2`.
    pub fn group(&self) -> String {
        format!("{}+{}", self.first_count, self.second_count)
    }
}

impl ExperimentDesign {
    pub fn builtin(id: &str) -> Result<Self> {
        let (_, text) = BUILTIN_DESIGNS
            .iter()
            .find(|(d, _)| *d == id)
            .ok_or_else(|| Error::InvalidParam(format!("unknown experiment `{id}`")))?;
        ExperimentDesign::parse(text, id)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentDesign::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let d: ExperimentDesign = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start].lines().count().max(1))
                .unwrap_or(0);
            Error::parse(source, line, e.message().to_string())
        })?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("design serializes")
    }

    /// Static checks that do not need a schedule.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(format!("design `{}`: {m}", self.id)));
        if self.participants == 0 {
            return bad("no participants".into());
        }
        match &self.kind {
            DesignKind::Uncertainty {
                words,
                per_trial,
                repetitions,
                foils,
            } => {
                distinct(&self.id, words.iter())?;
                if *per_trial == 0 || *per_trial > words.len() || *repetitions == 0 {
                    return bad("per_trial and repetitions must fit the word list".into());
                }
                if foils + 1 > words.len() {
                    return bad("more foils than trained referents".into());
                }
            }
            DesignKind::MultiReferent {
                singles,
                doubles,
                noise,
                repetitions,
                foils_single,
                foils_double,
                ..
            } => {
                distinct(
                    &self.id,
                    singles
                        .iter()
                        .chain(doubles.iter().map(|d| &d.word))
                        .chain(noise),
                )?;
                distinct(
                    &self.id,
                    singles
                        .iter()
                        .chain(doubles.iter().flat_map(|d| d.referents.iter())),
                )?;
                if *repetitions == 0 {
                    return bad("repetitions must be positive".into());
                }
                let referents = singles.len() + 2 * doubles.len();
                if foils_single + 1 > referents || foils_double + 2 > referents {
                    return bad("more foils than trained referents".into());
                }
            }
            DesignKind::ProposeVerify {
                words,
                cycles,
                referents_per_trial,
            } => {
                distinct(&self.id, words.iter())?;
                if *cycles == 0 || *referents_per_trial == 0 || *referents_per_trial > words.len() {
                    return bad("referents_per_trial must fit the word list".into());
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
                distinct(&self.id, list_a.iter())?;
                distinct(&self.id, list_b.iter())?;
                if !list_a.contains(ambiguous) || !list_b.contains(ambiguous) {
                    return bad("both lists must contain the ambiguous word".into());
                }
                let shared = list_a.iter().filter(|w| list_b.contains(w)).count();
                if shared != 1 {
                    return bad("the lists must share exactly the ambiguous word".into());
                }
                if referent_a == referent_b {
                    return bad("the ambiguous word needs two referents".into());
                }
                let shortest = list_a.len().min(list_b.len());
                if *cycles == 0 || *presentations_per_cycle == 0 {
                    return bad("cycles and presentations must be positive".into());
                }
                if *referents_per_trial == 0 || *referents_per_trial > shortest {
                    return bad("referents_per_trial must fit the lists".into());
                }
                // induction trials leave out the ambiguous referent
                if *induction_referents == 0 || *induction_referents > shortest - 1 {
                    return bad("induction_referents must fit the lists".into());
                }
                if conditions.is_empty() {
                    return bad("no test conditions".into());
                }
                for c in conditions {
                    let c = InductionCondition::parse(c)?;
                    let avail = |l: WordList| match l {
                        WordList::A => list_a.len() - 1,
                        WordList::B => list_b.len() - 1,
                    };
                    if c.first_count > avail(c.first) || c.second_count > avail(c.late()) {
                        return bad("induction needs more distinct words than a list has".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// Every word the design can present.
    pub fn words(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match &self.kind {
            DesignKind::Uncertainty { words, .. } | DesignKind::ProposeVerify { words, .. } => {
                out.extend(words.iter().cloned())
            }
            DesignKind::MultiReferent {
                singles,
                doubles,
                noise,
                ..
            } => {
                out.extend(singles.iter().cloned());
                out.extend(doubles.iter().map(|d| d.word.clone()));
                out.extend(noise.iter().cloned());
            }
            DesignKind::Context { list_a, list_b, .. } => {
                out.extend(list_a.iter().cloned());
                out.extend(list_b.iter().cloned());
            }
        }
        out
    }

    /// Every object the design can show.
    pub fn objects(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match &self.kind {
            DesignKind::Uncertainty { words, .. } | DesignKind::ProposeVerify { words, .. } => {
                out.extend(words.iter().cloned())
            }
            DesignKind::MultiReferent {
                singles, doubles, ..
            } => {
                out.extend(singles.iter().cloned());
                out.extend(doubles.iter().flat_map(|d| d.referents.iter().cloned()));
            }
            DesignKind::Context {
                list_a,
                list_b,
                ambiguous,
                referent_a,
                referent_b,
                ..
            } => {
                out.extend(
                    list_a
                        .iter()
                        .chain(list_b)
                        .filter(|w| *w != ambiguous)
                        .cloned(),
                );
                out.insert(referent_a.clone());
                out.insert(referent_b.clone());
            }
        }
        out
    }
}

/// Objects shown by any shipped design, sorted.
pub fn builtin_objects() -> Vec<String> {
    let mut all = BTreeSet::new();
    for (id, _) in BUILTIN_DESIGNS {
        all.extend(
            ExperimentDesign::builtin(id)
                .expect("shipped design")
                .objects(),
        );
    }
    all.into_iter().collect()
}

fn distinct<'a>(id: &str, items: impl Iterator<Item = &'a String>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for w in items {
        if !seen.insert(w) {
            return Err(Error::InvalidParam(format!(
                "design `{id}`: `{w}` listed twice"
            )));
        }
    }
    Ok(())
}
