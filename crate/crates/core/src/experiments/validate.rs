//! Schedule checks by direct counting over the generated trials, without
//! reusing any generator logic.

use std::collections::{BTreeMap, BTreeSet};

use super::design::{DesignKind, ExperimentDesign, InductionCondition, Presentation, WordList};
use super::schedule::{TestItem, TrialSchedule};
use crate::pipeline::Stimulus;

/// Every constraint of `design` that `schedule` violates; empty when the
/// schedule is valid.
pub fn validate_schedule(design: &ExperimentDesign, schedule: &TrialSchedule) -> Vec<String> {
    let mut v = Violations::default();
    if schedule.design != design.id {
        v.push(format!("schedule is for `{}`", schedule.design));
    }
    for (t, s) in schedule.trials.iter().enumerate() {
        if has_duplicates(&s.words) || has_duplicates(&s.referents) {
            v.push(format!("trial {t} repeats a word or referent"));
        }
    }
    match &design.kind {
        DesignKind::Uncertainty {
            words,
            per_trial,
            repetitions,
            foils,
        } => {
            v.expect_eq(
                "trials",
                schedule.trials.len(),
                words.len() * repetitions / per_trial,
            );
            for (t, s) in schedule.trials.iter().enumerate() {
                if s.words.len() != *per_trial || s.referents.len() != *per_trial {
                    v.push(format!("trial {t} is not {per_trial}x{per_trial}"));
                }
                let ws: BTreeSet<&String> = s.words.iter().collect();
                let rs: BTreeSet<&String> = s.referents.iter().collect();
                if ws != rs {
                    v.push(format!("trial {t}: a word is present without its referent"));
                }
            }
            let counts = word_counts(&schedule.trials);
            for w in words {
                v.expect_eq(
                    &format!("occurrences of `{w}`"),
                    counts.get(w).copied().unwrap_or(0),
                    *repetitions,
                );
            }
            check_tests(
                &mut v,
                &schedule.tests,
                words.len(),
                |w| vec![w.to_string()],
                foils + 1,
                words,
            );
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
            let reps = *repetitions;
            v.expect_eq(
                "trials",
                schedule.trials.len(),
                trial_mix.iter().sum::<usize>(),
            );
            let single_set: BTreeSet<&String> = singles.iter().collect();
            let double_of: BTreeMap<&String, &[String; 2]> =
                doubles.iter().map(|d| (&d.word, &d.referents)).collect();
            let noise_set: BTreeSet<&String> = noise.iter().collect();

            let mut mix = [0usize; 3];
            for (t, s) in schedule.trials.iter().enumerate() {
                if s.words.len() != 4 || s.referents.len() != 4 {
                    v.push(format!("trial {t} is not 4x4"));
                }
                let ns = s.words.iter().filter(|w| single_set.contains(w)).count();
                let nd = s.words.iter().filter(|w| double_of.contains_key(w)).count();
                let nn = s.words.iter().filter(|w| noise_set.contains(w)).count();
                if ns + nd + nn != s.words.len() {
                    v.push(format!("trial {t} has a word outside the design"));
                }
                let kind = match (*presentation, ns, nd, nn) {
                    (_, 4, 0, 0) => Some(0),
                    (Presentation::Both, 2, 1, 1)
                    | (Presentation::One | Presentation::Ordered, 2, 2, 0) => Some(1),
                    (Presentation::Both, 0, 2, 2)
                    | (Presentation::One | Presentation::Ordered, 0, 4, 0) => Some(2),
                    _ => None,
                };
                match kind {
                    Some(k) => mix[k] += 1,
                    None => v.push(format!("trial {t} has composition {ns}/{nd}/{nn}")),
                }
                for w in s.words.iter().filter(|w| single_set.contains(w)) {
                    if !s.referents.contains(w) {
                        v.push(format!("trial {t}: single `{w}` without its referent"));
                    }
                }
                for r in &s.referents {
                    let owner_present = s.words.contains(r)
                        || doubles
                            .iter()
                            .any(|d| d.referents.contains(r) && s.words.contains(&d.word));
                    if !owner_present {
                        v.push(format!("trial {t}: referent `{r}` without its word"));
                    }
                }
                for w in s.words.iter().filter(|w| double_of.contains_key(w)) {
                    let shown = double_of[w]
                        .iter()
                        .filter(|r| s.referents.contains(r))
                        .count();
                    let want = if *presentation == Presentation::Both {
                        2
                    } else {
                        1
                    };
                    if shown != want {
                        v.push(format!("trial {t}: double `{w}` shows {shown} referents"));
                    }
                }
            }
            if mix != *trial_mix {
                v.push(format!("trial mix {mix:?}, expected {trial_mix:?}"));
            }
            let counts = word_counts(&schedule.trials);
            let pairs = pair_counts(&schedule.trials);
            for w in singles.iter().chain(noise) {
                v.expect_eq(
                    &format!("occurrences of `{w}`"),
                    counts.get(w).copied().unwrap_or(0),
                    reps,
                );
            }
            for w in singles {
                v.expect_eq(
                    &format!("co-occurrences of `{w}`"),
                    pair(&pairs, w, w),
                    reps,
                );
            }
            for d in doubles {
                for r in &d.referents {
                    v.expect_eq(
                        &format!("co-occurrences of `{}`-`{r}`", d.word),
                        pair(&pairs, &d.word, r),
                        reps,
                    );
                }
                if *presentation == Presentation::Ordered {
                    let idx = |r: &String| -> Vec<usize> {
                        schedule
                            .trials
                            .iter()
                            .enumerate()
                            .filter(|(_, s)| s.words.contains(&d.word) && s.referents.contains(r))
                            .map(|(i, _)| i)
                            .collect()
                    };
                    let a = idx(&d.referents[0]);
                    let b = idx(&d.referents[1]);
                    let ordered = |x: &[usize], y: &[usize]| match (x.iter().max(), y.iter().min())
                    {
                        (Some(mx), Some(mn)) => mx < mn,
                        _ => false,
                    };
                    if !ordered(&a, &b) && !ordered(&b, &a) {
                        v.push(format!("double `{}`: referent blocks interleave", d.word));
                    }
                    let early = schedule
                        .tests
                        .iter()
                        .find(|i| i.word == d.word)
                        .and_then(|i| i.early.clone());
                    let truly_early = if ordered(&a, &b) {
                        &d.referents[0]
                    } else {
                        &d.referents[1]
                    };
                    if early.as_ref() != Some(truly_early) {
                        v.push(format!(
                            "double `{}`: test item names the wrong early referent",
                            d.word
                        ));
                    }
                }
            }
            let pool: Vec<String> = singles
                .iter()
                .cloned()
                .chain(doubles.iter().flat_map(|d| d.referents.iter().cloned()))
                .collect();
            v.expect_eq(
                "test items",
                schedule.tests.len(),
                singles.len() + doubles.len(),
            );
            for item in &schedule.tests {
                let (correct, size) = if let Some(r) = double_of.get(&item.word) {
                    (r.to_vec(), foils_double + 2)
                } else {
                    (vec![item.word.clone()], foils_single + 1)
                };
                check_item(&mut v, item, &correct, size, &pool);
            }
        }
        DesignKind::ProposeVerify {
            words,
            cycles,
            referents_per_trial,
        } => {
            v.expect_eq("trials", schedule.trials.len(), words.len() * cycles);
            v.expect_eq("cycles", schedule.cycle_starts.len(), *cycles);
            let mut first_order: Option<Vec<&String>> = None;
            for c in 0..schedule.cycle_starts.len() {
                let range = schedule.cycle(c);
                let order: Vec<&String> = schedule.trials[range.clone()]
                    .iter()
                    .flat_map(|s| s.words.iter())
                    .collect();
                let set: BTreeSet<&String> = order.iter().copied().collect();
                if order.len() != words.len() || set.len() != words.len() {
                    v.push(format!("cycle {c} does not present every word once"));
                }
                match &first_order {
                    None => first_order = Some(order),
                    Some(f) if *f != order => v.push(format!("cycle {c} changes the word order")),
                    _ => {}
                }
                for t in range {
                    let s = &schedule.trials[t];
                    if s.words.len() != 1 || s.referents.len() != *referents_per_trial {
                        v.push(format!("trial {t} is not 1x{referents_per_trial}"));
                    } else if !s.referents.contains(&s.words[0]) {
                        v.push(format!("trial {t} lacks the correct referent"));
                    }
                    if s.referents.iter().any(|r| !words.contains(r)) {
                        v.push(format!("trial {t} shows an unknown referent"));
                    }
                }
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
            let list_words = |l: WordList| if l == WordList::A { list_a } else { list_b };
            let ref_of = |l: WordList, w: &String| -> String {
                if w == ambiguous {
                    if l == WordList::A {
                        referent_a.clone()
                    } else {
                        referent_b.clone()
                    }
                } else {
                    w.clone()
                }
            };
            v.expect_eq("cycles", schedule.cycle_starts.len(), *cycles);
            for c in 0..schedule.cycle_starts.len() {
                let list = if c % 2 == 0 { WordList::A } else { WordList::B };
                let words = list_words(list);
                let refs: BTreeSet<String> = words.iter().map(|w| ref_of(list, w)).collect();
                let range = schedule.cycle(c);
                v.expect_eq(
                    &format!("cycle {c} length"),
                    range.len(),
                    words.len() * presentations_per_cycle,
                );
                let counts = word_counts(&schedule.trials[range.clone()]);
                for w in words {
                    v.expect_eq(
                        &format!("cycle {c} occurrences of `{w}`"),
                        counts.get(w).copied().unwrap_or(0),
                        *presentations_per_cycle,
                    );
                }
                for t in range {
                    let s = &schedule.trials[t];
                    if s.words.len() != 1 || s.referents.len() != *referents_per_trial {
                        v.push(format!("trial {t} is not 1x{referents_per_trial}"));
                        continue;
                    }
                    if !words.contains(&s.words[0]) {
                        v.push(format!("trial {t}: word from the wrong list for cycle {c}"));
                    }
                    if !s.referents.contains(&ref_of(list, &s.words[0])) {
                        v.push(format!("trial {t} lacks the correct referent"));
                    }
                    if s.referents.iter().any(|r| !refs.contains(r)) {
                        v.push(format!(
                            "trial {t}: referent from the wrong list for cycle {c}"
                        ));
                    }
                }
            }
            v.expect_eq("probes", schedule.probes.len(), conditions.len());
            for (p, name) in schedule.probes.iter().zip(conditions) {
                let Ok(cond) = InductionCondition::parse(name) else {
                    v.push(format!("bad condition `{name}`"));
                    continue;
                };
                if p.condition != *name {
                    v.push(format!(
                        "probe for `{}` where `{name}` was due",
                        p.condition
                    ));
                }
                v.expect_eq(
                    &format!("{name} induction trials"),
                    p.induction.len(),
                    cond.first_count + cond.second_count,
                );
                for (i, item) in p.induction.iter().enumerate() {
                    let list = if i < cond.first_count {
                        cond.first
                    } else {
                        cond.late()
                    };
                    let plain: Vec<String> = list_words(list)
                        .iter()
                        .filter(|w| *w != ambiguous)
                        .cloned()
                        .collect();
                    if !plain.contains(&item.word) {
                        v.push(format!(
                            "{name}: induction word `{}` not from its list",
                            item.word
                        ));
                    }
                    check_item(
                        &mut v,
                        item,
                        std::slice::from_ref(&item.word),
                        *induction_referents,
                        &plain,
                    );
                }
                let expected = ref_of(cond.late(), ambiguous);
                if p.expected != expected || p.competitor != ref_of(cond.first, ambiguous) {
                    v.push(format!("{name}: wrong expected referent"));
                }
                let c = &p.probe.candidates;
                let lure_a = c
                    .iter()
                    .filter(|r| list_a.contains(r) && *r != ambiguous)
                    .count();
                let lure_b = c
                    .iter()
                    .filter(|r| list_b.contains(r) && *r != ambiguous)
                    .count();
                if p.probe.word != *ambiguous
                    || c.len() != 4
                    || !c.contains(referent_a)
                    || !c.contains(referent_b)
                    || lure_a != 1
                    || lure_b != 1
                {
                    v.push(format!("{name}: probe candidates {c:?}"));
                }
            }
        }
    }
    v.0
}

#[derive(Default)]
struct Violations(Vec<String>);

impl Violations {
    fn push(&mut self, m: String) {
        self.0.push(m);
    }

    fn expect_eq(&mut self, what: &str, got: usize, want: usize) {
        if got != want {
            self.0.push(format!("{what}: {got}, expected {want}"));
        }
    }
}

fn has_duplicates(v: &[String]) -> bool {
    v.iter().collect::<BTreeSet<_>>().len() != v.len()
}

fn word_counts(trials: &[Stimulus]) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for s in trials {
        for w in &s.words {
            *m.entry(w.clone()).or_insert(0) += 1;
        }
    }
    m
}

fn pair_counts(trials: &[Stimulus]) -> BTreeMap<(String, String), usize> {
    let mut m = BTreeMap::new();
    for s in trials {
        for w in &s.words {
            for r in &s.referents {
                *m.entry((w.clone(), r.clone())).or_insert(0) += 1;
            }
        }
    }
    m
}

fn pair(m: &BTreeMap<(String, String), usize>, w: &str, r: &str) -> usize {
    m.get(&(w.to_string(), r.to_string())).copied().unwrap_or(0)
}

fn check_tests(
    v: &mut Violations,
    tests: &[TestItem],
    expected: usize,
    correct: impl Fn(&str) -> Vec<String>,
    size: usize,
    pool: &[String],
) {
    v.expect_eq("test items", tests.len(), expected);
    let words: BTreeSet<&String> = tests.iter().map(|i| &i.word).collect();
    if words.len() != tests.len() {
        v.push("a word is tested twice".into());
    }
    for item in tests {
        check_item(v, item, &correct(&item.word), size, pool);
    }
}

fn check_item(
    v: &mut Violations,
    item: &TestItem,
    correct: &[String],
    size: usize,
    pool: &[String],
) {
    let c = &item.candidates;
    if c.len() != size || has_duplicates(c) {
        v.push(format!(
            "`{}`: {} candidates, expected {size} distinct",
            item.word,
            c.len()
        ));
    }
    let mut want = correct.to_vec();
    want.sort();
    let mut got = item.correct.clone();
    got.sort();
    if got != want || correct.iter().any(|r| !c.contains(r)) {
        v.push(format!("`{}`: correct referents missing", item.word));
    }
    if c.iter().any(|r| !pool.contains(r)) {
        v.push(format!(
            "`{}`: candidate outside the trained referents",
            item.word
        ));
    }
}
