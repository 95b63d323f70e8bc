use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankOutcome {
    /// The only correct referent ranked first.
    Single,
    /// Both correct referents in the top two, in either order.
    Double,
    /// One correct referent first, an incorrect one second.
    Either,
    Miss,
}

/// Scores a four-alternative ranking against one or two correct referents.
pub fn score_rank_test(ranked: &[String], correct: &[String]) -> Result<RankOutcome> {
    if ranked.len() != 4 {
        return Err(Error::Malformed(format!(
            "ranking has {} items, expected 4",
            ranked.len()
        )));
    }
    let is_correct = |r: &String| correct.contains(r);
    if correct.iter().any(|c| !ranked.contains(c)) {
        return Err(Error::Malformed("a correct referent is not ranked".into()));
    }
    match correct.len() {
        1 => Ok(if is_correct(&ranked[0]) {
            RankOutcome::Single
        } else {
            RankOutcome::Miss
        }),
        2 if correct[0] != correct[1] => {
            Ok(match (is_correct(&ranked[0]), is_correct(&ranked[1])) {
                (true, true) => RankOutcome::Double,
                (true, false) => RankOutcome::Either,
                _ => RankOutcome::Miss,
            })
        }
        n => Err(Error::Malformed(format!(
            "{n} correct referents, expected 1 or 2 distinct"
        ))),
    }
}

/// Accuracy split by the outcome of the same word in the previous cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalAccuracy {
    /// Absent when no word was right in the previous cycle.
    pub after_right: Option<f64>,
    /// Absent when no word was wrong in the previous cycle.
    pub after_wrong: Option<f64>,
    /// Trials behind `after_right` and `after_wrong`.
    pub right_trials: usize,
    pub wrong_trials: usize,
    pub per_cycle: Vec<f64>,
}

/// `correct[c][w]` says whether the choice for word `w` in cycle `c` was
/// right. Cycles from the second on are split by the previous cycle's
/// outcome for the same word.
pub fn score_conditional(correct: &[Vec<bool>]) -> Result<ConditionalAccuracy> {
    let words = correct.first().map_or(0, Vec::len);
    if correct.iter().any(|c| c.len() != words || c.is_empty()) {
        return Err(Error::Malformed("cycles of unequal or zero length".into()));
    }
    let rate = |v: &[bool]| v.iter().filter(|&&b| b).count() as f64 / v.len() as f64;
    let per_cycle = correct.iter().map(|c| rate(c)).collect();
    let mut right = Vec::new();
    let mut wrong = Vec::new();
    for pair in correct.windows(2) {
        for (prev, now) in pair[0].iter().zip(&pair[1]) {
            if *prev {
                right.push(*now);
            } else {
                wrong.push(*now);
            }
        }
    }
    let mean = |v: &[bool]| (!v.is_empty()).then(|| rate(v));
    Ok(ConditionalAccuracy {
        after_right: mean(&right),
        after_wrong: mean(&wrong),
        right_trials: right.len(),
        wrong_trials: wrong.len(),
        per_cycle,
    })
}

/// Top-ranked referent of a double word whose two referents were shown in
/// separate blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedDouble {
    pub outcome: RankOutcome,
    pub early_first: bool,
}

/// Per participant, the fraction of double words scored Double with the
/// early referent first, and with the late one first; then averaged over
/// participants. `None` when no participant produced a Double outcome.
pub fn score_order_effect(results: &[Vec<OrderedDouble>]) -> Option<(f64, f64)> {
    let any_double = results
        .iter()
        .flatten()
        .any(|d| d.outcome == RankOutcome::Double);
    if !any_double || results.is_empty() {
        return None;
    }
    let (mut early, mut late) = (0.0, 0.0);
    for p in results {
        let (e, l) = order_rates(p);
        early += e;
        late += l;
    }
    let n = results.len() as f64;
    Some((early / n, late / n))
}

/// Early-first and late-first Double rates of one participant.
pub fn order_rates(items: &[OrderedDouble]) -> (f64, f64) {
    if items.is_empty() {
        return (0.0, 0.0);
    }
    let n = items.len() as f64;
    let doubles = items.iter().filter(|d| d.outcome == RankOutcome::Double);
    let early = doubles.clone().filter(|d| d.early_first).count() as f64;
    let late = doubles.filter(|d| !d.early_first).count() as f64;
    (early / n, late / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn rank_outcomes() {
        let c2 = v(&["A1", "A2"]);
        assert_eq!(
            score_rank_test(&v(&["A2", "A1", "x", "y"]), &c2).unwrap(),
            RankOutcome::Double
        );
        assert_eq!(
            score_rank_test(&v(&["A1", "x", "A2", "y"]), &c2).unwrap(),
            RankOutcome::Either
        );
        assert_eq!(
            score_rank_test(&v(&["x", "A1", "A2", "y"]), &c2).unwrap(),
            RankOutcome::Miss
        );
        let c1 = v(&["B"]);
        assert_eq!(
            score_rank_test(&v(&["B", "x", "y", "z"]), &c1).unwrap(),
            RankOutcome::Single
        );
        assert_eq!(
            score_rank_test(&v(&["x", "B", "y", "z"]), &c1).unwrap(),
            RankOutcome::Miss
        );
    }

    #[test]
    fn malformed_rank_inputs() {
        assert!(score_rank_test(&v(&["B", "x", "y"]), &v(&["B"])).is_err());
        assert!(score_rank_test(&v(&["B", "x", "y", "z"]), &v(&[])).is_err());
        assert!(score_rank_test(&v(&["B", "x", "y", "z"]), &v(&["B", "B"])).is_err());
        assert!(score_rank_test(&v(&["B", "x", "y", "z"]), &v(&["q"])).is_err());
        assert!(score_rank_test(&v(&["a", "b", "c", "d"]), &v(&["a", "b", "c"])).is_err());
    }

    #[test]
    fn conditional_limits() {
        let all = vec![vec![true; 12]; 5];
        let c = score_conditional(&all).unwrap();
        assert_eq!(c.after_right, Some(1.0));
        assert_eq!(c.after_wrong, None);
        let none = vec![vec![false; 12]; 5];
        let c = score_conditional(&none).unwrap();
        assert_eq!(c.per_cycle, vec![0.0; 5]);
        assert_eq!(c.after_right, None);
        assert_eq!(c.after_wrong, Some(0.0));
        assert!(score_conditional(&[vec![true], vec![]]).is_err());
    }

    #[test]
    fn conditional_hand_case() {
        let c =
            score_conditional(&[vec![true, false], vec![true, true], vec![false, true]]).unwrap();
        // right before: w0 c0->c1 (hit), w0 c1->c2 (miss), w1 c1->c2 (hit)
        // wrong before: w1 c0->c1 (hit)
        assert_eq!(c.after_right, Some(2.0 / 3.0));
        assert_eq!(c.after_wrong, Some(1.0));
        assert_eq!((c.right_trials, c.wrong_trials), (3, 1));
        assert_eq!(c.per_cycle, vec![0.5, 1.0, 0.5]);
    }

    #[test]
    fn random_chooser_is_at_chance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (mut rh, mut rn, mut wh, mut wn) = (0.0, 0.0, 0.0, 0.0);
        let mut per_run = 0.0;
        let runs = 10_000;
        for _ in 0..runs {
            let cycles: Vec<Vec<bool>> = (0..5)
                .map(|_| (0..12).map(|_| rng.gen_range(0..5) == 0).collect())
                .collect();
            let c = score_conditional(&cycles).unwrap();
            if let Some(r) = c.after_right {
                rh += r * c.right_trials as f64;
                rn += c.right_trials as f64;
            }
            let w = c.after_wrong.unwrap();
            wh += w * c.wrong_trials as f64;
            wn += c.wrong_trials as f64;
            per_run += w;
        }
        assert!((rh / rn - 0.2).abs() < 0.01, "{}", rh / rn);
        assert!((wh / wn - 0.2).abs() < 0.005, "{}", wh / wn);
        // per-run rates of the large group stay close to chance
        assert!((per_run / runs as f64 - 0.2).abs() < 0.01);
    }

    #[test]
    fn order_effect() {
        let d = |early_first| OrderedDouble {
            outcome: RankOutcome::Double,
            early_first,
        };
        let miss = OrderedDouble {
            outcome: RankOutcome::Miss,
            early_first: true,
        };
        let p = vec![d(true), d(true), miss.clone(), miss.clone()];
        assert_eq!(score_order_effect(&[p]), Some((0.5, 0.0)));
        assert_eq!(score_order_effect(&[vec![miss.clone()]]), None);
        let a = vec![d(true), d(false)];
        let b = vec![d(false), miss];
        assert_eq!(score_order_effect(&[a, b]), Some((0.25, 0.5)));
    }
}
