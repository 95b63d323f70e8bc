use std::sync::{Arc, OnceLock};

use cswl_core::config::ModelParams;
use cswl_core::experiments::{
    builtin_objects, codebook_seed, experiment_ids, gen_schedule, participant_seed, run_designs,
    run_participant, validate_schedule, DesignKind, ExperimentDesign, BUILTIN_DESIGNS,
};
use cswl_core::pipeline::{Dataset, Representations, DEFAULT_DATASET_SEED};
use cswl_core::representation::synthetic::SyntheticConfig;
use cswl_core::stats::{build_report, Manifest};
use proptest::prelude::*;

fn repr() -> Arc<Representations> {
    static REPR: OnceLock<Arc<Representations>> = OnceLock::new();
    Arc::clone(REPR.get_or_init(|| {
        let data = Dataset::synthetic(
            &builtin_objects(),
            &SyntheticConfig::default(),
            DEFAULT_DATASET_SEED,
        )
        .unwrap();
        Arc::new(Representations::build(data, &ModelParams::default(), codebook_seed(0)).unwrap())
    }))
}

fn designs() -> Vec<ExperimentDesign> {
    BUILTIN_DESIGNS
        .iter()
        .map(|(id, _)| ExperimentDesign::builtin(id).unwrap())
        .collect()
}

#[test]
fn every_design_validates_for_100_seeds() {
    for d in designs() {
        for seed in 0..100 {
            let s = gen_schedule(&d, seed).unwrap();
            let problems = validate_schedule(&d, &s);
            assert!(problems.is_empty(), "{} seed {seed}: {problems:?}", d.id);
        }
    }
}

#[test]
fn uncertainty_words_appear_with_their_referents() {
    for id in ["exp1_2x2", "exp1_3x3", "exp1_4x4"] {
        let d = ExperimentDesign::builtin(id).unwrap();
        for seed in 0..20 {
            for t in gen_schedule(&d, seed).unwrap().trials {
                for w in &t.words {
                    assert!(t.referents.contains(w));
                }
                for r in &t.referents {
                    assert!(t.words.contains(r));
                }
            }
        }
    }
}

#[test]
fn context_lists_alternate_by_cycle() {
    let d = ExperimentDesign::builtin("exp6").unwrap();
    let DesignKind::Context {
        list_a,
        list_b,
        ambiguous,
        ..
    } = &d.kind
    else {
        panic!("exp6 is not a context design");
    };
    for seed in 0..20 {
        let s = gen_schedule(&d, seed).unwrap();
        for c in 0..s.cycle_starts.len() {
            let list = if c % 2 == 0 { list_a } else { list_b };
            for t in &s.trials[s.cycle(c)] {
                for w in &t.words {
                    assert!(w == ambiguous || list.contains(w), "cycle {c}: {w}");
                }
            }
        }
    }
}

#[test]
fn participants_are_reproducible() {
    let params = ModelParams::default();
    for d in designs() {
        let seed = participant_seed(5, 2);
        let a = run_participant(&d, repr(), &params, 2, seed).unwrap();
        let b = run_participant(&d, repr(), &params, 2, seed).unwrap();
        assert_eq!(a, b, "{}", d.id);
    }
}

#[test]
fn parallel_run_matches_single_participants() {
    let params = ModelParams::default();
    let d = ExperimentDesign::builtin("exp2").unwrap();
    let runs = run_designs(std::slice::from_ref(&d), repr(), &params, 9, Some(4)).unwrap();
    for (i, p) in runs[0].participants.iter().enumerate() {
        let single = run_participant(&d, repr(), &params, i, participant_seed(9, i)).unwrap();
        assert_eq!(p, &single);
    }
}

#[test]
fn aggregates_ignore_participant_order() {
    let params = ModelParams::default();
    let ids = ["exp1_2x2", "exp1_4x4"];
    let ds: Vec<ExperimentDesign> = ids
        .iter()
        .map(|i| ExperimentDesign::builtin(i).unwrap())
        .collect();
    let runs = run_designs(&ds, repr(), &params, 1, Some(6)).unwrap();
    let manifest = Manifest::new(1, &params, &repr(), "synthetic", &runs);
    let a = build_report(&runs, manifest.clone()).unwrap();
    let mut shuffled = runs.clone();
    for r in &mut shuffled {
        r.participants.reverse();
        r.participants.swap(0, 2);
    }
    let b = build_report(&shuffled, manifest).unwrap();
    assert_eq!(a.aggregate, b.aggregate);
    assert_eq!(a.paired, b.paired);
}

#[test]
fn experiment_ids_resolve() {
    for id in experiment_ids() {
        assert!(!cswl_core::experiments::experiment_designs(id)
            .unwrap()
            .is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn schedules_are_seed_deterministic(seed in any::<u64>(), which in 0usize..8) {
        let d = &designs()[which];
        let a = gen_schedule(d, seed).unwrap();
        let b = gen_schedule(d, seed).unwrap();
        prop_assert!(validate_schedule(d, &a).is_empty());
        prop_assert_eq!(a, b);
    }
}
