//! Trial schedules of the word-learning experiments, simulated participants
//! and their scores.

mod design;
mod run;
mod schedule;
mod scoring;
mod validate;

pub use design::{
    builtin_objects, experiment_designs, experiment_ids, DesignKind, DoubleWord, ExperimentDesign,
    InductionCondition, Presentation, WordList, BUILTIN_DESIGNS,
};
pub use run::{
    codebook_seed, derive_seed, design_metrics, design_pairs, participant_seed, run_designs,
    run_participant, DesignRun, ItemResult, Metric, ParticipantResult, BOTH_CHANCE, EITHER_CHANCE,
};
pub use schedule::{gen_schedule, ContextProbe, TestItem, TrialSchedule};
pub use scoring::{
    order_rates, score_conditional, score_order_effect, score_rank_test, ConditionalAccuracy,
    OrderedDouble, RankOutcome,
};
pub use validate::validate_schedule;
