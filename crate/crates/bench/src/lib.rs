//! Shared fixtures for the benchmarks.

use std::sync::Arc;

use cswl_core::config::ModelParams;
use cswl_core::experiments::{builtin_objects, codebook_seed};
use cswl_core::pipeline::{Dataset, Representations, DEFAULT_DATASET_SEED};
use cswl_core::representation::synthetic::SyntheticConfig;

pub fn dataset() -> Dataset {
    Dataset::synthetic(
        &builtin_objects(),
        &SyntheticConfig::default(),
        DEFAULT_DATASET_SEED,
    )
    .expect("synthetic dataset")
}

/// Codebooks of run seed 0 under the default parameters.
pub fn representations() -> Arc<Representations> {
    Arc::new(
        Representations::build(dataset(), &ModelParams::default(), codebook_seed(0))
            .expect("codebooks"),
    )
}

/// Concatenated visual histograms of consecutive object pairs, a stand-in
/// for the inputs seen by the context and association layers.
pub fn histogram_stream(repr: &Representations, len: usize) -> Vec<Vec<f64>> {
    let names = builtin_objects();
    (0..len)
        .map(|i| {
            let a = &repr.visual(&names[i % names.len()]).unwrap().values;
            let b = &repr.visual(&names[(i + 1) % names.len()]).unwrap().values;
            a.iter().chain(b).copied().collect()
        })
        .collect()
}
