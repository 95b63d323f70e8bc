//! Bag-of-features representation: a frozen map acts as a codebook and a
//! stimulus becomes the normalized histogram of the clusters its features
//! fall into.

mod descriptors;
pub mod synthetic;

pub use descriptors::{
    load_descriptors, parse_descriptors, write_descriptors, ObjectDescriptors, DESCRIPTOR_DIM,
};

use serde::{Deserialize, Serialize};

use crate::config::Weighting;
use crate::error::{check_dim, Error, Result};
use crate::som::{MapParams, SomMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modality {
    Auditory,
    Visual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureHistogram {
    pub values: Vec<f64>,
    pub modality: Modality,
    /// Set when no feature was recognized; `values` is then all zeros.
    pub unrecognized: bool,
}

impl FeatureHistogram {
    /// L2-normalizes raw bin counts.
    pub fn from_counts(counts: Vec<f64>, modality: Modality) -> Self {
        let norm = counts.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return FeatureHistogram {
                values: counts,
                modality,
                unrecognized: true,
            };
        }
        FeatureHistogram {
            values: counts.into_iter().map(|v| v / norm).collect(),
            modality,
            unrecognized: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A map trained on low-level features and then frozen.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    map: SomMap,
    modality: Modality,
}

impl Codebook {
    /// Trains a map on `passes` repetitions of `features` in the given order.
    ///
    /// The map starts with one node on the first feature. `params.maxcomp`
    /// is used as is; see [`crate::config::LayerParams::map_params`] for the
    /// stream-length dependent value.
    pub fn build(
        features: &[Vec<f64>],
        params: MapParams,
        passes: usize,
        seed: u64,
        modality: Modality,
    ) -> Result<Self> {
        let first = features
            .first()
            .ok_or(Error::EmptyInput("codebook features"))?;
        let dim = first.len();
        for f in features {
            check_dim(dim, f.len())?;
        }
        let mut map = SomMap::with_first_stimulus(params, first, seed)?;
        for _ in 0..passes {
            for f in features {
                map.organize_step(f)?;
            }
        }
        Ok(Codebook { map, modality })
    }

    pub fn from_map(map: SomMap, modality: Modality) -> Self {
        Codebook { map, modality }
    }

    pub fn map(&self) -> &SomMap {
        &self.map
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    /// Number of clusters, i.e. histogram length.
    pub fn size(&self) -> usize {
        self.map.len()
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    /// Raw bin counts: each feature counts once for its first clustering
    /// winner; unrecognized features are dropped. Binary weighting clips
    /// counts at 1.
    pub fn counts(&self, features: &[Vec<f64>], weighting: Weighting) -> Result<Vec<f64>> {
        let mut bins = vec![0.0_f64; self.size()];
        for f in features {
            if let Some(k) = self.map.first_cluster(f)? {
                bins[k] += 1.0;
            }
        }
        if weighting == Weighting::Binary {
            bins.iter_mut().for_each(|b| *b = b.min(1.0));
        }
        Ok(bins)
    }

    pub fn encode(&self, features: &[Vec<f64>], weighting: Weighting) -> Result<FeatureHistogram> {
        Ok(FeatureHistogram::from_counts(
            self.counts(features, weighting)?,
            self.modality,
        ))
    }
}

/// Count-weighted histogram of `features` under `book`.
pub fn encode_histogram(book: &Codebook, features: &[Vec<f64>]) -> Result<FeatureHistogram> {
    book.encode(features, Weighting::Counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> MapParams {
        MapParams {
            a_t: 0.9,
            lp: 0.01,
            beta: 0.1,
            maxcomp: 1000,
            e_b: 0.1,
            e_n: 0.001,
            s: 0.1,
            conn_thr: 0.5,
            n_max: None,
            epsilon: 1e-9,
        }
    }

    fn two_clouds() -> Vec<Vec<f64>> {
        let mut v = Vec::new();
        for i in 0..20 {
            let j = (i as f64 - 10.0) * 0.001;
            v.push(vec![0.0 + j, 0.0 - j]);
            v.push(vec![10.0 - j, 10.0 + j]);
        }
        v
    }

    #[test]
    fn identical_features_give_one_cluster() {
        let f = vec![vec![0.3, 0.4, 0.5]; 25];
        let b = Codebook::build(&f, params(), 2, 1, Modality::Auditory).unwrap();
        assert_eq!(b.size(), 1);
    }

    #[test]
    fn separated_clouds_give_two_clusters() {
        let f = two_clouds();
        let b = Codebook::build(&f, params(), 2, 1, Modality::Visual).unwrap();
        assert_eq!(b.size(), 2);
        // labels agree with the obvious 2-means split
        let a = b.map().first_cluster(&f[0]).unwrap().unwrap();
        let c = b.map().first_cluster(&f[1]).unwrap().unwrap();
        assert_ne!(a, c);
        for (i, x) in f.iter().enumerate() {
            let k = b.map().first_cluster(x).unwrap().unwrap();
            assert_eq!(k, if i % 2 == 0 { a } else { c });
        }
    }

    #[test]
    fn empty_features_rejected() {
        assert!(matches!(
            Codebook::build(&[], params(), 1, 0, Modality::Visual),
            Err(Error::EmptyInput(_))
        ));
        let ragged = vec![vec![0.0, 1.0], vec![1.0]];
        assert!(Codebook::build(&ragged, params(), 1, 0, Modality::Visual).is_err());
    }

    #[test]
    fn histogram_examples() {
        let f = two_clouds();
        let b = Codebook::build(&f, params(), 2, 1, Modality::Visual).unwrap();
        let c0 = b.map().nodes()[0].center.clone();
        let c1 = b.map().nodes()[1].center.clone();

        let one = encode_histogram(&b, std::slice::from_ref(&c0)).unwrap();
        assert_eq!(one.values, vec![1.0, 0.0]);
        assert!(!one.unrecognized);

        let none = encode_histogram(&b, &[]).unwrap();
        assert!(none.unrecognized);
        assert_eq!(none.values, vec![0.0, 0.0]);

        let both = encode_histogram(&b, &[c0, c1]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((both.values[0] - h).abs() < 1e-12 && (both.values[1] - h).abs() < 1e-12);
    }

    #[test]
    fn unrecognized_features_are_dropped() {
        let f = two_clouds();
        let b = Codebook::build(&f, params(), 2, 1, Modality::Visual).unwrap();
        let far = vec![-500.0, 800.0];
        let h = b
            .encode(std::slice::from_ref(&far), Weighting::Counts)
            .unwrap();
        assert!(h.unrecognized);
        let h = b.encode(&[far, f[0].clone()], Weighting::Counts).unwrap();
        assert!(!h.unrecognized);
        assert_eq!(h.values.iter().filter(|&&v| v == 1.0).count(), 1);
    }

    #[test]
    fn binary_weighting_clips_counts() {
        let f = two_clouds();
        let b = Codebook::build(&f, params(), 2, 1, Modality::Visual).unwrap();
        let x = vec![f[0].clone(), f[0].clone(), f[0].clone(), f[1].clone()];
        let counts = b.counts(&x, Weighting::Counts).unwrap();
        assert_eq!(counts.iter().sum::<f64>(), 4.0);
        let binary = b.counts(&x, Weighting::Binary).unwrap();
        assert_eq!(binary.iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn dimension_mismatch() {
        let b = Codebook::build(&two_clouds(), params(), 1, 1, Modality::Visual).unwrap();
        assert!(b.encode(&[vec![1.0, 2.0, 3.0]], Weighting::Counts).is_err());
    }
}
