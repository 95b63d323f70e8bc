use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::som::MapParams;

/// Stable identifier of a node. Ids are never reused within a map.
pub type NodeId = u64;

/// A prototype of the map together with its local receptive field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapNode {
    pub id: NodeId,
    pub center: Vec<f64>,
    /// Running mean of the absolute distance to the inputs the node clusters.
    pub dist_moment: Vec<f64>,
    pub relevance: Vec<f64>,
    pub wins: f64,
    pub neighbors: BTreeSet<NodeId>,
}

impl MapNode {
    /// Fresh node centred on `x`: zero distance moments, full relevance.
    pub fn at(id: NodeId, x: &[f64], wins: f64) -> Self {
        MapNode {
            id,
            center: x.to_vec(),
            dist_moment: vec![0.0; x.len()],
            relevance: vec![1.0; x.len()],
            wins,
            neighbors: BTreeSet::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn weighted_distance(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(weighted_distance_unchecked(
            x,
            &self.center,
            &self.relevance,
        ))
    }

    pub fn activation(&self, x: &[f64], epsilon: f64) -> Result<f64> {
        let d = self.weighted_distance(x)?;
        Ok(activation_from_distance(d, &self.relevance, epsilon))
    }

    pub(crate) fn activation_unchecked(&self, x: &[f64], epsilon: f64) -> f64 {
        let d = weighted_distance_unchecked(x, &self.center, &self.relevance);
        activation_from_distance(d, &self.relevance, epsilon)
    }

    /// Moves the node towards `x` with learning rate `rate` and recomputes the
    /// relevances from the updated distance moments.
    ///
    /// The distance moment uses the center from *before* the move.
    pub fn update(&mut self, x: &[f64], rate: f64, params: &MapParams) -> Result<()> {
        check_dim(self.dim(), x.len())?;
        let moment_rate = rate * params.beta;
        for ((c, d), &xi) in self
            .center
            .iter_mut()
            .zip(self.dist_moment.iter_mut())
            .zip(x)
        {
            let diff = xi - *c;
            *d = (1.0 - moment_rate) * *d + moment_rate * diff.abs();
            *c += rate * diff;
        }
        relevance_from_moments(&self.dist_moment, params.s, &mut self.relevance);
        Ok(())
    }
}

/// Relevance-weighted Euclidean distance `sqrt(sum_i w_i^2 (x_i - c_i)^2)`.
pub fn weighted_distance(x: &[f64], center: &[f64], relevance: &[f64]) -> Result<f64> {
    check_dim(center.len(), x.len())?;
    check_dim(center.len(), relevance.len())?;
    Ok(weighted_distance_unchecked(x, center, relevance))
}

fn weighted_distance_unchecked(x: &[f64], center: &[f64], relevance: &[f64]) -> f64 {
    x.iter()
        .zip(center)
        .zip(relevance)
        .map(|((xi, ci), wi)| {
            let t = wi * (xi - ci);
            t * t
        })
        .sum::<f64>()
        .sqrt()
}

/// `1 / (1 + d / (|w|^2 + eps))`, in `(0, 1]` for finite `d >= 0`.
pub fn activation_from_distance(distance: f64, relevance: &[f64], epsilon: f64) -> f64 {
    let norm2: f64 = relevance.iter().map(|w| w * w).sum();
    1.0 / (1.0 + distance / (norm2 + epsilon))
}

/// Logistic relevance: dimensions whose distance moment is below the node's
/// mean moment get relevance above 1/2, those above it get less. A flat
/// moment vector yields full relevance everywhere.
pub fn relevance_from_moments(moments: &[f64], smoothness: f64, out: &mut [f64]) {
    debug_assert_eq!(moments.len(), out.len());
    if moments.is_empty() {
        return;
    }
    let (min, max) = moments
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| {
            (lo.min(d), hi.max(d))
        });
    if min == max {
        out.iter_mut().for_each(|w| *w = 1.0);
        return;
    }
    let mean = moments.iter().sum::<f64>() / moments.len() as f64;
    let scale = smoothness * (max - min);
    for (w, &d) in out.iter_mut().zip(moments) {
        *w = 1.0 / (1.0 + ((d - mean) / scale).exp());
    }
}

/// Cosine similarity of two relevance vectors; zero when either is null.
pub fn relevance_similarity(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}
