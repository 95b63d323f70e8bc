//! Online subspace-clustering self-organizing map with a time-varying set of
//! nodes.
//!
//! Each node carries a center, a running moment of its distance to the inputs
//! it wins, and a relevance vector derived from that moment. Nodes are
//! inserted whenever the best activation drops below `a_t`, and every
//! `maxcomp` competitions the nodes that won fewer than `lp * maxcomp` times
//! are removed.

mod node;
pub(crate) mod snapshot;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use node::{
    activation_from_distance, relevance_from_moments, relevance_similarity, weighted_distance,
    MapNode, NodeId,
};

use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    /// Activation threshold below which a new node is created.
    pub a_t: f64,
    /// Lowest fraction of competitions a node must win to survive pruning.
    pub lp: f64,
    /// Relevance rate.
    pub beta: f64,
    /// Competitions between two pruning rounds.
    pub maxcomp: usize,
    pub e_b: f64,
    pub e_n: f64,
    /// Relevance smoothness.
    pub s: f64,
    /// Minimum relevance cosine for two nodes to be neighbours.
    pub conn_thr: f64,
    pub n_max: Option<usize>,
    pub epsilon: f64,
}

impl Default for MapParams {
    fn default() -> Self {
        MapParams {
            a_t: 0.9,
            lp: 0.01,
            beta: 0.1,
            maxcomp: 100,
            e_b: 0.1,
            e_n: 0.001,
            s: 0.1,
            conn_thr: 0.5,
            n_max: None,
            epsilon: 1e-9,
        }
    }
}

impl MapParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParam(format!(
                    "{name} = {v} is outside [0, 1]"
                )))
            }
        };
        if !(self.a_t > 0.0 && self.a_t < 1.0) {
            return Err(Error::InvalidParam(format!(
                "a_t = {} is outside (0, 1)",
                self.a_t
            )));
        }
        unit("lp", self.lp)?;
        unit("beta", self.beta)?;
        unit("e_b", self.e_b)?;
        unit("e_n", self.e_n)?;
        unit("conn_thr", self.conn_thr)?;
        if self.maxcomp == 0 {
            return Err(Error::InvalidParam("maxcomp must be at least 1".into()));
        }
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "s = {} must be positive",
                self.s
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidParam("epsilon must be positive".into()));
        }
        if self.n_max == Some(0) {
            return Err(Error::InvalidParam("n_max must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepEvent {
    Inserted(NodeId),
    Updated(NodeId),
}

/// Result of one self-organization step. `pruned` is set on the steps that
/// closed a `maxcomp` window, holding the number of nodes removed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub event: StepEvent,
    pub winner_activation: f64,
    pub pruned: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SomMap {
    nodes: Vec<MapNode>,
    params: MapParams,
    dim: usize,
    nwins: usize,
    next_id: NodeId,
    rng_seed: u64,
    rng: ChaCha8Rng,
}

impl PartialEq for SomMap {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes
            && self.params == other.params
            && self.dim == other.dim
            && self.nwins == other.nwins
            && self.next_id == other.next_id
            && self.rng_seed == other.rng_seed
            && self.rng.get_word_pos() == other.rng.get_word_pos()
    }
}

impl SomMap {
    /// Map with a single node placed on `first`.
    pub fn with_first_stimulus(params: MapParams, first: &[f64], seed: u64) -> Result<Self> {
        params.validate()?;
        if first.is_empty() {
            return Err(Error::EmptyInput("first stimulus"));
        }
        if first.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("first stimulus"));
        }
        let mut map = SomMap::empty(params, first.len(), seed);
        map.push_node(first, 0.0);
        Ok(map)
    }

    /// Map with a single node drawn uniformly from `[0, 1]^dim`.
    pub fn with_random_node(params: MapParams, dim: usize, seed: u64) -> Result<Self> {
        params.validate()?;
        if dim == 0 {
            return Err(Error::EmptyInput("map dimension"));
        }
        let mut map = SomMap::empty(params, dim, seed);
        let x: Vec<f64> = (0..dim).map(|_| map.rng.gen::<f64>()).collect();
        map.push_node(&x, 0.0);
        Ok(map)
    }

    fn empty(params: MapParams, dim: usize, seed: u64) -> Self {
        SomMap {
            nodes: Vec::new(),
            params,
            dim,
            nwins: 1,
            next_id: 0,
            rng_seed: seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn params(&self) -> &MapParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[MapNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nwins(&self) -> usize {
        self.nwins
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn node(&self, id: NodeId) -> Option<&MapNode> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    fn index_of(&self, id: NodeId) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    fn push_node(&mut self, x: &[f64], wins: f64) -> NodeId {
        let id = self.next_id;
        self.next_id += 1;
        self.nodes.push(MapNode::at(id, x, wins));
        id
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        check_dim(self.dim, x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("map input"));
        }
        Ok(())
    }

    pub fn activations(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        Ok(self
            .nodes
            .iter()
            .map(|n| n.activation_unchecked(x, self.params.epsilon))
            .collect())
    }

    /// Highest activation over all nodes without touching the map state.
    /// Ties resolve to the oldest node.
    pub fn best_match(&self, x: &[f64]) -> Result<(NodeId, f64)> {
        if self.nodes.is_empty() {
            return Err(Error::EmptyMap);
        }
        let acts = self.activations(x)?;
        let mut best = 0;
        for (i, &a) in acts.iter().enumerate().skip(1) {
            if a > acts[best] {
                best = i;
            }
        }
        Ok((self.nodes[best].id, acts[best]))
    }

    /// Node with the highest activation; equal activations are resolved
    /// uniformly at random with the map's own generator.
    pub fn find_winner(&mut self, x: &[f64]) -> Result<(NodeId, f64)> {
        if self.nodes.is_empty() {
            return Err(Error::EmptyMap);
        }
        let acts = self.activations(x)?;
        let max = acts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = (0..acts.len()).filter(|&i| acts[i] == max).collect();
        let pick = if tied.len() == 1 {
            tied[0]
        } else {
            tied[self.rng.gen_range(0..tied.len())]
        };
        Ok((self.nodes[pick].id, max))
    }

    /// Connects `id` to every other node whose relevance vector has cosine
    /// similarity above `conn_thr` with its own. Existing links of `id` are
    /// replaced.
    pub fn setup_neighborhood(&mut self, id: NodeId) -> Result<()> {
        let idx = self
            .index_of(id)
            .ok_or_else(|| Error::Malformed(format!("no node with id {id}")))?;
        let old: Vec<NodeId> = self.nodes[idx].neighbors.iter().copied().collect();
        for other in old {
            if let Some(j) = self.index_of(other) {
                self.nodes[j].neighbors.remove(&id);
            }
        }
        self.nodes[idx].neighbors.clear();
        let thr = self.params.conn_thr;
        for j in 0..self.nodes.len() {
            if j == idx {
                continue;
            }
            let sim = relevance_similarity(&self.nodes[idx].relevance, &self.nodes[j].relevance);
            if sim > thr {
                let other = self.nodes[j].id;
                self.nodes[idx].neighbors.insert(other);
                self.nodes[j].neighbors.insert(id);
            }
        }
        Ok(())
    }

    fn rebuild_connections(&mut self) {
        for n in &mut self.nodes {
            n.neighbors.clear();
        }
        let thr = self.params.conn_thr;
        for i in 0..self.nodes.len() {
            for j in (i + 1)..self.nodes.len() {
                if relevance_similarity(&self.nodes[i].relevance, &self.nodes[j].relevance) > thr {
                    let (a, b) = (self.nodes[i].id, self.nodes[j].id);
                    self.nodes[i].neighbors.insert(b);
                    self.nodes[j].neighbors.insert(a);
                }
            }
        }
    }

    /// One self-organization step for input `x`.
    pub fn organize_step(&mut self, x: &[f64]) -> Result<Step> {
        self.check_input(x)?;
        let (winner, act) = self.find_winner(x)?;
        let below_cap = self.params.n_max.is_none_or(|cap| self.nodes.len() < cap);

        let event = if act < self.params.a_t && below_cap {
            let wins = self.params.lp * self.nwins as f64;
            let id = self.push_node(x, wins);
            self.setup_neighborhood(id)?;
            StepEvent::Inserted(id)
        } else {
            let w = self.index_of(winner).expect("winner exists");
            let params = self.params.clone();
            let neighbors: Vec<NodeId> = self.nodes[w].neighbors.iter().copied().collect();
            self.nodes[w].update(x, params.e_b, &params)?;
            for nb in neighbors {
                if let Some(j) = self.index_of(nb) {
                    self.nodes[j].update(x, params.e_n, &params)?;
                }
            }
            self.nodes[w].wins += 1.0;
            StepEvent::Updated(winner)
        };

        let pruned = if self.nwins == self.params.maxcomp {
            let removed = self.prune();
            self.nwins = 0;
            Some(removed)
        } else {
            None
        };
        self.nwins += 1;

        Ok(Step {
            event,
            winner_activation: act,
            pruned,
        })
    }

    fn prune(&mut self) -> usize {
        let limit = self.params.lp * self.params.maxcomp as f64;
        let before = self.nodes.len();
        if self.nodes.iter().all(|n| n.wins < limit) {
            // keep the strongest node so the map never empties
            let keep = self.nodes.iter().enumerate().fold(0, |best, (i, n)| {
                if n.wins > self.nodes[best].wins {
                    i
                } else {
                    best
                }
            });
            let kept = self.nodes.swap_remove(keep);
            self.nodes = vec![kept];
        } else {
            self.nodes.retain(|n| n.wins >= limit);
        }
        self.rebuild_connections();
        for n in &mut self.nodes {
            n.wins = 0.0;
        }
        before - self.nodes.len()
    }

    /// Clustering-phase recognition: nodes whose activation reaches `a_t`, in
    /// decreasing order of activation. Empty when `x` is not recognized.
    pub fn cluster_assign(&self, x: &[f64]) -> Result<Vec<(NodeId, f64)>> {
        let acts = self.activations(x)?;
        let mut order: Vec<usize> = (0..acts.len()).collect();
        order.sort_by(|&a, &b| acts[b].total_cmp(&acts[a]));
        Ok(order
            .into_iter()
            .take_while(|&i| acts[i] >= self.params.a_t)
            .map(|i| (self.nodes[i].id, acts[i]))
            .collect())
    }

    /// Index (position in [`SomMap::nodes`]) of the first clustering winner.
    pub fn first_cluster(&self, x: &[f64]) -> Result<Option<usize>> {
        let acts = self.activations(x)?;
        let mut best: Option<usize> = None;
        for (i, &a) in acts.iter().enumerate() {
            if a >= self.params.a_t && best.is_none_or(|b| a > acts[b]) {
                best = Some(i);
            }
        }
        Ok(best)
    }
}
