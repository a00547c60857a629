//! Graphs, Ising models, conditional distributions, and influence.
//!
//! An [`IsingModel`] assigns to each configuration `x ∈ {−1,+1}^n` the
//! unnormalized log weight `Σ_v θ_v x_v + Σ_{(u,v)∈E} θ_uv x_u x_v`. The
//! single-site conditional is `P(x_i = +1 | rest) = (1 + tanh(h_i)) / 2`
//! with local field `h_i = θ_i + Σ_{j∈N(i)} θ_ij x_j`, which depends only on
//! the neighbors of `i`.

mod enumeration;
mod file;

pub use enumeration::{ExactDistribution, ENUMERATION_LIMIT};
pub use file::{load_model, parse_model};

use crate::error::{Error, Result};
use rand::Rng;

/// A full spin assignment in `{−1,+1}^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    spins: Vec<i8>,
}

impl Configuration {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if let Some(bad) = spins.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::InvalidArgument(format!(
                "spins must be -1 or +1, found {bad}"
            )));
        }
        Ok(Configuration { spins })
    }

    pub fn all_plus(n: usize) -> Self {
        Configuration { spins: vec![1; n] }
    }

    /// Uniformly random configuration over `{−1,+1}^n`. Consumes one
    /// uniform per site.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let spins = (0..n)
            .map(|_| if rng.random::<f64>() < 0.5 { 1i8 } else { -1i8 })
            .collect();
        Configuration { spins }
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> i8 {
        self.spins[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: i8) {
        debug_assert!(value == 1 || value == -1);
        self.spins[i] = value;
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn negated(&self) -> Self {
        Configuration {
            spins: self.spins.iter().map(|s| -s).collect(),
        }
    }

    /// Bitmask index used by the exact-enumeration oracle: bit `i` set means
    /// `x_i = +1`.
    pub fn to_index(&self) -> usize {
        self.spins
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == 1)
            .fold(0usize, |acc, (i, _)| acc | (1 << i))
    }

    pub fn from_index(n: usize, index: usize) -> Self {
        let spins = (0..n)
            .map(|i| if index & (1 << i) != 0 { 1i8 } else { -1i8 })
            .collect();
        Configuration { spins }
    }
}

/// Undirected simple graph with sorted adjacency lists.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Build a graph from an edge list. Edges are normalized to `u < v`;
    /// self-loops, duplicates, and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidModel("graph needs at least one node".into()));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidModel(format!("self-loop at node {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidModel(format!(
                    "edge ({u},{v}) out of range for {n} nodes"
                )));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        let mut sorted = normalized.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidModel("duplicate edge".into()));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &normalized {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: normalized,
            adjacency,
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, edges)
    }

    /// k-by-k grid with row and column wrap-around (a torus); four-regular.
    pub fn torus(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidModel(format!(
                "torus needs k >= 3 so wrap-around edges are distinct, got k={k}"
            )));
        }
        let id = |r: usize, c: usize| r * k + c;
        let mut edges = Vec::with_capacity(2 * k * k);
        for r in 0..k {
            for c in 0..k {
                edges.push((id(r, c), id(r, (c + 1) % k)));
                edges.push((id(r, c), id((r + 1) % k, c)));
            }
        }
        Graph::new(k * k, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }
}

/// Conditional distribution of one binary site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiteDistribution {
    p_plus: f64,
}

impl SiteDistribution {
    pub fn new(p_plus: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_plus) {
            return Err(Error::InvalidDistribution(format!(
                "p_plus must lie in [0,1], got {p_plus}"
            )));
        }
        Ok(SiteDistribution { p_plus })
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn p_minus(&self) -> f64 {
        1.0 - self.p_plus
    }
}

/// Pairwise binary graphical model with per-edge and per-node weights.
///
/// Immutable after construction and freely shareable across threads.
#[derive(Clone, Debug)]
pub struct IsingModel {
    graph: Graph,
    edge_weights: Vec<f64>,
    node_weights: Vec<f64>,
    /// Per-node `(neighbor, edge weight)` pairs, sorted by neighbor, so the
    /// conditional is O(degree).
    weighted_adjacency: Vec<Vec<(usize, f64)>>,
    zero_field: bool,
}

impl IsingModel {
    pub fn new(graph: Graph, edge_weights: Vec<f64>, node_weights: Vec<f64>) -> Result<Self> {
        if edge_weights.len() != graph.edge_count() {
            return Err(Error::InvalidModel(format!(
                "{} edge weights for {} edges",
                edge_weights.len(),
                graph.edge_count()
            )));
        }
        if node_weights.len() != graph.n() {
            return Err(Error::InvalidModel(format!(
                "{} node weights for {} nodes",
                node_weights.len(),
                graph.n()
            )));
        }
        if edge_weights.iter().chain(&node_weights).any(|w| !w.is_finite()) {
            return Err(Error::InvalidModel("weights must be finite".into()));
        }
        let mut weighted_adjacency = vec![Vec::new(); graph.n()];
        for (&(u, v), &w) in graph.edges().iter().zip(&edge_weights) {
            weighted_adjacency[u].push((v, w));
            weighted_adjacency[v].push((u, w));
        }
        for list in &mut weighted_adjacency {
            list.sort_unstable_by_key(|(j, _)| *j);
        }
        let zero_field = node_weights.iter().all(|w| *w == 0.0);
        Ok(IsingModel {
            graph,
            edge_weights,
            node_weights,
            weighted_adjacency,
            zero_field,
        })
    }

    /// Zero-field model on `graph` with the given edge weights.
    pub fn zero_field(graph: Graph, edge_weights: Vec<f64>) -> Result<Self> {
        let n = graph.n();
        IsingModel::new(graph, edge_weights, vec![0.0; n])
    }

    /// Curie-Weiss model `CW(n, α)`: complete graph, every edge weight
    /// `α/(n−1)`, no external field.
    pub fn curie_weiss(n: usize, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidModel(format!(
                "Curie-Weiss needs n >= 2, got {n}"
            )));
        }
        if !(0.0..1.0).contains(&alpha) || alpha == 0.0 {
            return Err(Error::InvalidModel(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        let graph = Graph::complete(n)?;
        let beta = alpha / (n as f64 - 1.0);
        let m = graph.edge_count();
        IsingModel::zero_field(graph, vec![beta; m])
    }

    /// Torus grid model `Grid(k², α)`: k-by-k wrap-around grid, every edge
    /// weight `α/4`, no external field.
    pub fn torus_grid(k: usize, alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) || alpha == 0.0 {
            return Err(Error::InvalidModel(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        let graph = Graph::torus(k)?;
        let m = graph.edge_count();
        IsingModel::zero_field(graph, vec![alpha / 4.0; m])
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weights
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node_weights
    }

    pub fn is_zero_field(&self) -> bool {
        self.zero_field
    }

    /// `(neighbor, weight)` pairs of node `i`, sorted by neighbor index.
    #[inline]
    pub fn weighted_neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.weighted_adjacency[i]
    }

    /// Edge weight between `i` and `j`, or `None` if not adjacent.
    pub fn weight_between(&self, i: usize, j: usize) -> Option<f64> {
        self.weighted_adjacency[i]
            .binary_search_by_key(&j, |(nbr, _)| *nbr)
            .ok()
            .map(|pos| self.weighted_adjacency[i][pos].1)
    }

    /// Local field `h_i = θ_i + Σ_{j∈N(i)} θ_ij x_j` read from `spins`.
    #[inline]
    pub fn local_field(&self, spins: &[i8], i: usize) -> f64 {
        let mut h = self.node_weights[i];
        for &(j, w) in &self.weighted_adjacency[i] {
            h += w * f64::from(spins[j]);
        }
        h
    }

    /// Conditional distribution of site `i` given the rest of `config`:
    /// `p_plus = (1 + tanh(h_i)) / 2`. Independent of `config[i]` itself.
    pub fn conditional(&self, config: &Configuration, i: usize) -> Result<SiteDistribution> {
        if i >= self.n() {
            return Err(Error::NodeOutOfRange { index: i, n: self.n() });
        }
        if config.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: config.len(),
            });
        }
        Ok(SiteDistribution {
            p_plus: p_plus_from_field(self.local_field(config.spins(), i)),
        })
    }

    /// Influence of node `j` on node `i` (worst-case total-variation change
    /// of `i`'s conditional over all state pairs differing only at `j`).
    ///
    /// For zero-field models this returns the closed form `tanh(|θ_ij|)` —
    /// the total-variation change at zero remaining-neighbor field. That is
    /// the exact maximum whenever the remaining neighbors can cancel, and
    /// an upper envelope otherwise; it is the conventional term entering
    /// the Dobrushin coefficient. Models with an external field fall back
    /// to [`IsingModel::influence_brute_force`].
    pub fn influence(&self, j: usize, i: usize) -> Result<f64> {
        self.check_pair(j, i)?;
        if self.zero_field {
            Ok(match self.weight_between(i, j) {
                Some(w) => w.abs().tanh(),
                None => 0.0,
            })
        } else {
            self.influence_brute_force(j, i)
        }
    }

    /// Exhaustive influence: maximize `TV(π_i(·|X), π_i(·|Y))` over all
    /// pairs `(X, Y)` that differ only at `j`, by enumerating every
    /// assignment of `i`'s remaining neighbors (the only coordinates the
    /// conditional reads).
    pub fn influence_brute_force(&self, j: usize, i: usize) -> Result<f64> {
        self.check_pair(j, i)?;
        let Some(w_ij) = self.weight_between(i, j) else {
            return Ok(0.0);
        };
        let others: Vec<(usize, f64)> = self
            .weighted_adjacency[i]
            .iter()
            .copied()
            .filter(|(nbr, _)| *nbr != j)
            .collect();
        let states = 1u128 << others.len().min(127);
        let limit = 1u128 << ENUMERATION_LIMIT;
        if others.len() >= 127 || states > limit {
            return Err(Error::CapacityExceeded { size: states, limit });
        }
        let theta_i = self.node_weights[i];
        let mut max_tv = 0.0f64;
        for mask in 0..(states as usize) {
            let mut s = 0.0;
            for (bit, &(_, w)) in others.iter().enumerate() {
                let x = if mask & (1 << bit) != 0 { 1.0 } else { -1.0 };
                s += w * x;
            }
            let tv = 0.5
                * ((theta_i + s + w_ij).tanh() - (theta_i + s - w_ij).tanh()).abs();
            if tv > max_tv {
                max_tv = tv;
            }
        }
        Ok(max_tv)
    }

    /// Dobrushin influence coefficient `α = max_i Σ_j I(j, i)`. The model
    /// satisfies Dobrushin's uniqueness condition iff the result is `< 1`.
    pub fn dobrushin_alpha(&self) -> Result<f64> {
        let mut alpha = 0.0f64;
        for i in 0..self.n() {
            let mut total = 0.0;
            for &(j, _) in &self.weighted_adjacency[i] {
                total += self.influence(j, i)?;
            }
            if total > alpha {
                alpha = total;
            }
        }
        Ok(alpha)
    }

    /// Unnormalized log weight `Σ_v θ_v x_v + Σ_{(u,v)∈E} θ_uv x_u x_v`.
    pub fn log_weight(&self, config: &Configuration) -> Result<f64> {
        if config.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: config.len(),
            });
        }
        let spins = config.spins();
        let mut lw = 0.0;
        for (v, &theta) in self.node_weights.iter().enumerate() {
            lw += theta * f64::from(spins[v]);
        }
        for (&(u, v), &w) in self.graph.edges().iter().zip(&self.edge_weights) {
            lw += w * f64::from(spins[u]) * f64::from(spins[v]);
        }
        Ok(lw)
    }

    /// Brute-force probability table over all `2^n` configurations.
    /// Refuses models above [`ENUMERATION_LIMIT`] nodes.
    pub fn exact_distribution(&self) -> Result<ExactDistribution> {
        ExactDistribution::of(self)
    }

    fn check_pair(&self, j: usize, i: usize) -> Result<()> {
        let n = self.n();
        if i >= n {
            return Err(Error::NodeOutOfRange { index: i, n });
        }
        if j >= n {
            return Err(Error::NodeOutOfRange { index: j, n });
        }
        if i == j {
            return Err(Error::InvalidArgument(
                "influence requires distinct nodes".into(),
            ));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn p_plus_from_field(h: f64) -> f64 {
    0.5 * (1.0 + h.tanh())
}
