//! Brute-force enumeration of small models, used as the ground-truth oracle
//! for sampler and estimator tests.

use super::{Configuration, IsingModel};
use crate::error::{Error, Result};

/// Largest node count `exact_distribution` (and exhaustive influence) will
/// enumerate. Keeps the oracle a desk-scale tool with predictable memory.
pub const ENUMERATION_LIMIT: usize = 20;

/// Exact probability table over all `2^n` configurations, indexed by the
/// bitmask of [`Configuration::to_index`].
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl ExactDistribution {
    pub(crate) fn of(model: &IsingModel) -> Result<Self> {
        let n = model.n();
        if n > ENUMERATION_LIMIT {
            return Err(Error::CapacityExceeded {
                size: 1u128 << n.min(127),
                limit: 1u128 << ENUMERATION_LIMIT,
            });
        }
        let states = 1usize << n;
        let mut log_weights = Vec::with_capacity(states);
        let mut max_lw = f64::NEG_INFINITY;
        for idx in 0..states {
            let config = Configuration::from_index(n, idx);
            let lw = model.log_weight(&config)?;
            if lw > max_lw {
                max_lw = lw;
            }
            log_weights.push(lw);
        }
        // Normalize through the max for stability; the log-partition is
        // implied here and never stored.
        let mut z = 0.0;
        let mut probs: Vec<f64> = log_weights
            .iter()
            .map(|lw| {
                let w = (lw - max_lw).exp();
                z += w;
                w
            })
            .collect();
        for p in &mut probs {
            *p /= z;
        }
        Ok(ExactDistribution { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_states(&self) -> usize {
        self.probs.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, config: &Configuration) -> f64 {
        self.probs[config.to_index()]
    }

    /// Expectation of an arbitrary statistic under the exact distribution.
    pub fn expectation<F: FnMut(&Configuration) -> f64>(&self, mut f: F) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(idx, p)| p * f(&Configuration::from_index(self.n, idx)))
            .sum()
    }

    /// Exact conditional `P(x_i = +1 | x_{−i})` computed from the joint
    /// table. Independent of the sampler code paths; used to cross-check
    /// [`IsingModel::conditional`].
    pub fn conditional_plus(&self, config: &Configuration, i: usize) -> f64 {
        let idx = config.to_index();
        let plus = self.probs[idx | (1 << i)];
        let minus = self.probs[idx & !(1 << i)];
        plus / (plus + minus)
    }

    /// Total variation distance between this distribution and empirical
    /// state counts.
    pub fn tv_from_counts(&self, counts: &[u64]) -> Result<f64> {
        if counts.len() != self.probs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.probs.len(),
                got: counts.len(),
            });
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyInput("no counted samples"));
        }
        let t = total as f64;
        let tv = self
            .probs
            .iter()
            .zip(counts)
            .map(|(p, c)| (p - *c as f64 / t).abs())
            .sum::<f64>()
            * 0.5;
        Ok(tv)
    }

    /// Tally configurations into a count table compatible with
    /// [`ExactDistribution::tv_from_counts`].
    pub fn count_samples<'a, I: IntoIterator<Item = &'a Configuration>>(
        &self,
        samples: I,
    ) -> Vec<u64> {
        let mut counts = vec![0u64; self.probs.len()];
        for s in samples {
            counts[s.to_index()] += 1;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Graph;

    fn two_node(theta: f64) -> IsingModel {
        let graph = Graph::new(2, vec![(0, 1)]).unwrap();
        IsingModel::zero_field(graph, vec![theta]).unwrap()
    }

    #[test]
    fn one_node_zero_field_is_uniform() {
        let graph = Graph::new(1, vec![]).unwrap();
        let model = IsingModel::zero_field(graph, vec![]).unwrap();
        let exact = model.exact_distribution().unwrap();
        assert!((exact.probabilities()[0] - 0.5).abs() < 1e-15);
        assert!((exact.probabilities()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let model = IsingModel::curie_weiss(6, 0.5).unwrap();
        let exact = model.exact_distribution().unwrap();
        let total: f64 = exact.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_node_correlation_is_tanh_theta() {
        // Four-state enumeration collapses to E[X1 X2] = tanh(θ).
        let model = two_node(0.5);
        let exact = model.exact_distribution().unwrap();
        let corr = exact.expectation(|c| f64::from(c.get(0)) * f64::from(c.get(1)));
        assert!((corr - 0.5f64.tanh()).abs() < 1e-12);
        assert!((corr - 0.462_117_157_260_01).abs() < 1e-10);
    }

    #[test]
    fn zero_coupling_is_uniform() {
        let model = two_node(0.0);
        let exact = model.exact_distribution().unwrap();
        for p in exact.probabilities() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn refuses_models_over_the_limit() {
        let model = IsingModel::curie_weiss(ENUMERATION_LIMIT + 1, 0.5).unwrap();
        assert!(matches!(
            model.exact_distribution(),
            Err(Error::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn flip_symmetry_of_zero_field_mass() {
        let model = IsingModel::torus_grid(3, 0.5).unwrap();
        let exact = model.exact_distribution().unwrap();
        let n = model.n();
        for idx in 0..exact.num_states() {
            let config = Configuration::from_index(n, idx);
            let flipped = config.negated();
            let diff = (exact.prob(&config) - exact.prob(&flipped)).abs();
            assert!(diff < 1e-14);
        }
    }
}
