//! Polynomial statistics of the model and their estimators and bounds.
//!
//! On ±1 variables every polynomial reduces to a multilinear function
//! `Σ_S a_S Π_{i∈S} x_i` over index subsets. Subset form is the canonical
//! storage; symmetric tensor form exists only at the API boundary (see
//! [`TensorForm`]), so no multiplicity double-counting can leak into the
//! estimators.

mod bounds;
mod estimate;
mod file;

pub use bounds::{
    bound_bias_degree_d, bound_concentration_tail, bound_lipschitz_bias, bound_marginals,
    bound_mixing_error,
};
pub use estimate::{
    empirical_variance, estimate_bias, estimate_mean, BiasReport, EstimateReport, Method,
};
pub use file::{load_function, parse_function, write_function};

use crate::error::{Error, Result};
use crate::model::{Configuration, IsingModel};
use std::collections::BTreeMap;

/// Sparse degree-d polynomial in subset form: a map from sorted,
/// duplicate-free index subsets to coefficients. The empty subset is the
/// constant term.
#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearFunction {
    coeffs: BTreeMap<Vec<usize>, f64>,
    degree: usize,
    inf_norm: f64,
    max_index: Option<usize>,
}

impl MultilinearFunction {
    /// Build from `(subset, coefficient)` terms. Indices within a subset
    /// are sorted; a repeated index within one subset is rejected (reduce
    /// repeated variables through [`TensorForm::canonicalize`] instead).
    /// Terms naming the same subset are summed; zero coefficients are
    /// dropped.
    pub fn new<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut coeffs: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (mut subset, coeff) in terms {
            if !coeff.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "coefficient must be finite, got {coeff}"
                )));
            }
            subset.sort_unstable();
            if subset.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "repeated index in subset {subset:?}; canonicalize a tensor form instead"
                )));
            }
            *coeffs.entry(subset).or_insert(0.0) += coeff;
        }
        coeffs.retain(|_, c| *c != 0.0);
        Ok(Self::from_clean(coeffs))
    }

    fn from_clean(coeffs: BTreeMap<Vec<usize>, f64>) -> Self {
        let degree = coeffs.keys().map(Vec::len).max().unwrap_or(0);
        let inf_norm = coeffs.values().fold(0.0f64, |m, c| m.max(c.abs()));
        let max_index = coeffs
            .keys()
            .filter_map(|s| s.last().copied())
            .max();
        MultilinearFunction {
            coeffs,
            degree,
            inf_norm,
            max_index,
        }
    }

    pub fn constant(c: f64) -> Self {
        MultilinearFunction::new([(vec![], c)]).expect("constant term is valid")
    }

    /// `Σ_i a_i x_i`.
    pub fn linear(coefficients: &[f64]) -> Result<Self> {
        MultilinearFunction::new(
            coefficients
                .iter()
                .enumerate()
                .map(|(i, &c)| (vec![i], c)),
        )
    }

    /// The complete bilinear function `Σ_{i≠j} x_i x_j = (Σ_i x_i)² − n`:
    /// coefficient 2 on every pair `{i, j}`.
    pub fn complete_bilinear(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "complete bilinear needs n >= 2, got {n}"
            )));
        }
        let mut terms = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                terms.push((vec![i, j], 2.0));
            }
        }
        MultilinearFunction::new(terms)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `‖a‖_∞`: largest coefficient magnitude.
    pub fn inf_norm(&self) -> f64 {
        self.inf_norm
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.coeffs.iter().map(|(s, c)| (s.as_slice(), *c))
    }

    pub fn coefficient(&self, subset: &[usize]) -> f64 {
        let mut key = subset.to_vec();
        key.sort_unstable();
        self.coeffs.get(&key).copied().unwrap_or(0.0)
    }

    /// Largest variable index referenced, if any.
    pub fn max_index(&self) -> Option<usize> {
        self.max_index
    }

    /// Lipschitz constant with respect to the Hamming distance: flipping
    /// one spin changes the value by at most `2·max_i Σ_{S∋i} |a_S|`.
    pub fn hamming_lipschitz_constant(&self) -> f64 {
        let mut per_index: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
        for (subset, coeff) in self.terms() {
            for &i in subset {
                *per_index.entry(i).or_insert(0.0) += coeff.abs();
            }
        }
        2.0 * per_index.values().fold(0.0f64, |m, v| m.max(*v))
    }

    /// Evaluate `Σ_S a_S Π_{i∈S} x_i`.
    pub fn eval(&self, x: &Configuration) -> Result<f64> {
        if let Some(max) = self.max_index {
            if max >= x.len() {
                return Err(Error::NodeOutOfRange {
                    index: max,
                    n: x.len(),
                });
            }
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &Configuration) -> f64 {
        let spins = x.spins();
        self.coeffs
            .iter()
            .map(|(subset, coeff)| {
                let sign = subset
                    .iter()
                    .fold(1i32, |acc, &i| acc * i32::from(spins[i]));
                coeff * f64::from(sign)
            })
            .sum()
    }
}

/// Degree-d polynomial in tensor form `f_a(x) = Σ a_{i₁…i_d} x_{i₁}…x_{i_d}`:
/// ordered index tuples (repeats allowed) with permutation-symmetric
/// coefficients, so one subset appears with multiplicity (m! tuples for a
/// size-m subset).
#[derive(Clone, Debug, PartialEq)]
pub struct TensorForm {
    entries: BTreeMap<Vec<usize>, f64>,
}

impl TensorForm {
    pub fn new<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut map = BTreeMap::new();
        for (tuple, coeff) in entries {
            if !coeff.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "coefficient must be finite, got {coeff}"
                )));
            }
            if map.insert(tuple.clone(), coeff).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate tensor entry {tuple:?}"
                )));
            }
        }
        Ok(TensorForm { entries: map })
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.entries.iter().map(|(t, c)| (t.as_slice(), *c))
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    /// Reduce to subset form: repeated indices cancel through `x_i² = 1`
    /// (indices of even multiplicity drop out) and the permutation copies
    /// of each distinct tuple aggregate into one subset coefficient.
    ///
    /// Fails on asymmetric tensors: every permutation of a tuple must be
    /// present with the same coefficient.
    pub fn canonicalize(&self) -> Result<MultilinearFunction> {
        // Group tuples by their sorted multiset.
        let mut groups: BTreeMap<Vec<usize>, Vec<(&Vec<usize>, f64)>> = BTreeMap::new();
        for (tuple, &coeff) in &self.entries {
            let mut key = tuple.clone();
            key.sort_unstable();
            groups.entry(key).or_default().push((tuple, coeff));
        }
        let mut subset_terms: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (multiset, members) in groups {
            let expected = distinct_permutation_count(&multiset);
            if members.len() != expected {
                return Err(Error::InvalidArgument(format!(
                    "asymmetric tensor: multiset {multiset:?} has {} of {expected} permutations",
                    members.len()
                )));
            }
            let reference = members[0].1;
            for (tuple, coeff) in &members {
                let tol = 1e-12 * reference.abs().max(1.0);
                if (coeff - reference).abs() > tol {
                    return Err(Error::InvalidArgument(format!(
                        "asymmetric tensor: {tuple:?} carries {coeff}, expected {reference}"
                    )));
                }
            }
            // x_i² = 1: only odd-multiplicity indices survive.
            let mut subset = Vec::new();
            let mut run_start = 0;
            while run_start < multiset.len() {
                let idx = multiset[run_start];
                let mut run_len = 1;
                while run_start + run_len < multiset.len() && multiset[run_start + run_len] == idx {
                    run_len += 1;
                }
                if run_len % 2 == 1 {
                    subset.push(idx);
                }
                run_start += run_len;
            }
            let total: f64 = members.iter().map(|(_, c)| *c).sum();
            *subset_terms.entry(subset).or_insert(0.0) += total;
        }
        subset_terms.retain(|_, c| *c != 0.0);
        Ok(MultilinearFunction::from_clean(subset_terms))
    }
}

/// Spread subset form back into tensor form: each size-m subset becomes its
/// m! orderings, each carrying `a_S / m!`.
pub fn expand(f: &MultilinearFunction) -> Result<TensorForm> {
    let mut entries = Vec::new();
    for (subset, coeff) in f.terms() {
        let m = subset.len();
        if m > 10 {
            return Err(Error::InvalidArgument(format!(
                "refusing to expand a degree-{m} subset into {m}! tuples"
            )));
        }
        let share = coeff / factorial(m);
        let mut tuple = subset.to_vec();
        permutations(&mut tuple, 0, &mut |perm| {
            entries.push((perm.to_vec(), share));
        });
    }
    TensorForm::new(entries)
}

fn distinct_permutation_count(multiset: &[usize]) -> usize {
    let mut count: usize = (1..=multiset.len()).product();
    let mut i = 0;
    while i < multiset.len() {
        let mut run = 1;
        while i + run < multiset.len() && multiset[i + run] == multiset[i] {
            run += 1;
        }
        count /= (1..=run).product::<usize>();
        i += run;
    }
    count
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

fn permutations<F: FnMut(&[usize])>(items: &mut Vec<usize>, k: usize, visit: &mut F) {
    if k == items.len() {
        visit(items);
        return;
    }
    let mut seen = Vec::new();
    for i in k..items.len() {
        if seen.contains(&items[i]) {
            continue;
        }
        seen.push(items[i]);
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// `E[f(X)]` under the exact enumerated distribution — the oracle against
/// which the sampling estimators are checked.
pub fn exact_expectation(model: &IsingModel, f: &MultilinearFunction) -> Result<f64> {
    if let Some(max) = f.max_index() {
        if max >= model.n() {
            return Err(Error::NodeOutOfRange {
                index: max,
                n: model.n(),
            });
        }
    }
    let exact = model.exact_distribution()?;
    Ok(exact.expectation(|c| f.eval_unchecked(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Graph;
    use crate::rng::RngStream;

    #[test]
    fn complete_bilinear_frozen_values() {
        let f = MultilinearFunction::complete_bilinear(4).unwrap();
        assert_eq!(f.num_terms(), 6);
        assert_eq!(f.degree(), 2);
        assert_eq!(f.inf_norm(), 2.0);
        // At all-ones, Σ_{i≠j} 1 = n(n−1) = 12.
        let ones = Configuration::all_plus(4);
        assert_eq!(f.eval(&ones).unwrap(), 12.0);

        let f2 = MultilinearFunction::complete_bilinear(2).unwrap();
        let pp = Configuration::new(vec![1, 1]).unwrap();
        assert_eq!(f2.eval(&pp).unwrap(), 2.0);

        let f3 = MultilinearFunction::complete_bilinear(3).unwrap();
        let x = Configuration::new(vec![1, 1, -1]).unwrap();
        assert_eq!(f3.eval(&x).unwrap(), -2.0);

        assert!(MultilinearFunction::complete_bilinear(1).is_err());
    }

    #[test]
    fn hamming_lipschitz_constant_of_bilinear() {
        // One flip moves Σ_{i≠j} x_i x_j by at most 4(n−1).
        let f = MultilinearFunction::complete_bilinear(10).unwrap();
        assert_eq!(f.hamming_lipschitz_constant(), 36.0);
        let g = MultilinearFunction::new([(vec![0], 1.0), (vec![0, 2], -3.0)]).unwrap();
        assert_eq!(g.hamming_lipschitz_constant(), 8.0);
        assert_eq!(MultilinearFunction::constant(5.0).hamming_lipschitz_constant(), 0.0);
    }

    #[test]
    fn bilinear_identity_matches_square_of_sum() {
        let n = 13;
        let f = MultilinearFunction::complete_bilinear(n).unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        for _ in 0..200 {
            let x = Configuration::random(n, &mut rng);
            let s: f64 = x.spins().iter().map(|v| f64::from(*v)).sum();
            let direct = f.eval(&x).unwrap();
            assert!((direct - (s * s - n as f64)).abs() < 1e-9);
        }
    }

    #[test]
    fn odd_functions_are_odd() {
        let f = MultilinearFunction::new([(vec![0], 1.5), (vec![0, 1, 2], -2.0)]).unwrap();
        let mut rng = RngStream::new(6, 0).rng();
        for _ in 0..100 {
            let x = Configuration::random(5, &mut rng);
            let a = f.eval(&x).unwrap();
            let b = f.eval(&x.negated()).unwrap();
            assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn monomial_eval() {
        let f = MultilinearFunction::new([(vec![0, 1], 1.0)]).unwrap();
        let x = Configuration::new(vec![1, -1, 1]).unwrap();
        assert_eq!(f.eval(&x).unwrap(), -1.0);
        let missing = Configuration::new(vec![1]).unwrap();
        assert!(f.eval(&missing).is_err());
    }

    #[test]
    fn rejects_repeated_indices_in_subsets() {
        assert!(MultilinearFunction::new([(vec![1, 1], 2.0)]).is_err());
    }

    #[test]
    fn tensor_canonicalize_pair_multiplicity() {
        // a_{01} = a_{10} = c collapses to subset {0,1} with coefficient 2c.
        let t = TensorForm::new([(vec![0, 1], 0.7), (vec![1, 0], 0.7)]).unwrap();
        let f = t.canonicalize().unwrap();
        assert_eq!(f.num_terms(), 1);
        assert!((f.coefficient(&[0, 1]) - 1.4).abs() < 1e-12);
    }

    #[test]
    fn tensor_canonicalize_diagonal_reduces() {
        // a_{11} x_1² = a_{11}: a constant term.
        let t = TensorForm::new([(vec![1, 1], 0.25)]).unwrap();
        let f = t.canonicalize().unwrap();
        assert_eq!(f.degree(), 0);
        assert!((f.coefficient(&[]) - 0.25).abs() < 1e-12);
        // Odd multiplicity survives: x_2³ = x_2.
        let t3 = TensorForm::new([(vec![2, 2, 2], 1.0)]).unwrap();
        let f3 = t3.canonicalize().unwrap();
        assert!((f3.coefficient(&[2]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_rejects_asymmetry() {
        let t = TensorForm::new([(vec![0, 1], 1.0)]).unwrap();
        assert!(t.canonicalize().is_err());
        let t2 = TensorForm::new([(vec![0, 1], 1.0), (vec![1, 0], 2.0)]).unwrap();
        assert!(t2.canonicalize().is_err());
    }

    #[test]
    fn canonicalize_after_expand_is_identity() {
        let f = MultilinearFunction::new([
            (vec![], 3.0),
            (vec![2], -1.25),
            (vec![0, 3], 0.5),
            (vec![1, 2, 4], 2.0),
        ])
        .unwrap();
        let back = expand(&f).unwrap().canonicalize().unwrap();
        assert_eq!(back.num_terms(), f.num_terms());
        for (subset, coeff) in f.terms() {
            assert!(
                (back.coefficient(subset) - coeff).abs() < 1e-12 * coeff.abs().max(1.0),
                "subset {subset:?}"
            );
        }
    }

    #[test]
    fn exact_expectation_examples() {
        // Odd monomials vanish on zero-field models.
        let model = IsingModel::curie_weiss(5, 0.5).unwrap();
        let odd = MultilinearFunction::new([(vec![0], 1.0), (vec![1, 2, 3], 4.0)]).unwrap();
        assert!(exact_expectation(&model, &odd).unwrap().abs() < 1e-12);

        // E[x0 x1] on the 2-node θ=0.5 model is tanh(0.5).
        let graph = Graph::new(2, vec![(0, 1)]).unwrap();
        let pair = IsingModel::zero_field(graph, vec![0.5]).unwrap();
        let f01 = MultilinearFunction::new([(vec![0, 1], 1.0)]).unwrap();
        assert!((exact_expectation(&pair, &f01).unwrap() - 0.5f64.tanh()).abs() < 1e-12);

        // Complete bilinear on an edgeless model: independence gives 0.
        let empty = IsingModel::zero_field(Graph::new(4, vec![]).unwrap(), vec![]).unwrap();
        let cb = MultilinearFunction::complete_bilinear(4).unwrap();
        assert!(exact_expectation(&empty, &cb).unwrap().abs() < 1e-12);
    }
}
