//! Sequential (synchronous) Gibbs sampling.
//!
//! One step picks a site uniformly at random and resamples it from its
//! conditional given the rest of the state. The draw schedule is fixed at
//! exactly two uniforms per step — site selection, then the threshold rule
//! `x_i ← +1 iff u < p_plus` — so that coupled and asynchronous runs can
//! share or replay the identical randomness.

use crate::error::{Error, Result};
use crate::model::{p_plus_from_field, Configuration, IsingModel};
use crate::rng::{draw_site, draw_spin, RngStream, SALT_INIT};
use rand::Rng;
use rayon::prelude::*;

/// A chain position: configuration plus the number of steps taken.
#[derive(Clone, Debug)]
pub struct ChainState {
    config: Configuration,
    step: u64,
}

impl ChainState {
    pub fn new(config: Configuration) -> Self {
        ChainState { config, step: 0 }
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn into_config(self) -> Configuration {
        self.config
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// Record one write: set the site and advance the step counter.
    pub(crate) fn apply_write(&mut self, site: usize, value: i8) {
        self.config.set(site, value);
        self.step += 1;
    }
}

/// One write of a recorded trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub step: u64,
    pub site: usize,
    pub value: i8,
}

/// Single Gibbs update; returns the site that was resampled. At most one
/// coordinate changes and the step counter advances by exactly one.
pub fn gibbs_step<R: Rng>(model: &IsingModel, state: &mut ChainState, rng: &mut R) -> usize {
    let n = model.n();
    debug_assert_eq!(state.config.len(), n);
    let i = draw_site(rng, n);
    let p_plus = p_plus_from_field(model.local_field(state.config.spins(), i));
    let value = draw_spin(rng, p_plus);
    state.apply_write(i, value);
    i
}

/// Run `steps` Gibbs updates from `init` (or a uniformly random start drawn
/// from a dedicated child stream when `init` is `None`). Deterministic given
/// `(init, stream)`.
pub fn run_sequential(
    model: &IsingModel,
    steps: u64,
    init: Option<&Configuration>,
    stream: RngStream,
) -> ChainState {
    let mut state = ChainState::new(initial_config(model, init, stream));
    let mut rng = stream.rng();
    for _ in 0..steps {
        gibbs_step(model, &mut state, &mut rng);
    }
    state
}

/// As [`run_sequential`] but records every write as a `(step, site, value)`
/// row, for CSV export.
pub fn run_sequential_traced(
    model: &IsingModel,
    steps: u64,
    init: Option<&Configuration>,
    stream: RngStream,
) -> (ChainState, Vec<TraceRow>) {
    let mut state = ChainState::new(initial_config(model, init, stream));
    let mut rng = stream.rng();
    let mut rows = Vec::with_capacity(steps.min(1 << 24) as usize);
    for _ in 0..steps {
        let site = gibbs_step(model, &mut state, &mut rng);
        rows.push(TraceRow {
            step: state.step,
            site,
            value: state.config.get(site),
        });
    }
    (state, rows)
}

pub(crate) fn initial_config(
    model: &IsingModel,
    init: Option<&Configuration>,
    stream: RngStream,
) -> Configuration {
    match init {
        Some(c) => {
            assert_eq!(c.len(), model.n(), "initial configuration length mismatch");
            c.clone()
        }
        None => Configuration::random(model.n(), &mut stream.child(SALT_INIT).rng()),
    }
}

/// Theoretical mixing budget `ceil( n/(1−α) · ln(n/ε) )` for a model
/// satisfying Dobrushin's condition with coefficient `α`.
pub fn mixing_budget_theory(n: usize, alpha: f64, eps: f64) -> Result<u64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain {
            what: "mixing_budget_theory",
            reason: format!("needs 0 <= alpha < 1, got {alpha}"),
        });
    }
    if !(0.0..1.0).contains(&eps) || eps == 0.0 {
        return Err(Error::Domain {
            what: "mixing_budget_theory",
            reason: format!("needs 0 < eps < 1, got {eps}"),
        });
    }
    let n_f = n as f64;
    Ok((n_f / (1.0 - alpha) * (n_f / eps).ln()).ceil() as u64)
}

/// Experimental mixing budget `ceil(10 · n · log₂ n)` used by the batch
/// protocols.
pub fn mixing_budget_experiment(n: usize) -> u64 {
    (10.0 * n as f64 * (n as f64).log2()).ceil() as u64
}

/// Draw `count` approximately independent samples by independent restarts:
/// each run starts from a fresh uniformly random configuration on its own
/// rng stream and contributes its final state.
pub fn sample_batch(
    model: &IsingModel,
    count: usize,
    steps_per_run: u64,
    stream: RngStream,
) -> Vec<Configuration> {
    (0..count)
        .into_par_iter()
        .map(|run| {
            run_sequential(model, steps_per_run, None, stream.child(run as u64))
                .into_config()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream() -> RngStream {
        RngStream::new(0xfeed, 0)
    }

    #[test]
    fn one_node_zero_field_spin_is_fair() {
        let model = IsingModel::zero_field(crate::model::Graph::new(1, vec![]).unwrap(), vec![])
            .unwrap();
        let mut state = ChainState::new(Configuration::all_plus(1));
        let mut rng = stream().rng();
        let mut plus = 0u32;
        let trials = 100_000;
        for _ in 0..trials {
            gibbs_step(&model, &mut state, &mut rng);
            if state.config().get(0) == 1 {
                plus += 1;
            }
        }
        let freq = f64::from(plus) / f64::from(trials);
        // 3σ band around 0.5 for fair coin over 1e5 draws.
        assert!((freq - 0.5).abs() < 3.0 * 0.5 / (f64::from(trials)).sqrt());
    }

    #[test]
    fn single_site_change_per_step() {
        let model = IsingModel::curie_weiss(12, 0.5).unwrap();
        let mut state = ChainState::new(Configuration::all_plus(12));
        let mut rng = stream().rng();
        for step in 1..=500u64 {
            let before = state.config().clone();
            let site = gibbs_step(&model, &mut state, &mut rng);
            assert_eq!(state.step(), step);
            let changed: Vec<usize> = (0..12)
                .filter(|&i| before.get(i) != state.config().get(i))
                .collect();
            assert!(changed.is_empty() || changed == vec![site]);
        }
    }

    #[test]
    fn zero_steps_returns_init() {
        let model = IsingModel::curie_weiss(5, 0.3).unwrap();
        let init = Configuration::new(vec![1, -1, 1, -1, 1]).unwrap();
        let out = run_sequential(&model, 0, Some(&init), stream());
        assert_eq!(out.config(), &init);
        assert_eq!(out.step(), 0);
    }

    #[test]
    fn identical_seeds_reproduce_trajectories() {
        let model = IsingModel::torus_grid(3, 0.5).unwrap();
        let (a, rows_a) = run_sequential_traced(&model, 5_000, None, stream());
        let (b, rows_b) = run_sequential_traced(&model, 5_000, None, stream());
        assert_eq!(a.config(), b.config());
        assert_eq!(rows_a, rows_b);
    }

    #[test]
    fn distinct_streams_differ() {
        let model = IsingModel::curie_weiss(20, 0.5).unwrap();
        let a = run_sequential(&model, 2_000, None, stream().child(0));
        let b = run_sequential(&model, 2_000, None, stream().child(1));
        assert_ne!(a.config(), b.config());
    }

    #[test]
    fn theory_budget_frozen_values() {
        // ceil(200 · ln 10000) with ln 10000 = 9.21034...
        assert_eq!(mixing_budget_theory(100, 0.5, 0.01).unwrap(), 1843);
        // ceil(400 · ln 20000) = ceil(3961.395...) = 3962.
        assert_eq!(mixing_budget_theory(200, 0.5, 0.01).unwrap(), 3962);
        // Degenerate single-node case: ceil(1 · ln e) = 1.
        assert_eq!(
            mixing_budget_theory(1, 0.0, 1.0 / std::f64::consts::E).unwrap(),
            1
        );
        assert!(mixing_budget_theory(10, 1.0, 0.1).is_err());
        assert!(mixing_budget_theory(10, 0.5, 0.0).is_err());
    }

    #[test]
    fn experiment_budget_frozen_values() {
        assert_eq!(mixing_budget_experiment(100), 6644);
        assert_eq!(mixing_budget_experiment(2), 20);
        assert_eq!(mixing_budget_experiment(1024), 102_400);
    }

    #[test]
    fn two_node_long_run_matches_tanh() {
        // Long-run empirical E[X1 X2] approaches tanh(0.5); tolerance is
        // 3 standard errors of a ±1-valued statistic over thinned draws.
        let model = IsingModel::zero_field(
            crate::model::Graph::new(2, vec![(0, 1)]).unwrap(),
            vec![0.5],
        )
        .unwrap();
        let mut state = ChainState::new(Configuration::all_plus(2));
        let mut rng = stream().rng();
        let mut sum = 0.0;
        let total = 1_000_000u64;
        for _ in 0..total {
            gibbs_step(&model, &mut state, &mut rng);
            sum += f64::from(state.config().get(0)) * f64::from(state.config().get(1));
        }
        let mean = sum / total as f64;
        // Correlated draws: inflate the iid stderr by a generous factor.
        let stderr = 1.0 / (total as f64).sqrt() * 4.0;
        assert!(
            (mean - 0.5f64.tanh()).abs() < 3.0 * stderr,
            "mean {mean} vs tanh(0.5) {}",
            0.5f64.tanh()
        );
    }

    #[test]
    fn empirical_distribution_respects_flip_symmetry() {
        // Zero-field models weight x and −x equally, so thinned counts of
        // mirrored states agree up to sampling noise.
        let n = 4;
        let model = IsingModel::curie_weiss(n, 0.5).unwrap();
        let mut rng = stream().rng();
        let mut state = ChainState::new(Configuration::random(n, &mut stream().child(3).rng()));
        for _ in 0..mixing_budget_experiment(n) {
            gibbs_step(&model, &mut state, &mut rng);
        }
        let retained = 50_000u64;
        let mut counts = vec![0u64; 1 << n];
        for _ in 0..retained {
            for _ in 0..n {
                gibbs_step(&model, &mut state, &mut rng);
            }
            counts[state.config().to_index()] += 1;
        }
        let mask = (1usize << n) - 1;
        let tv_to_mirror: f64 = counts
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                (c as f64 - counts[!idx & mask] as f64).abs() / retained as f64
            })
            .sum::<f64>()
            * 0.5;
        assert!(tv_to_mirror < 0.03, "mirror TV {tv_to_mirror}");
    }

    #[test]
    fn tv_to_oracle_decreases_with_run_length() {
        let n = 4;
        let model = IsingModel::curie_weiss(n, 0.5).unwrap();
        let exact = model.exact_distribution().unwrap();
        let tv_at = |retained: u64| {
            let mut rng = stream().rng();
            let mut state =
                ChainState::new(Configuration::random(n, &mut stream().child(4).rng()));
            for _ in 0..mixing_budget_experiment(n) {
                gibbs_step(&model, &mut state, &mut rng);
            }
            let mut counts = vec![0u64; 1 << n];
            for _ in 0..retained {
                for _ in 0..n {
                    gibbs_step(&model, &mut state, &mut rng);
                }
                counts[state.config().to_index()] += 1;
            }
            exact.tv_from_counts(&counts).unwrap()
        };
        let short = tv_at(3_000);
        let long = tv_at(60_000);
        assert!(
            long < short,
            "TV should shrink with run length: {short} -> {long}"
        );
    }

    #[test]
    fn batch_runs_are_independent_and_deterministic() {
        let model = IsingModel::curie_weiss(10, 0.5).unwrap();
        let batch = sample_batch(&model, 3, 500, stream());
        let again = sample_batch(&model, 3, 500, stream());
        assert_eq!(batch, again);
        assert_ne!(batch[0], batch[1]);
    }

    #[test]
    fn batch_single_spin_mean_is_centered() {
        // Zero-field symmetry: the empirical mean of one spin over
        // independent restarts sits within 3/sqrt(count) of zero.
        let model = IsingModel::curie_weiss(8, 0.5).unwrap();
        let count = 4_000;
        let batch = sample_batch(&model, count, mixing_budget_experiment(8), stream());
        let mean: f64 = batch.iter().map(|c| f64::from(c.get(0))).sum::<f64>() / count as f64;
        assert!(mean.abs() < 3.0 / (count as f64).sqrt() * 1.5);
    }
}
