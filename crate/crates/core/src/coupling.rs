//! Greedy coupling of the sequential and asynchronous samplers, and
//! Hamming-distance diagnostics between the coupled chains.
//!
//! Both chains update the same uniformly chosen site each step and resolve
//! the update through one shared uniform mapped through both inverse CDFs
//! (the greedy coupling). For binary sites this is exactly the shared
//! threshold rule, so the X-marginal of a coupled run is bit-identical to a
//! sequential run on the same stream, and the Y-marginal to a simulated
//! asynchronous run.

use crate::error::{Error, Result};
use crate::hogwild::{DelayModel, VersionedTrace};
use crate::model::{p_plus_from_field, Configuration, IsingModel};
use crate::rng::{draw_site, RngStream, SALT_DELAY, SALT_INIT};
use crate::sampler::ChainState;
use rand::Rng;

/// Number of coordinates where two configurations differ.
pub fn hamming(x: &Configuration, y: &Configuration) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(x.spins()
        .iter()
        .zip(y.spins())
        .filter(|(a, b)| a != b)
        .count())
}

/// A distribution over the ordered finite state set `{0, 1, ..., k−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDistribution {
    probs: Vec<f64>,
}

impl FiniteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no states".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(
                "probabilities must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(FiniteDistribution { probs })
    }

    /// Binary site distribution with states ordered `(+1, −1)`: state 0 is
    /// spin up.
    pub fn binary(p_plus: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_plus) {
            return Err(Error::InvalidDistribution(format!(
                "p_plus must lie in [0,1], got {p_plus}"
            )));
        }
        Ok(FiniteDistribution {
            probs: vec![p_plus, 1.0 - p_plus],
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Inverse-CDF lookup with half-open intervals `[P(i−1), P(i))`.
    fn index_of(&self, u: f64) -> usize {
        let mut cum = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            cum += p;
            if u < cum {
                return i;
            }
        }
        // Floating-point dust can leave u just above the last cumulative
        // point; the final state owns the remainder.
        self.probs.len() - 1
    }
}

/// Map one shared uniform through both inverse CDFs. Each output taken
/// alone has exactly its own marginal law; the chains agree wherever the
/// two cumulative partitions place `u` in the same cell.
pub fn greedy_couple(
    p: &FiniteDistribution,
    q: &FiniteDistribution,
    u: f64,
) -> Result<(usize, usize)> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
        });
    }
    if !(0.0..1.0).contains(&u) {
        return Err(Error::InvalidArgument(format!(
            "coupling uniform must lie in [0,1), got {u}"
        )));
    }
    Ok((p.index_of(u), q.index_of(u)))
}

/// Bound `τ·α·ln(n)/(1−α)` on the expected Hamming distance between the
/// coupled chains. Natural log by convention; experiment reports also emit
/// the log₂ variant so a base discrepancy would be visible rather than
/// hidden.
pub fn hamming_bound_theory(tau: f64, alpha: f64, n: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain {
            what: "hamming_bound_theory",
            reason: format!("needs 0 <= alpha < 1, got {alpha}"),
        });
    }
    if tau < 0.0 {
        return Err(Error::Domain {
            what: "hamming_bound_theory",
            reason: format!("tau must be nonnegative, got {tau}"),
        });
    }
    Ok(tau * alpha * n.ln() / (1.0 - alpha))
}

/// Result of one coupled update.
#[derive(Clone, Copy, Debug)]
pub struct CoupledUpdate {
    pub site: usize,
    pub x_previous: i8,
    pub y_previous: i8,
    pub x_value: i8,
    pub y_value: i8,
}

impl CoupledUpdate {
    pub fn created_disagreement(&self) -> bool {
        self.x_previous == self.y_previous && self.x_value != self.y_value
    }

    pub fn removed_disagreement(&self) -> bool {
        self.x_previous != self.y_previous && self.x_value == self.y_value
    }
}

/// One greedy-coupled step: a single site is drawn and updated in both
/// chains — the sequential chain from its fresh state, the asynchronous
/// chain from stale reads of its trace — with one shared threshold uniform.
/// Delay draws belong to the asynchronous chain only and come from
/// `delay_rng`.
pub fn coupled_step<R: Rng>(
    model: &IsingModel,
    x: &mut ChainState,
    y: &mut VersionedTrace,
    dm: &DelayModel,
    rng: &mut R,
    delay_rng: &mut R,
) -> Result<CoupledUpdate> {
    let n = model.n();
    if x.config().len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.config().len(),
        });
    }
    if y.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.n(),
        });
    }
    let mut delays = Vec::new();
    Ok(step_inner(model, x, y, dm, rng, delay_rng, &mut delays))
}

fn step_inner<R: Rng>(
    model: &IsingModel,
    x: &mut ChainState,
    y: &mut VersionedTrace,
    dm: &DelayModel,
    rng: &mut R,
    delay_rng: &mut R,
    delays: &mut Vec<u64>,
) -> CoupledUpdate {
    let i = draw_site(rng, model.n());
    let neighbors = model.weighted_neighbors(i);

    let p_x = p_plus_from_field(model.local_field(x.config().spins(), i));

    dm.sample_into(neighbors.len(), delay_rng, delays);
    let t = y.current_step();
    let mut field_y = model.node_weights()[i];
    for (&(j, w), &tau) in neighbors.iter().zip(delays.iter()) {
        field_y += w * f64::from(y.read_at(j, t.saturating_sub(tau)));
    }
    let p_y = p_plus_from_field(field_y);

    // Shared uniform through both inverse CDFs with states ordered (+1, −1):
    // for binary sites the greedy coupling is the threshold rule applied to
    // both conditionals.
    let u: f64 = rng.random();
    let x_value = if u < p_x { 1i8 } else { -1i8 };
    let y_value = if u < p_y { 1i8 } else { -1i8 };

    let x_previous = x.config().get(i);
    let y_previous = y.latest(i);
    x.apply_write(i, x_value);
    y.write(i, y_value);
    CoupledUpdate {
        site: i,
        x_previous,
        y_previous,
        x_value,
        y_value,
    }
}

/// Hamming trajectory and empirical moments of one coupled run.
///
/// The disagreement set `V_t^{≠}` has size `d_H(X_t, Y_t)` by definition,
/// so one stored trajectory serves both views.
#[derive(Clone, Debug)]
pub struct CoupledRunStats {
    hamming: Vec<u32>,
    max_moment: u32,
    n: usize,
}

impl CoupledRunStats {
    /// `d_H(X_t, Y_t)` for `t = 0..=steps`.
    pub fn hamming_trajectory(&self) -> &[u32] {
        &self.hamming
    }

    /// `|V_t^{≠}|` per step — identical to the Hamming trajectory.
    pub fn disagreement_sizes(&self) -> &[u32] {
        &self.hamming
    }

    pub fn max_moment(&self) -> u32 {
        self.max_moment
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Time-averaged `E[d_H^d]` over the whole trajectory.
    pub fn moment(&self, d: u32) -> f64 {
        self.check_degree(d);
        mean(self.hamming.iter().map(|&h| f64::from(h).powi(d as i32)))
    }

    /// `E[d_H^d]` averaged over the final half of the run, past the initial
    /// transient; the stringent side of the bound checks.
    pub fn final_window_moment(&self, d: u32) -> f64 {
        self.check_degree(d);
        let from = self.hamming.len() / 2;
        mean(self.hamming[from..]
            .iter()
            .map(|&h| f64::from(h).powi(d as i32)))
    }

    pub fn max_hamming(&self) -> u32 {
        self.hamming.iter().copied().max().unwrap_or(0)
    }

    fn check_degree(&self, d: u32) {
        assert!(
            d >= 1 && d <= self.max_moment,
            "moment degree {d} outside configured range 1..={}",
            self.max_moment
        );
    }
}

fn mean<I: Iterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Run a greedy-coupled pair for `steps` updates from one shared uniformly
/// random initial configuration (`X₀ = Y₀`), recording the Hamming distance
/// after every step.
pub fn run_coupled(
    model: &IsingModel,
    steps: u64,
    dm: &DelayModel,
    max_moment: u32,
    stream: RngStream,
) -> Result<CoupledRunStats> {
    if max_moment < 1 {
        return Err(Error::InvalidArgument(
            "max_moment must be at least 1".into(),
        ));
    }
    let n = model.n();
    let init = Configuration::random(n, &mut stream.child(SALT_INIT).rng());
    let mut x = ChainState::new(init.clone());
    let mut y = VersionedTrace::with_prune_window(&init, dm.max_delay());
    let mut rng = stream.rng();
    let mut delay_rng = stream.child(SALT_DELAY).rng();
    let mut delays = Vec::new();

    // Each step touches exactly one (shared) site in both chains, so the
    // Hamming distance is maintained incrementally from X₀ = Y₀.
    let mut current: u32 = 0;
    let mut trajectory = Vec::with_capacity(steps as usize + 1);
    trajectory.push(current);
    for _ in 0..steps {
        let update = step_inner(model, &mut x, &mut y, dm, &mut rng, &mut delay_rng, &mut delays);
        if update.created_disagreement() {
            current += 1;
        } else if update.removed_disagreement() {
            current -= 1;
        }
        trajectory.push(current);
        debug_assert!((current as usize) <= n);
    }
    Ok(CoupledRunStats {
        hamming: trajectory,
        max_moment,
        n,
    })
}
