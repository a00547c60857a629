//! Read-delay distributions for the asynchronous execution model.
//!
//! A delay is a nonnegative integer count of logical write-steps by which a
//! read is stale. The distribution never depends on the chain state; draws
//! always come from a stream disjoint from the site/spin stream.

use crate::error::{Error, Result};
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DelayFamily {
    /// Every delay equals `c`. `constant(0)` makes the asynchronous engine
    /// degenerate to the sequential sampler.
    Constant(u64),
    /// Uniform over `{0, 1, ..., max}`.
    UniformInt { max: u64 },
    /// Geometric on `{0, 1, ...}` with success probability `p`, clamped at
    /// `cap` (`min(X, cap)` semantics).
    Geometric { p: f64, cap: u64 },
}

/// A delay distribution plus the `shared` flag: when shared, one draw per
/// step applies to every node read; otherwise delays are i.i.d. per node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelayModel {
    family: DelayFamily,
    shared: bool,
}

impl DelayModel {
    pub fn constant(c: u64) -> Self {
        DelayModel {
            family: DelayFamily::Constant(c),
            shared: false,
        }
    }

    pub fn uniform_int(max: u64) -> Self {
        DelayModel {
            family: DelayFamily::UniformInt { max },
            shared: false,
        }
    }

    pub fn geometric(p: f64, cap: u64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "geometric delay needs 0 < p <= 1, got {p}"
            )));
        }
        Ok(DelayModel {
            family: DelayFamily::Geometric { p, cap },
            shared: false,
        })
    }

    /// Truncated geometric with untruncated mean `tau` (`p = 1/(1+τ)`) and
    /// the default cap `10·τ`. The truncated mean is strictly below `tau`,
    /// so the declared contention bound holds.
    pub fn geometric_with_mean(tau: f64) -> Result<Self> {
        if tau < 0.0 || !tau.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "tau must be a finite nonnegative number, got {tau}"
            )));
        }
        let p = 1.0 / (1.0 + tau);
        let cap = ((10.0 * tau).ceil() as u64).max(1);
        DelayModel::geometric(p, cap)
    }

    pub fn shared(mut self, shared: bool) -> Self {
        self.shared = shared;
        self
    }

    pub fn family(&self) -> DelayFamily {
        self.family
    }

    pub fn is_shared(&self) -> bool {
        self.shared
    }

    /// Closed-form mean of the distribution (truncation included).
    pub fn mean(&self) -> f64 {
        match self.family {
            DelayFamily::Constant(c) => c as f64,
            DelayFamily::UniformInt { max } => max as f64 / 2.0,
            DelayFamily::Geometric { p, cap } => {
                // E[min(X, cap)] = Σ_{k=1..cap} P(X ≥ k) = (1−p)(1−(1−p)^cap)/p
                let q = 1.0 - p;
                q * (1.0 - q.powi(cap as i32)) / p
            }
        }
    }

    /// Largest delay this model can produce. Histories older than this can
    /// never be read again.
    pub fn max_delay(&self) -> u64 {
        match self.family {
            DelayFamily::Constant(c) => c,
            DelayFamily::UniformInt { max } => max,
            DelayFamily::Geometric { cap, .. } => cap,
        }
    }

    fn draw_one<R: Rng>(&self, rng: &mut R) -> u64 {
        match self.family {
            DelayFamily::Constant(c) => c,
            DelayFamily::UniformInt { max } => rng.random_range(0..=max),
            DelayFamily::Geometric { p, cap } => {
                if p >= 1.0 {
                    return 0;
                }
                let u: f64 = rng.random();
                let k = ((1.0 - u).ln() / (1.0 - p).ln()).floor();
                (k as u64).min(cap)
            }
        }
    }

    /// Draw one delay per requested node into `out`. With the `shared` flag
    /// a single value is drawn and broadcast.
    pub fn sample_into<R: Rng>(&self, count: usize, rng: &mut R, out: &mut Vec<u64>) {
        out.clear();
        if count == 0 {
            return;
        }
        if self.shared {
            let d = self.draw_one(rng);
            out.resize(count, d);
            return;
        }
        match self.family {
            DelayFamily::Constant(c) => out.resize(count, c),
            DelayFamily::UniformInt { max } => {
                out.extend((0..count).map(|_| rng.random_range(0..=max)));
            }
            DelayFamily::Geometric { p, cap } => {
                if p >= 1.0 {
                    out.resize(count, 0);
                    return;
                }
                let denom = (1.0 - p).ln();
                out.extend((0..count).map(|_| {
                    let u: f64 = rng.random();
                    let k = ((1.0 - u).ln() / denom).floor();
                    (k as u64).min(cap)
                }));
            }
        }
    }

    /// Allocating convenience wrapper around [`DelayModel::sample_into`].
    pub fn sample_delays<R: Rng>(&self, count: usize, rng: &mut R) -> Vec<u64> {
        let mut out = Vec::with_capacity(count);
        self.sample_into(count, rng, &mut out);
        out
    }
}
