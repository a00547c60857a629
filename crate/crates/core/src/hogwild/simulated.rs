//! Deterministic single-threaded simulation of HOGWILD!-Gibbs.
//!
//! Each step updates one uniformly chosen site, but the conditional is
//! evaluated on *stale* neighbor values `Y_{j, t−τ_j}` read from a
//! [`VersionedTrace`], with per-neighbor delays drawn from a [`DelayModel`]
//! on a stream disjoint from the site/spin stream. With `constant(0)`
//! delays the trajectory is bit-identical to the sequential sampler under
//! the shared draw schedule.

use super::{DelayModel, VersionedTrace};
use crate::model::{p_plus_from_field, Configuration, IsingModel};
use crate::rng::{draw_site, draw_spin, RngStream, SALT_DELAY};
use crate::sampler::initial_config;
use rand::Rng;
use rayon::prelude::*;

/// One simulated asynchronous update; returns the site written.
///
/// Negative read times clamp to step 0 (the initial state is visible to
/// all). The updating site's own previous value is never read, so no
/// self-delay is drawn.
pub fn hogwild_step_simulated<R: Rng>(
    model: &IsingModel,
    trace: &mut VersionedTrace,
    dm: &DelayModel,
    rng: &mut R,
    delay_rng: &mut R,
) -> usize {
    let mut delays = Vec::new();
    step_with_scratch(model, trace, dm, rng, delay_rng, &mut delays)
}

fn step_with_scratch<R: Rng>(
    model: &IsingModel,
    trace: &mut VersionedTrace,
    dm: &DelayModel,
    rng: &mut R,
    delay_rng: &mut R,
    delays: &mut Vec<u64>,
) -> usize {
    let n = model.n();
    debug_assert_eq!(trace.n(), n);
    let i = draw_site(rng, n);
    let neighbors = model.weighted_neighbors(i);
    dm.sample_into(neighbors.len(), delay_rng, delays);
    let t = trace.current_step();
    let mut field = model.node_weights()[i];
    for (&(j, w), &tau) in neighbors.iter().zip(delays.iter()) {
        let value = trace.read_at(j, t.saturating_sub(tau));
        field += w * f64::from(value);
    }
    let value = draw_spin(rng, p_plus_from_field(field));
    trace.write(i, value);
    i
}

/// Run `steps` simulated asynchronous updates. Deterministic given
/// `(init, stream)`; delay draws come from a child stream so the spin/site
/// schedule matches [`crate::sampler::run_sequential`] exactly.
pub fn run_hogwild_simulated(
    model: &IsingModel,
    steps: u64,
    dm: &DelayModel,
    init: Option<&Configuration>,
    stream: RngStream,
) -> (Configuration, VersionedTrace) {
    let init = initial_config(model, init, stream);
    let mut trace = VersionedTrace::with_prune_window(&init, dm.max_delay());
    let mut rng = stream.rng();
    let mut delay_rng = stream.child(SALT_DELAY).rng();
    let mut scratch = Vec::new();
    for _ in 0..steps {
        step_with_scratch(model, &mut trace, dm, &mut rng, &mut delay_rng, &mut scratch);
    }
    (trace.final_config(), trace)
}

/// Independent-restart batch sampling through the simulated asynchronous
/// engine; the counterpart of [`crate::sampler::sample_batch`].
pub fn sample_batch_hogwild(
    model: &IsingModel,
    count: usize,
    steps_per_run: u64,
    dm: &DelayModel,
    stream: RngStream,
) -> Vec<Configuration> {
    (0..count)
        .into_par_iter()
        .map(|run| {
            run_hogwild_simulated(model, steps_per_run, dm, None, stream.child(run as u64)).0
        })
        .collect()
}
