//! Append-only per-node write histories supporting stale reads.
//!
//! `read_at(i, s)` returns the value of node `i` as of logical time `s`,
//! i.e. the last write to `i` at or before step `s`. Histories are seeded
//! with `(0, initial value)`, so `read_at(i, 0)` is always the initial
//! state and reads never index before step 0.

use crate::model::Configuration;

#[derive(Clone, Debug)]
pub struct VersionedTrace {
    /// Per-node `(write_step, value)` pairs in strictly increasing
    /// `write_step` order.
    histories: Vec<Vec<(u64, i8)>>,
    step: u64,
    /// When set, entries that can no longer be reached by any read delayed
    /// at most `window` steps are pruned.
    prune_window: Option<u64>,
}

impl VersionedTrace {
    pub fn new(init: &Configuration) -> Self {
        VersionedTrace {
            histories: init.spins().iter().map(|&v| vec![(0, v)]).collect(),
            step: 0,
            prune_window: None,
        }
    }

    /// Bound history memory for long runs: any read is guaranteed to look
    /// back at most `window` steps, so older entries (except the newest one
    /// at or before the horizon) are unreachable.
    pub fn with_prune_window(init: &Configuration, window: u64) -> Self {
        let mut t = VersionedTrace::new(init);
        t.prune_window = Some(window);
        t
    }

    pub fn n(&self) -> usize {
        self.histories.len()
    }

    pub fn current_step(&self) -> u64 {
        self.step
    }

    /// Value of node `i` as of step `s` (callers clamp `t − τ` to 0 via
    /// saturating subtraction).
    #[inline]
    pub fn read_at(&self, i: usize, s: u64) -> i8 {
        let hist = &self.histories[i];
        let pos = hist.partition_point(|(w, _)| *w <= s);
        debug_assert!(pos > 0, "history pruned past its read horizon");
        hist[pos - 1].1
    }

    /// Freshest value of node `i`.
    #[inline]
    pub fn latest(&self, i: usize) -> i8 {
        self.histories[i].last().expect("seeded history").1
    }

    /// Append a write of `value` to node `i` at step `current_step() + 1`.
    pub fn write(&mut self, i: usize, value: i8) {
        debug_assert!(value == 1 || value == -1);
        self.step += 1;
        let hist = &mut self.histories[i];
        hist.push((self.step, value));
        if let Some(window) = self.prune_window {
            let horizon = self.step.saturating_sub(window);
            let mut drop = 0;
            while drop + 1 < hist.len() && hist[drop + 1].0 <= horizon {
                drop += 1;
            }
            if drop > 0 {
                hist.drain(..drop);
            }
        }
    }

    /// Snapshot of the freshest value at every node.
    pub fn final_config(&self) -> Configuration {
        Configuration::new(
            self.histories
                .iter()
                .map(|h| h.last().expect("seeded history").1)
                .collect(),
        )
        .expect("trace holds valid spins")
    }

    /// All retained writes, ordered by step, excluding the step-0 seeds.
    /// Complete only when no pruning window is set.
    pub fn write_sequence(&self) -> Vec<(u64, usize, i8)> {
        let mut rows: Vec<(u64, usize, i8)> = self
            .histories
            .iter()
            .enumerate()
            .flat_map(|(node, hist)| {
                hist.iter()
                    .filter(|(w, _)| *w > 0)
                    .map(move |&(w, v)| (w, node, v))
            })
            .collect();
        rows.sort_unstable();
        rows
    }
}
