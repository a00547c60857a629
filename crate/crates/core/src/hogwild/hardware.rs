//! Real lock-free multi-threaded HOGWILD!-Gibbs.
//!
//! The shared state is one atomic cell per site packing `(stamp, spin)`,
//! where `stamp` is the logical index of the write that produced the value.
//! A single global atomic write counter serializes writes: logical time is
//! the number of published writes. Torn reads are impossible because each
//! site is a single atomic cell.
//!
//! Each worker repeatedly: picks a uniform site, reads the site's neighbor
//! values without locks, computes the conditional, draws the new spin, and
//! publishes it under a freshly claimed write index. The observed delay of
//! a read is the number of writes published between that read and the write
//! that consumed it — zero for a single worker, and growing with the number
//! of concurrent workers. Stores go through a stamp-guarded compare-exchange
//! so a site always ends up holding its highest-indexed write, keeping the
//! final state consistent with the serialized write order.

use crate::error::{Error, Result};
use crate::model::{p_plus_from_field, Configuration, IsingModel};
use crate::rng::{draw_site, RngStream, SALT_INIT, SALT_WORKER};
use rand::Rng;
use std::sync::atomic::{AtomicU64, Ordering};

/// One logged read: the write it served, the node read, and its delay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DelayRecord {
    pub write_index: u64,
    pub node: usize,
    pub delay: u64,
}

/// Merged read log of a hardware run, ordered by `write_index`.
#[derive(Clone, Debug, Default)]
pub struct DelayLog {
    records: Vec<DelayRecord>,
}

impl DelayLog {
    pub fn records(&self) -> &[DelayRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// CSV rendering with header `write_index,node,delay`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("write_index,node,delay\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{}\n", r.write_index, r.node, r.delay));
        }
        out
    }
}

/// Arithmetic mean of the observed delays.
pub fn estimate_tau(log: &DelayLog) -> Result<f64> {
    if log.records.is_empty() {
        return Err(Error::EmptyInput("delay log has no records"));
    }
    let sum: u128 = log.records.iter().map(|r| u128::from(r.delay)).sum();
    Ok(sum as f64 / log.records.len() as f64)
}

/// One committed write with everything needed to replay it.
#[derive(Clone, Copy, Debug)]
pub struct WriteRecord {
    pub write_index: u64,
    pub site: usize,
    /// Local field computed from the stale neighbor values actually read.
    pub field: f64,
    /// Threshold uniform consumed by this update.
    pub u: f64,
    pub value: i8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DelayLogMode {
    /// Keep only running sum/count/max; constant memory.
    Aggregate,
    /// Keep every read record (for CSV export and small probes).
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct HardwareOptions {
    pub delay_log: DelayLogMode,
    /// Capture per-write records enabling exact replay.
    pub capture_writes: bool,
}

impl Default for HardwareOptions {
    fn default() -> Self {
        HardwareOptions {
            delay_log: DelayLogMode::Aggregate,
            capture_writes: false,
        }
    }
}

/// Outcome of a hardware run. Wall-clock scheduling makes the run itself
/// nondeterministic; only the initial configuration is seed-derived.
#[derive(Clone, Debug)]
pub struct HardwareRun {
    pub initial_config: Configuration,
    pub final_config: Configuration,
    pub total_writes: u64,
    pub reads: u64,
    pub delay_sum: u128,
    pub delay_max: u64,
    pub delay_log: Option<DelayLog>,
    pub write_log: Option<Vec<WriteRecord>>,
}

impl HardwareRun {
    pub fn mean_delay(&self) -> f64 {
        if self.reads == 0 {
            0.0
        } else {
            self.delay_sum as f64 / self.reads as f64
        }
    }
}

struct WorkerOutput {
    delays: Vec<DelayRecord>,
    writes: Vec<WriteRecord>,
    reads: u64,
    delay_sum: u128,
    delay_max: u64,
}

/// Run `threads` lock-free workers until `total_writes` writes have been
/// published, then return the serialized final state and the delay
/// instrumentation. Delay records are buffered per thread and merged after
/// the run so the measurement itself adds no shared-memory contention.
pub fn run_hogwild_hardware(
    model: &IsingModel,
    threads: usize,
    total_writes: u64,
    stream: RngStream,
    options: HardwareOptions,
) -> Result<HardwareRun> {
    if threads < 1 {
        return Err(Error::InvalidArgument(format!(
            "need at least one worker thread, got {threads}"
        )));
    }
    let n = model.n();
    let init = Configuration::random(n, &mut stream.child(SALT_INIT).rng());
    // stamp << 1 | bit, bit 1 encodes spin +1. Initial values carry stamp 0.
    let cells: Vec<AtomicU64> = init
        .spins()
        .iter()
        .map(|&s| AtomicU64::new(pack(0, s)))
        .collect();
    let counter = AtomicU64::new(0);

    let outputs: Vec<WorkerOutput> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let cells = &cells;
                let counter = &counter;
                let worker_stream = stream.child(SALT_WORKER).child(t as u64);
                scope.spawn(move || {
                    worker(
                        model,
                        cells,
                        counter,
                        total_writes,
                        worker_stream,
                        options,
                    )
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    let final_config = Configuration::new(
        cells
            .iter()
            .map(|c| unpack_value(c.load(Ordering::Relaxed)))
            .collect(),
    )
    .expect("cells hold valid spins");

    let mut reads = 0u64;
    let mut delay_sum = 0u128;
    let mut delay_max = 0u64;
    let mut delay_records = Vec::new();
    let mut write_records = Vec::new();
    for out in outputs {
        reads += out.reads;
        delay_sum += out.delay_sum;
        delay_max = delay_max.max(out.delay_max);
        delay_records.extend(out.delays);
        write_records.extend(out.writes);
    }
    delay_records.sort_unstable_by_key(|r| (r.write_index, r.node));
    write_records.sort_unstable_by_key(|r| r.write_index);

    Ok(HardwareRun {
        initial_config: init,
        final_config,
        total_writes,
        reads,
        delay_sum,
        delay_max,
        delay_log: match options.delay_log {
            DelayLogMode::Full => Some(DelayLog {
                records: delay_records,
            }),
            DelayLogMode::Aggregate => None,
        },
        write_log: options.capture_writes.then_some(write_records),
    })
}

fn worker(
    model: &IsingModel,
    cells: &[AtomicU64],
    counter: &AtomicU64,
    total_writes: u64,
    stream: RngStream,
    options: HardwareOptions,
) -> WorkerOutput {
    let n = model.n();
    let mut rng = stream.rng();
    let mut out = WorkerOutput {
        delays: Vec::new(),
        writes: Vec::new(),
        reads: 0,
        delay_sum: 0,
        delay_max: 0,
    };
    // (node, counter value at the moment of the read)
    let mut read_snapshots: Vec<(usize, u64)> = Vec::new();

    loop {
        if counter.load(Ordering::Relaxed) >= total_writes {
            break;
        }
        let site = draw_site(&mut rng, n);
        let mut field = model.node_weights()[site];
        read_snapshots.clear();
        for &(j, w) in model.weighted_neighbors(site) {
            let seen = counter.load(Ordering::Relaxed);
            let value = unpack_value(cells[j].load(Ordering::Relaxed));
            field += w * f64::from(value);
            read_snapshots.push((j, seen));
        }
        let u: f64 = rng.random();
        let value = if u < p_plus_from_field(field) { 1i8 } else { -1i8 };

        let write_index = counter.fetch_add(1, Ordering::Relaxed) + 1;
        if write_index > total_writes {
            // Lost the race for the last slot; discard this update.
            break;
        }
        let packed = pack(write_index, value);
        // Only newer writes may replace a cell, so each site settles on its
        // highest-indexed write regardless of store interleaving.
        let _ = cells[site].fetch_update(Ordering::Relaxed, Ordering::Relaxed, |cur| {
            (unpack_stamp(cur) < write_index).then_some(packed)
        });

        for &(node, seen) in &read_snapshots {
            let delay = write_index - 1 - seen;
            out.reads += 1;
            out.delay_sum += u128::from(delay);
            out.delay_max = out.delay_max.max(delay);
            if options.delay_log == DelayLogMode::Full {
                out.delays.push(DelayRecord {
                    write_index,
                    node,
                    delay,
                });
            }
        }
        if options.capture_writes {
            out.writes.push(WriteRecord {
                write_index,
                site,
                field,
                u,
                value,
            });
        }
    }
    out
}

/// Re-execute a captured write sequence in write-index order: each record's
/// conditional is rebuilt from the stale field it logged and resolved with
/// its logged uniform. The result must equal the hardware run's final
/// configuration exactly.
pub fn replay_writes(init: &Configuration, writes: &[WriteRecord]) -> Result<Configuration> {
    let mut config = init.clone();
    for (expected, rec) in (1u64..).zip(writes.iter()) {
        if rec.write_index != expected {
            return Err(Error::InvalidArgument(format!(
                "write log not contiguous: expected index {expected}, got {}",
                rec.write_index
            )));
        }
        let value = if rec.u < p_plus_from_field(rec.field) {
            1i8
        } else {
            -1i8
        };
        if value != rec.value {
            return Err(Error::InvalidArgument(format!(
                "write {} logged value {} but its field/uniform imply {}",
                rec.write_index, rec.value, value
            )));
        }
        if rec.site >= config.len() {
            return Err(Error::NodeOutOfRange {
                index: rec.site,
                n: config.len(),
            });
        }
        config.set(rec.site, value);
    }
    Ok(config)
}

#[inline]
fn pack(stamp: u64, value: i8) -> u64 {
    (stamp << 1) | u64::from(value == 1)
}

#[inline]
fn unpack_value(packed: u64) -> i8 {
    if packed & 1 == 1 {
        1
    } else {
        -1
    }
}

#[inline]
fn unpack_stamp(packed: u64) -> u64 {
    packed >> 1
}
