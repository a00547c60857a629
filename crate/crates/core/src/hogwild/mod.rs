//! The HOGWILD! asynchronicity model: delay distributions, a deterministic
//! simulated stale-read engine, and a real lock-free multi-threaded engine
//! with delay instrumentation.

mod delay;
mod hardware;
mod simulated;
mod trace;

pub use delay::{DelayFamily, DelayModel};
pub use hardware::{
    estimate_tau, replay_writes, run_hogwild_hardware, DelayLog, DelayLogMode, DelayRecord,
    HardwareOptions, HardwareRun, WriteRecord,
};
pub use simulated::{hogwild_step_simulated, run_hogwild_simulated, sample_batch_hogwild};
pub use trace::VersionedTrace;
