//! Spike-level post-processing: detection, period estimation, f-I and
//! frequency sweeps, two-channel synchronization metrics, and the coupled
//! versus isolated period comparison.

pub mod accel;
pub mod period;
pub mod spikes;
pub mod sweep;
pub mod sync;

pub use accel::{acceleration_ratio, AccelerationReport};
pub use period::{estimate_period, Periodicity};
pub use spikes::{detect_spikes, Direction, SpikeDetectorConfig, SpikeTrain};
pub use sweep::{
    fi_sweep, frequency_sensitivity, FrequencyPoint, FrequencyReport, SweepPoint, SweepSetup,
};
pub use sync::{sync_report, SyncReport};
