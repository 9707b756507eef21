//! Deterministic simulation of single and coupled spiking-neuron models.
//!
//! The crate is organized in layers: [`models`] and [`coupled`] define the
//! dynamical systems behind a common [`ModelSystem`] contract, [`integrate`]
//! runs them with fixed-step explicit methods (with discrete reset handling),
//! and [`analysis`] extracts spikes, periods, synchronization metrics and
//! coupling-induced period changes from the resulting trajectories.
//!
//! Everything is bitwise reproducible: no global state, no wall-clock
//! dependence, no platform-dependent iteration order. Running the same
//! configuration twice yields identical trajectories and identical CSV bytes.

pub mod analysis;
pub mod checks;
pub mod coupled;
pub mod csvout;
pub mod error;
pub mod fixtures;
pub mod integrate;
pub mod models;
pub mod state;
pub mod stimulus;
pub mod system;

pub use error::{Error, Result};
pub use integrate::{integrate, IntegratorConfig, Method, Trajectory};
pub use state::StateVector;
pub use stimulus::StimulusProtocol;
pub use system::{validate_state, ModelSystem};
