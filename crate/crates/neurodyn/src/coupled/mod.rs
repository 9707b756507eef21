//! Composite systems built from single cells over stacked state vectors.
//!
//! Every family reduces exactly (bitwise) to independent copies of its
//! constituent cells when the coupling is zeroed; that identity is what the
//! zero-coupling checks pin down.

pub mod fhn;
pub mod hr;
pub mod ml;
pub mod pair;

pub use fhn::FhnDrivenPair;
pub use hr::{parse_matrix, HrGate, HrKernel, HrNetwork, HrNetworkParams};
pub use ml::{MlRateCell, MlSynapticPair, MlSynapticParams, SigmoidSpec};
pub use pair::{build_pair, build_pair_mixed, CoupledPair, PairKernel};
