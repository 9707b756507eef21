//! Pinned regression values for every measured (as opposed to hand-derived)
//! quantity the verification suite asserts. The canonical copy lives in
//! fixtures/derived.json and is compiled into the library, so a release
//! binary carries its own reference data. `verify --regen` re-measures
//! everything and rewrites the file; a rebuild then embeds the new values.

use std::path::PathBuf;

use crate::error::{Error, Result};

pub const EMBEDDED_JSON: &str = include_str!("../fixtures/derived.json");

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConvergenceFixture {
    pub rk4_slope: f64,
    pub euler_slope: f64,
}

/// Rest states at zero input, found by root search on each model's rhs.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EquilibriaFixture {
    pub hh: Vec<f64>,
    pub ml: Vec<f64>,
    pub fhn: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IzhikevichFixture {
    /// Spike counts over the f-I amplitude grid {0, 5, 10, 15}.
    pub fi_counts: Vec<usize>,
    pub step10_resets: usize,
    pub step10_spikes: usize,
    /// Steady rates over the {8, 10, 12} grid.
    pub span_rates: Vec<f64>,
    pub span: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HhFixture {
    /// Smallest constant current giving sustained firing, by bisection.
    pub rheobase: f64,
    /// Spikes at 80% of rheobase (at most an onset transient).
    pub subthreshold_count: usize,
    /// Steady rates over the {10, 20, 40} grid.
    pub span_rates: Vec<f64>,
    pub span: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FhnFixture {
    /// Steady rates over the {0.5, 0.8, 1.1} grid.
    pub span_rates: Vec<f64>,
    pub span: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DrivenPairFixture {
    pub spikes: [usize; 2],
    pub offset_mean: f64,
    pub jitter: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HrSyncFixture {
    /// Windowed voltage rms between the two identical cells.
    pub rms: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AccelerationFixture {
    /// Periods of the two cells run in isolation.
    pub isolated: [f64; 2],
    /// Periods of the same cells inside the coupled pair.
    pub coupled: [f64; 2],
    /// Coupled period over the fastest isolated period.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DerivedFixtures {
    pub convergence: ConvergenceFixture,
    pub equilibria: EquilibriaFixture,
    pub izhikevich: IzhikevichFixture,
    pub hh: HhFixture,
    pub fhn: FhnFixture,
    pub driven_pair: DrivenPairFixture,
    pub hr_sync: HrSyncFixture,
    pub acceleration: AccelerationFixture,
}

impl DerivedFixtures {
    /// The copy compiled into this binary.
    pub fn load() -> Result<Self> {
        serde_json::from_str(EMBEDDED_JSON)
            .map_err(|e| Error::InvalidConfig(format!("embedded fixture data: {e}")))
    }

    /// Where the canonical file lives in the source tree.
    pub fn source_path() -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/derived.json")
    }

    /// Rewrites the source-tree fixture file. Takes effect in the embedded
    /// copy on the next build.
    pub fn save_to_source(&self) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidConfig(format!("fixture serialization: {e}")))?;
        text.push('\n');
        std::fs::write(Self::source_path(), text)
            .map_err(|e| Error::InvalidConfig(format!("writing fixture file: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_fixtures_parse_and_roundtrip() {
        let fx = DerivedFixtures::load().unwrap();
        assert_eq!(fx.equilibria.hh.len(), 4);
        assert_eq!(fx.equilibria.ml.len(), 2);
        assert_eq!(fx.izhikevich.fi_counts.len(), 4);
        let text = serde_json::to_string(&fx).unwrap();
        let back: DerivedFixtures = serde_json::from_str(&text).unwrap();
        assert_eq!(back, fx);
    }

    #[test]
    fn source_path_points_at_the_fixture_file() {
        let p = DerivedFixtures::source_path();
        assert!(p.ends_with("fixtures/derived.json"));
    }
}
