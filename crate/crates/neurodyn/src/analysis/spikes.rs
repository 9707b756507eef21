use crate::error::{Error, Result};
use crate::integrate::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Rising,
}

impl Default for Direction {
    fn default() -> Self {
        Direction::Rising
    }
}

#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct SpikeDetectorConfig {
    pub threshold: f64,
    #[serde(default)]
    pub direction: Direction,
    /// Minimum gap between accepted spikes, in the trace's time unit.
    #[serde(default)]
    pub refractory: f64,
}

impl SpikeDetectorConfig {
    pub fn new(threshold: f64, refractory: f64) -> Self {
        Self {
            threshold,
            direction: Direction::Rising,
            refractory,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.threshold.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "detector threshold must be finite, got {}",
                self.threshold
            )));
        }
        if !(self.refractory >= 0.0) || !self.refractory.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "refractory must be >= 0, got {}",
                self.refractory
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SpikeTrain {
    /// Strictly increasing crossing times.
    pub times: Vec<f64>,
    pub channel: String,
    pub config: SpikeDetectorConfig,
}

impl SpikeTrain {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn intervals(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Finds rising threshold crossings on one channel: a spike is recorded
/// wherever v[i] < threshold <= v[i+1], at the linearly interpolated crossing
/// time, unless it falls within the refractory gap of the previously
/// accepted spike.
pub fn detect_spikes(
    tr: &Trajectory,
    channel: &str,
    cfg: &SpikeDetectorConfig,
) -> Result<SpikeTrain> {
    cfg.validate()?;
    let idx = tr
        .channel_index(channel)
        .ok_or_else(|| Error::UnknownChannel(channel.to_string()))?;
    let Direction::Rising = cfg.direction;

    let mut times = Vec::new();
    for i in 0..tr.len().saturating_sub(1) {
        let a = tr.samples[i][idx];
        let b = tr.samples[i + 1][idx];
        if a < cfg.threshold && cfg.threshold <= b {
            let t0 = tr.time(i);
            let tc = t0 + (tr.time(i + 1) - t0) * (cfg.threshold - a) / (b - a);
            if times.last().map_or(true, |&last| tc - last >= cfg.refractory) {
                times.push(tc);
            }
        }
    }
    Ok(SpikeTrain {
        times,
        channel: channel.to_string(),
        config: *cfg,
    })
}
