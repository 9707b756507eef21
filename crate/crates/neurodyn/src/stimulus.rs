use crate::error::{Error, Result};

/// Piecewise-constant external drive.
///
/// Amplitudes are in the driven model's native current units (models mix
/// physical and dimensionless conventions; see the catalog). Time is in ms.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StimulusProtocol {
    /// `amplitude` for all t.
    Constant { amplitude: f64 },
    /// `amplitude` on [onset, onset + duration), 0 elsewhere.
    Pulse {
        amplitude: f64,
        onset: f64,
        duration: f64,
    },
    /// 0 before onset, `amplitude` from onset on.
    Step { amplitude: f64, onset: f64 },
}

impl StimulusProtocol {
    pub fn zero() -> Self {
        StimulusProtocol::Constant { amplitude: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let check_finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("stimulus {name} must be finite, got {v}")))
            }
        };
        match *self {
            StimulusProtocol::Constant { amplitude } => check_finite("amplitude", amplitude),
            StimulusProtocol::Pulse {
                amplitude,
                onset,
                duration,
            } => {
                check_finite("amplitude", amplitude)?;
                check_finite("onset", onset)?;
                check_finite("duration", duration)?;
                if onset < 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "pulse onset must be >= 0, got {onset}"
                    )));
                }
                if duration <= 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "pulse duration must be > 0, got {duration}"
                    )));
                }
                Ok(())
            }
            StimulusProtocol::Step { amplitude, onset } => {
                check_finite("amplitude", amplitude)?;
                check_finite("onset", onset)?;
                if onset < 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "step onset must be >= 0, got {onset}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Drive value at time t. Total on validated protocols and deterministic:
    /// the same t always yields the same value.
    pub fn evaluate(&self, t: f64) -> f64 {
        match *self {
            StimulusProtocol::Constant { amplitude } => amplitude,
            StimulusProtocol::Pulse {
                amplitude,
                onset,
                duration,
            } => {
                if t >= onset && t < onset + duration {
                    amplitude
                } else {
                    0.0
                }
            }
            StimulusProtocol::Step { amplitude, onset } => {
                if t >= onset {
                    amplitude
                } else {
                    0.0
                }
            }
        }
    }
}
