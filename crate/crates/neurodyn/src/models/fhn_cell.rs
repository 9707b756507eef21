use crate::error::{Error, Result};
use crate::system::ModelSystem;

/// Recovery drive g(v) for the slow equation of [`FhnCell`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryKind {
    /// g(v) = v, the standard linear recovery.
    Linear,
    /// g(v) = tanh(v), saturating recovery.
    Tanh,
}

impl RecoveryKind {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            RecoveryKind::Linear => v,
            RecoveryKind::Tanh => v.tanh(),
        }
    }
}

/// Constants for the slow-fast FitzHugh-Nagumo form: eps is the timescale
/// separation, eta offsets the recovery nullcline (it places the rest point
/// along the cubic), g selects the recovery drive.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SlowFastParams {
    pub eps: f64,
    pub eta: f64,
    pub g: RecoveryKind,
}

impl Default for SlowFastParams {
    fn default() -> Self {
        Self {
            eps: 0.08,
            // eta = 0 leaves a degenerate rest point at the origin; 0.1
            // keeps it hyperbolic while staying well inside the
            // oscillatory regime
            eta: 0.1,
            g: RecoveryKind::Linear,
        }
    }
}

impl SlowFastParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "timescale separation eps must be positive, got {}",
                self.eps
            )));
        }
        if !self.eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "recovery offset eta must be finite, got {}",
                self.eta
            )));
        }
        Ok(())
    }
}

/// State layout: [v, w] (dimensionless).
///
///   v' = v - v^3/3 - w + I
///   w' = eps (g(v) - w - eta)
///
/// This is the cell the driven and diffusive two-cell couplings are built
/// from; with I = 0 it is autonomous.
#[derive(Clone, Copy, Debug, Default)]
pub struct FhnCell {
    pub params: SlowFastParams,
}

impl ModelSystem for FhnCell {
    fn dimension(&self) -> usize {
        2
    }

    fn labels(&self) -> Vec<String> {
        vec!["v".into(), "w".into()]
    }

    fn rhs(&self, _t: f64, s: &[f64], input: f64, out: &mut [f64]) {
        let p = &self.params;
        let (v, w) = (s[0], s[1]);
        out[0] = v - v * v * v / 3.0 - w + input;
        out[1] = p.eps * (p.g.apply(v) - w - p.eta);
    }
}
