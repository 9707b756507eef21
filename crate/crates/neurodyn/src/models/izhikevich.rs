use crate::error::{Error, Result};
use crate::system::ModelSystem;

/// Izhikevich two-variable model constants. `threshold` is the spike-cut
/// voltage that triggers the discrete reset.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct IzhikevichParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub threshold: f64,
}

impl Default for IzhikevichParams {
    /// Regular-spiking cortical cell constants.
    fn default() -> Self {
        Self {
            a: 0.02,
            b: 0.2,
            c: -65.0,
            d: 8.0,
            threshold: 30.0,
        }
    }
}

impl IzhikevichParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "recovery rate a must be positive, got {}",
                self.a
            )));
        }
        if !self.threshold.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "threshold must be finite, got {}",
                self.threshold
            )));
        }
        for (name, v) in [("b", self.b), ("c", self.c), ("d", self.d)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// State layout: [v, u].
///
///   v' = 0.04 v^2 + 5 v + 140 - u + I
///   u' = a (b v - u)
///
/// with the hybrid reset v >= threshold: v <- c, u <- u + d applied after
/// each full integration step.
#[derive(Clone, Copy, Debug, Default)]
pub struct Izhikevich {
    pub params: IzhikevichParams,
}

impl ModelSystem for Izhikevich {
    fn dimension(&self) -> usize {
        2
    }

    fn labels(&self) -> Vec<String> {
        vec!["v".into(), "u".into()]
    }

    fn rhs(&self, _t: f64, s: &[f64], input: f64, out: &mut [f64]) {
        let (v, u) = (s[0], s[1]);
        out[0] = 0.04 * v * v + 5.0 * v + 140.0 - u + input;
        out[1] = self.params.a * (self.params.b * v - u);
    }

    fn reset(&self, s: &mut [f64]) -> bool {
        if s[0] >= self.params.threshold {
            s[0] = self.params.c;
            s[1] += self.params.d;
            true
        } else {
            false
        }
    }
}
