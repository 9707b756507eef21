use crate::error::{Error, Result};
use crate::system::ModelSystem;

/// Hindmarsh-Rose constants (dimensionless). The slow adaptation variable w
/// relaxes toward s (v - v_rest) at rate mu.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct HRParams {
    pub b: f64,
    pub mu: f64,
    pub s: f64,
    pub v_rest: f64,
}

impl Default for HRParams {
    fn default() -> Self {
        Self {
            b: 3.0,
            mu: 0.01,
            s: 4.0,
            v_rest: -1.6,
        }
    }
}

impl HRParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "slow timescale mu must be positive, got {}",
                self.mu
            )));
        }
        for (name, v) in [("b", self.b), ("s", self.s), ("v_rest", self.v_rest)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// State layout: [v, u, w].
///
///   v' = u - v^3 + b v^2 + I - w
///   u' = 1 - 5 v^2 - u
///   w' = mu (s (v - v_rest) - w)
#[derive(Clone, Copy, Debug, Default)]
pub struct HindmarshRose {
    pub params: HRParams,
}

impl ModelSystem for HindmarshRose {
    fn dimension(&self) -> usize {
        3
    }

    fn labels(&self) -> Vec<String> {
        vec!["v".into(), "u".into(), "w".into()]
    }

    fn rhs(&self, _t: f64, s: &[f64], input: f64, out: &mut [f64]) {
        let p = &self.params;
        let (v, u, w) = (s[0], s[1], s[2]);
        out[0] = u - v * v * v + p.b * v * v + input - w;
        out[1] = 1.0 - 5.0 * v * v - u;
        out[2] = p.mu * (p.s * (v - p.v_rest) - w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_at_origin() {
        let m = HindmarshRose::default();
        let mut out = [0.0; 3];
        m.rhs(0.0, &[0.0, 0.0, 0.0], 0.0, &mut out);
        assert_eq!(out[0], 0.0);
        assert_eq!(out[1], 1.0);
        assert!((out[2] - 0.064).abs() < 1e-15);
    }

    #[test]
    fn recovery_balances_at_unit_u() {
        let m = HindmarshRose::default();
        let mut out = [0.0; 3];
        m.rhs(0.0, &[0.0, 1.0, 0.0], 0.0, &mut out);
        assert_eq!(out[1], 0.0);
    }

    #[test]
    fn mu_must_be_positive() {
        let p = HRParams {
            mu: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
