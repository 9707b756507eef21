use crate::error::{Error, Result};
use crate::system::ModelSystem;

/// FitzHugh-Nagumo constants in the van der Pol-style scaling, where `c`
/// both multiplies the fast equation and divides the slow one.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct FHNParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for FHNParams {
    fn default() -> Self {
        Self {
            a: 0.7,
            b: 0.8,
            c: 3.0,
        }
    }
}

impl FHNParams {
    pub fn validate(&self) -> Result<()> {
        if self.c == 0.0 || !self.c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "timescale constant c appears as a divisor and must be nonzero, got {}",
                self.c
            )));
        }
        for (name, v) in [("a", self.a), ("b", self.b)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// State layout: [v, u] (both dimensionless).
///
///   v' = c (v - u + I - v^3/3)
///   u' = (v - b u + a) / c
#[derive(Clone, Copy, Debug, Default)]
pub struct FitzHughNagumo {
    pub params: FHNParams,
}

impl ModelSystem for FitzHughNagumo {
    fn dimension(&self) -> usize {
        2
    }

    fn labels(&self) -> Vec<String> {
        vec!["v".into(), "u".into()]
    }

    fn rhs(&self, _t: f64, s: &[f64], input: f64, out: &mut [f64]) {
        let p = &self.params;
        let (v, u) = (s[0], s[1]);
        out[0] = p.c * (v - u + input - v * v * v / 3.0);
        out[1] = (v - p.b * u + p.a) / p.c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_at_origin() {
        let m = FitzHughNagumo::default();
        let mut out = [0.0; 2];
        m.rhs(0.0, &[0.0, 0.0], 0.0, &mut out);
        assert_eq!(out[0], 0.0);
        assert!((out[1] - 0.7 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cubic_cancels_at_sqrt_three() {
        let m = FitzHughNagumo::default();
        let v = 3.0_f64.sqrt();
        let mut out = [0.0; 2];
        m.rhs(0.0, &[v, 0.0], 0.0, &mut out);
        assert!(out[0].abs() < 1e-14);
    }

    #[test]
    fn zero_c_is_rejected() {
        let p = FHNParams {
            c: 0.0,
            ..Default::default()
        };
        assert!(matches!(p.validate(), Err(Error::InvalidParameter(_))));
    }
}
