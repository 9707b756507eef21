use crate::error::{Error, Result};
use crate::system::ModelSystem;

/// Morris-Lecar membrane parameters. Units: uF/cm^2, mS/cm^2, mV, ms.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct MLParams {
    pub c: f64,
    pub g_l: f64,
    pub g_ca: f64,
    pub g_k: f64,
    pub v_l: f64,
    pub v_ca: f64,
    pub v_k: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
    pub v4: f64,
    pub phi: f64,
}

impl Default for MLParams {
    /// Classic oscillatory (Hopf-regime) constant set.
    fn default() -> Self {
        Self {
            c: 20.0,
            g_l: 2.0,
            g_ca: 4.4,
            g_k: 8.0,
            v_l: -60.0,
            v_ca: 120.0,
            v_k: -84.0,
            v1: -1.2,
            v2: 18.0,
            v3: 2.0,
            v4: 30.0,
            phi: 0.04,
        }
    }
}

impl MLParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "membrane capacitance must be positive, got {}",
                self.c
            )));
        }
        if self.v2 == 0.0 || self.v4 == 0.0 {
            return Err(Error::InvalidParameter(
                "activation slopes v2 and v4 are divisors and must be nonzero".into(),
            ));
        }
        for (name, v) in [
            ("g_l", self.g_l),
            ("g_ca", self.g_ca),
            ("g_k", self.g_k),
            ("v_l", self.v_l),
            ("v_ca", self.v_ca),
            ("v_k", self.v_k),
            ("v1", self.v1),
            ("v2", self.v2),
            ("v3", self.v3),
            ("v4", self.v4),
            ("phi", self.phi),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Instantaneous calcium activation, in [0, 1] for all V.
    pub fn m_ss(&self, v: f64) -> f64 {
        0.5 * (1.0 + ((v - self.v1) / self.v2).tanh())
    }

    /// Steady-state potassium activation, in [0, 1] for all V.
    pub fn n_ss(&self, v: f64) -> f64 {
        0.5 * (1.0 + ((v - self.v3) / self.v4).tanh())
    }

    /// Potassium activation time constant; strictly positive for all V.
    pub fn tau_n(&self, v: f64) -> f64 {
        1.0 / (self.phi * ((v - self.v3) / (2.0 * self.v4)).cosh())
    }
}

/// State layout: [V, N].
///
///   C V' = I - g_l (V - V_l) - g_ca m_ss(V) (V - V_ca) - g_k N (V - V_k)
///     N' = (n_ss(V) - N) / tau_n(V)
///
/// The calcium activation is instantaneous; N is clamped to [0, 1] after
/// each integration step.
#[derive(Clone, Copy, Debug, Default)]
pub struct MorrisLecar {
    pub params: MLParams,
}

impl ModelSystem for MorrisLecar {
    fn dimension(&self) -> usize {
        2
    }

    fn labels(&self) -> Vec<String> {
        vec!["V".into(), "N".into()]
    }

    fn rhs(&self, _t: f64, s: &[f64], input: f64, out: &mut [f64]) {
        let p = &self.params;
        let (v, n) = (s[0], s[1]);
        let i_l = p.g_l * (v - p.v_l);
        let i_ca = p.g_ca * p.m_ss(v) * (v - p.v_ca);
        let i_k = p.g_k * n * (v - p.v_k);
        out[0] = (input - i_l - i_ca - i_k) / p.c;
        // multiply by 1/tau_n = phi cosh(..) instead of dividing
        out[1] = p.phi * ((v - p.v3) / (2.0 * p.v4)).cosh() * (p.n_ss(v) - n);
    }

    fn clamp(&self, s: &mut [f64]) {
        s[1] = s[1].clamp(0.0, 1.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_activation_at_v1() {
        let p = MLParams::default();
        assert_eq!(p.m_ss(p.v1), 0.5);
        assert_eq!(p.n_ss(p.v3), 0.5);
    }

    #[test]
    fn calcium_term_vanishes_at_its_reversal() {
        // with g_l = 0 and the potassium current cancelled by the drive,
        // V' at V = V_Ca is exactly zero
        let params = MLParams {
            g_l: 0.0,
            ..MLParams::default()
        };
        let m = MorrisLecar { params };
        let n = 0.25;
        let i_k = params.g_k * n * (params.v_ca - params.v_k);
        let mut out = [0.0; 2];
        m.rhs(0.0, &[params.v_ca, n], i_k, &mut out);
        assert_eq!(out[0], 0.0);
    }

    #[test]
    fn activations_bounded_and_tau_positive() {
        let p = MLParams::default();
        for v in [-500.0, -84.0, -1.2, 0.0, 2.0, 120.0, 500.0] {
            assert!((0.0..=1.0).contains(&p.m_ss(v)));
            assert!((0.0..=1.0).contains(&p.n_ss(v)));
            assert!(p.tau_n(v) > 0.0);
        }
    }

    #[test]
    fn zero_slope_rejected() {
        let p = MLParams {
            v2: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
