use crate::error::{Error, Result};
use crate::system::ModelSystem;

/// Hodgkin-Huxley membrane parameters. Units: uF/cm^2, mS/cm^2, mV;
/// currents in uA/cm^2; time in ms.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct HHParams {
    pub c_m: f64,
    pub g_na: f64,
    pub g_k: f64,
    pub g_l: f64,
    pub v_na: f64,
    pub v_k: f64,
    pub v_l: f64,
}

impl Default for HHParams {
    /// Squid-axon constants at 6.3 C in the modern convention
    /// (resting potential near -65 mV).
    fn default() -> Self {
        Self {
            c_m: 1.0,
            g_na: 120.0,
            g_k: 36.0,
            g_l: 0.3,
            v_na: 50.0,
            v_k: -77.0,
            v_l: -54.4,
        }
    }
}

impl HHParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_m > 0.0) || !self.c_m.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "membrane capacitance must be positive, got {}",
                self.c_m
            )));
        }
        for (name, g) in [("g_na", self.g_na), ("g_k", self.g_k), ("g_l", self.g_l)] {
            if !(g >= 0.0) || !g.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "conductance {name} must be >= 0, got {g}"
                )));
            }
        }
        for (name, v) in [("v_na", self.v_na), ("v_k", self.v_k), ("v_l", self.v_l)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "reversal potential {name} must be finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// State layout: [V, m, h, n]. Gating kinetics are the standard first-order
/// forms dx/dt = alpha(V)(1 - x) - beta(V)x with the classic squid rate
/// functions; the integrator clamps m, h, n to [0, 1] after every step.
#[derive(Clone, Copy, Debug, Default)]
pub struct HodgkinHuxley {
    pub params: HHParams,
}

/// x / (1 - e^{-x}) with the removable singularity at x = 0 filled in by its
/// series; keeps the alpha_m / alpha_n rates finite at V = -40 and V = -55.
fn rexprel(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 + x / 2.0 + x * x / 12.0
    } else {
        x / (1.0 - (-x).exp())
    }
}

pub fn alpha_m(v: f64) -> f64 {
    rexprel((v + 40.0) / 10.0)
}

pub fn beta_m(v: f64) -> f64 {
    4.0 * (-(v + 65.0) / 18.0).exp()
}

pub fn alpha_h(v: f64) -> f64 {
    0.07 * (-(v + 65.0) / 20.0).exp()
}

pub fn beta_h(v: f64) -> f64 {
    1.0 / (1.0 + (-(v + 35.0) / 10.0).exp())
}

pub fn alpha_n(v: f64) -> f64 {
    0.1 * rexprel((v + 55.0) / 10.0)
}

pub fn beta_n(v: f64) -> f64 {
    0.125 * (-(v + 65.0) / 80.0).exp()
}

impl ModelSystem for HodgkinHuxley {
    fn dimension(&self) -> usize {
        4
    }

    fn labels(&self) -> Vec<String> {
        vec!["V".into(), "m".into(), "h".into(), "n".into()]
    }

    fn rhs(&self, _t: f64, s: &[f64], input: f64, out: &mut [f64]) {
        let p = &self.params;
        let (v, m, h, n) = (s[0], s[1], s[2], s[3]);

        let i_na = p.g_na * m * m * m * h * (v - p.v_na);
        let i_k = p.g_k * n * n * n * n * (v - p.v_k);
        let i_l = p.g_l * (v - p.v_l);

        out[0] = (input - i_na - i_k - i_l) / p.c_m;
        out[1] = alpha_m(v) * (1.0 - m) - beta_m(v) * m;
        out[2] = alpha_h(v) * (1.0 - h) - beta_h(v) * h;
        out[3] = alpha_n(v) * (1.0 - n) - beta_n(v) * n;
    }

    fn clamp(&self, s: &mut [f64]) {
        for x in &mut s[1..4] {
            *x = x.clamp(0.0, 1.0);
        }
    }
}

/// Conductance implied by a measured channel current at a holding potential:
/// G = I / (V_m - V_rev). The operating point V_m = V_rev carries no
/// conductance information, so it is an error rather than an infinity.
pub fn hh_conductance(i_ch: f64, v_m: f64, v_rev: f64) -> Result<f64> {
    if v_m == v_rev {
        return Err(Error::DivisionByZero(
            "membrane potential equals the reversal potential",
        ));
    }
    Ok(i_ch / (v_m - v_rev))
}
