use crate::error::{Error, Result};
use crate::models::ml::MLParams;
use crate::system::ModelSystem;

/// Logistic activation 1 / (1 + exp(-(v - theta) / slope)).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SigmoidSpec {
    pub theta: f64,
    pub slope: f64,
}

impl SigmoidSpec {
    pub fn validate(&self) -> Result<()> {
        if self.slope == 0.0 || !self.slope.is_finite() || !self.theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigmoid needs finite theta and nonzero slope, got theta={} slope={}",
                self.theta, self.slope
            )));
        }
        Ok(())
    }

    pub fn apply(&self, v: f64) -> f64 {
        1.0 / (1.0 + (-(v - self.theta) / self.slope).exp())
    }
}

fn ml_voltage_current(p: &MLParams, v: f64, n: f64, input: f64) -> f64 {
    let i_l = p.g_l * (v - p.v_l);
    let i_ca = p.g_ca * p.m_ss(v) * (v - p.v_ca);
    let i_k = p.g_k * n * (v - p.v_k);
    input - i_l - i_ca - i_k
}

/// Morris-Lecar voltage dynamics with a rate-form recovery variable:
/// N' = lambda (-N + G(V)). This is the single cell the synaptic pair
/// reduces to when the gate is disabled; state layout [V, N].
#[derive(Clone, Copy, Debug)]
pub struct MlRateCell {
    pub cell: MLParams,
    pub lambda: f64,
    pub g: SigmoidSpec,
}

impl MlRateCell {
    pub fn new(cell: MLParams, lambda: f64, g: SigmoidSpec) -> Result<Self> {
        cell.validate()?;
        g.validate()?;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "recovery rate lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self { cell, lambda, g })
    }
}

impl ModelSystem for MlRateCell {
    fn dimension(&self) -> usize {
        2
    }

    fn labels(&self) -> Vec<String> {
        vec!["V".into(), "N".into()]
    }

    fn rhs(&self, _t: f64, s: &[f64], input: f64, out: &mut [f64]) {
        let (v, n) = (s[0], s[1]);
        out[0] = ml_voltage_current(&self.cell, v, n, input) / self.cell.c;
        out[1] = self.lambda * (-n + self.g.apply(v));
    }

    fn clamp(&self, s: &mut [f64]) {
        s[1] = s[1].clamp(0.0, 1.0);
    }
}

/// Parameters of the synaptically coupled two-cell system. The gate Z opens
/// with presynaptic voltage through F and injects -Z (V_2 - gamma) into the
/// postsynaptic cell; both recovery variables follow the rate form
/// N' = lambda (-N + G(V)).
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct MlSynapticParams {
    pub cell1: MLParams,
    pub cell2: MLParams,
    pub lambda: f64,
    pub tau: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Gate activation driven by V_1.
    pub f: SigmoidSpec,
    /// Recovery activation; the default matches the tanh steady state of
    /// the intrinsic model exactly (logistic((v - theta) / s) equals
    /// 0.5 (1 + tanh((v - theta) / (2 s)))).
    pub g: SigmoidSpec,
}

impl Default for MlSynapticParams {
    fn default() -> Self {
        Self {
            cell1: MLParams::default(),
            cell2: MLParams::default(),
            lambda: 0.04,
            tau: 5.0,
            alpha: 1.0,
            gamma: 0.0,
            f: SigmoidSpec {
                theta: 10.0,
                slope: 5.0,
            },
            g: SigmoidSpec {
                theta: 2.0,
                slope: 15.0,
            },
        }
    }
}

impl MlSynapticParams {
    pub fn validate(&self) -> Result<()> {
        self.cell1.validate()?;
        self.cell2.validate()?;
        self.f.validate()?;
        self.g.validate()?;
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gate time constant tau must be positive, got {}",
                self.tau
            )));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "recovery rate lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !self.alpha.is_finite() || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(
                "gate gain alpha and reversal gamma must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// One-way synaptic pair. State layout: [V_1, N_1, Z, V_2, N_2].
///
///   C_1 V_1' = I - g_l (V_1 - v_l) - g_ca m_ss(V_1)(V_1 - v_ca) - g_k N_1 (V_1 - v_k)
///       N_1' = lambda (-N_1 + G(V_1))
///   tau Z'   = alpha F(V_1) - Z
///   C_2 V_2' = (same currents for cell 2) - Z (V_2 - gamma)
///       N_2' = lambda (-N_2 + G(V_2))
#[derive(Clone, Copy, Debug, Default)]
pub struct MlSynapticPair {
    pub params: MlSynapticParams,
}

impl ModelSystem for MlSynapticPair {
    fn dimension(&self) -> usize {
        5
    }

    fn labels(&self) -> Vec<String> {
        vec![
            "V_1".into(),
            "N_1".into(),
            "Z".into(),
            "V_2".into(),
            "N_2".into(),
        ]
    }

    fn rhs(&self, _t: f64, s: &[f64], input: f64, out: &mut [f64]) {
        let p = &self.params;
        let (v1, n1, z, v2, n2) = (s[0], s[1], s[2], s[3], s[4]);

        out[0] = ml_voltage_current(&p.cell1, v1, n1, input) / p.cell1.c;
        out[1] = p.lambda * (-n1 + p.g.apply(v1));
        out[2] = (p.alpha * p.f.apply(v1) - z) / p.tau;

        // synaptic current enters the postsynaptic current balance before
        // the capacitance division; skipped at z == 0 so a closed gate
        // reduces to the isolated cell bitwise
        let mut i2 = ml_voltage_current(&p.cell2, v2, n2, input);
        if z != 0.0 {
            i2 -= z * (v2 - p.gamma);
        }
        out[3] = i2 / p.cell2.c;
        out[4] = p.lambda * (-n2 + p.g.apply(v2));
    }

    fn clamp(&self, s: &mut [f64]) {
        s[1] = s[1].clamp(0.0, 1.0);
        s[4] = s[4].clamp(0.0, 1.0);
    }
}
