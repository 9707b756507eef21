use std::sync::Arc;

use crate::error::{Error, Result};
use crate::system::ModelSystem;

/// How the two voltage equations exchange current.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKernel {
    /// Each cell gains +k (V_other - V_self); vanishes on the
    /// synchronization manifold.
    Diffusive,
    /// Each cell gains +k V_other.
    Drive,
}

/// Two cells side by side with a symmetric voltage coupling. The cells may
/// differ (mismatched timescales are the interesting case); the state is
/// cell A's variables followed by cell B's, labels suffixed `_1` / `_2`.
pub struct CoupledPair {
    a: Arc<dyn ModelSystem>,
    b: Arc<dyn ModelSystem>,
    gain: f64,
    kernel: PairKernel,
    dim_a: usize,
    dim_b: usize,
    va: usize,
    vb: usize,
}

impl CoupledPair {
    pub fn new(
        a: Arc<dyn ModelSystem>,
        b: Arc<dyn ModelSystem>,
        gain: f64,
        kernel: PairKernel,
    ) -> Result<Self> {
        if !gain.is_finite() {
            return Err(Error::InvalidGain(gain));
        }
        let (dim_a, dim_b) = (a.dimension(), b.dimension());
        let (va, vb) = (a.voltage_index(), b.voltage_index());
        Ok(Self {
            a,
            b,
            gain,
            kernel,
            dim_a,
            dim_b,
            va,
            vb,
        })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }
}

/// Pairs two copies of the same cell.
pub fn build_pair(
    cell: Arc<dyn ModelSystem>,
    gain: f64,
    kernel: PairKernel,
) -> Result<CoupledPair> {
    CoupledPair::new(cell.clone(), cell, gain, kernel)
}

/// Pairs two distinct cells (e.g. mismatched timescale constants).
pub fn build_pair_mixed(
    a: Arc<dyn ModelSystem>,
    b: Arc<dyn ModelSystem>,
    gain: f64,
    kernel: PairKernel,
) -> Result<CoupledPair> {
    CoupledPair::new(a, b, gain, kernel)
}

impl ModelSystem for CoupledPair {
    fn dimension(&self) -> usize {
        self.dim_a + self.dim_b
    }

    fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .a
            .labels()
            .iter()
            .map(|l| format!("{l}_1"))
            .collect();
        out.extend(self.b.labels().iter().map(|l| format!("{l}_2")));
        out
    }

    fn rhs(&self, t: f64, s: &[f64], input: f64, out: &mut [f64]) {
        let (sa, sb) = s.split_at(self.dim_a);
        let (oa, ob) = out.split_at_mut(self.dim_a);
        self.a.rhs(t, sa, input, oa);
        self.b.rhs(t, sb, input, ob);
        // zero gain must reduce to two independent copies bitwise, so the
        // coupling terms are skipped entirely rather than adding +-0.0
        if self.gain != 0.0 {
            let (v_a, v_b) = (sa[self.va], sb[self.vb]);
            match self.kernel {
                PairKernel::Diffusive => {
                    oa[self.va] += self.gain * (v_b - v_a);
                    ob[self.vb] += self.gain * (v_a - v_b);
                }
                PairKernel::Drive => {
                    oa[self.va] += self.gain * v_b;
                    ob[self.vb] += self.gain * v_a;
                }
            }
        }
    }

    fn reset(&self, s: &mut [f64]) -> bool {
        let (sa, sb) = s.split_at_mut(self.dim_a);
        let ra = self.a.reset(sa);
        let rb = self.b.reset(sb);
        ra || rb
    }

    fn clamp(&self, s: &mut [f64]) {
        let (sa, sb) = s.split_at_mut(self.dim_a);
        self.a.clamp(sa);
        self.b.clamp(sb);
    }

    fn voltage_index(&self) -> usize {
        self.va
    }
}
