use crate::error::{Error, Result};
use crate::models::fhn_cell::SlowFastParams;
use crate::system::ModelSystem;

/// Two slow-fast FitzHugh-Nagumo cells with a one-way voltage drive:
/// cell 1 runs free, cell 2's voltage equation gains +D V1.
///
/// State layout: [v_1, w_1, v_2, w_2].
///
///   v_1' = v_1 - v_1^3/3 - w_1 + I
///   w_1' = eps_1 (g(v_1) - w_1 - eta_1)
///   v_2' = v_2 - v_2^3/3 - w_2 + D v_1 + I
///   w_2' = eps_2 (g(v_2) - w_2 - eta_2)
///
/// An external stimulus feeds both voltage equations; with I = 0 and D = 0
/// the two cells are exactly the autonomous single-cell system twice.
#[derive(Clone, Copy, Debug)]
pub struct FhnDrivenPair {
    pub cell1: SlowFastParams,
    pub cell2: SlowFastParams,
    pub d: f64,
}

impl FhnDrivenPair {
    pub fn new(cell1: SlowFastParams, cell2: SlowFastParams, d: f64) -> Result<Self> {
        cell1.validate()?;
        cell2.validate()?;
        if !d.is_finite() {
            return Err(Error::InvalidGain(d));
        }
        Ok(Self { cell1, cell2, d })
    }
}

impl ModelSystem for FhnDrivenPair {
    fn dimension(&self) -> usize {
        4
    }

    fn labels(&self) -> Vec<String> {
        vec!["v_1".into(), "w_1".into(), "v_2".into(), "w_2".into()]
    }

    fn rhs(&self, _t: f64, s: &[f64], input: f64, out: &mut [f64]) {
        let (v1, w1, v2, w2) = (s[0], s[1], s[2], s[3]);
        let (p1, p2) = (&self.cell1, &self.cell2);

        out[0] = v1 - v1 * v1 * v1 / 3.0 - w1 + input;
        out[1] = p1.eps * (p1.g.apply(v1) - w1 - p1.eta);
        out[2] = v2 - v2 * v2 * v2 / 3.0 - w2 + input;
        out[3] = p2.eps * (p2.g.apply(v2) - w2 - p2.eta);

        // skipped at d == 0 so the uncoupled pair is bitwise two free cells
        if self.d != 0.0 {
            out[2] += self.d * v1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fhn_cell::FhnCell;

    fn params(eps: f64) -> SlowFastParams {
        SlowFastParams {
            eps,
            ..Default::default()
        }
    }

    #[test]
    fn zero_drive_is_two_free_cells() {
        let pair = FhnDrivenPair::new(params(0.08), params(0.1), 0.0).unwrap();
        let s = [0.9, -0.3, -1.2, 0.4];
        let mut out = [0.0; 4];
        pair.rhs(0.0, &s, 0.05, &mut out);

        let (c1, c2) = (
            FhnCell {
                params: params(0.08),
            },
            FhnCell {
                params: params(0.1),
            },
        );
        let (mut i1, mut i2) = ([0.0; 2], [0.0; 2]);
        c1.rhs(0.0, &s[..2], 0.05, &mut i1);
        c2.rhs(0.0, &s[2..], 0.05, &mut i2);
        assert_eq!(&out[..2], &i1);
        assert_eq!(&out[2..], &i2);
    }

    #[test]
    fn drive_adds_exactly_d_times_v1() {
        let free = FhnDrivenPair::new(params(0.08), params(0.1), 0.0).unwrap();
        let driven = FhnDrivenPair::new(params(0.08), params(0.1), 0.5).unwrap();
        let s = [1.0, 0.0, -0.4, 0.2];
        let (mut a, mut b) = ([0.0; 4], [0.0; 4]);
        free.rhs(0.0, &s, 0.0, &mut a);
        driven.rhs(0.0, &s, 0.0, &mut b);
        assert_eq!(b[2] - a[2], 0.5);
        assert_eq!(a[0], b[0]);
        assert_eq!(a[3], b[3]);
    }

    #[test]
    fn identical_cells_same_start_stay_symmetric() {
        // with d = 0 the two halves evolve through identical derivatives
        let pair = FhnDrivenPair::new(params(0.08), params(0.08), 0.0).unwrap();
        let mut s = [0.7, -0.1, 0.7, -0.1];
        let mut out = [0.0; 4];
        for _ in 0..1000 {
            pair.rhs(0.0, &s, 0.0, &mut out);
            for k in 0..4 {
                s[k] += 0.01 * out[k];
            }
        }
        assert!((s[0] - s[2]).abs() < 1e-12);
        assert!((s[1] - s[3]).abs() < 1e-12);
    }

    #[test]
    fn non_finite_drive_rejected() {
        assert!(FhnDrivenPair::new(params(0.08), params(0.1), f64::INFINITY).is_err());
    }
}
