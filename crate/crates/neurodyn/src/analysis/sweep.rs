use rayon::prelude::*;

use crate::analysis::period::estimate_period;
use crate::analysis::spikes::{detect_spikes, SpikeDetectorConfig};
use crate::error::{Error, Result};
use crate::integrate::{integrate, IntegratorConfig, Method};
use crate::state::StateVector;
use crate::stimulus::StimulusProtocol;
use crate::system::ModelSystem;

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct SweepPoint {
    pub amplitude: f64,
    pub count: usize,
    /// Mean firing rate over the window, in spikes per 1000 time units
    /// (Hz when time is in ms).
    pub rate: f64,
}

/// Shared integration settings for the sweep operations, which run one
/// simulation per amplitude from the same initial state.
#[derive(Clone, Copy, Debug)]
pub struct SweepSetup {
    pub method: Method,
    pub dt: f64,
    /// Simulation length; also the pulse duration and the rate denominator.
    pub window: f64,
}

impl SweepSetup {
    fn config(&self) -> IntegratorConfig {
        IntegratorConfig::new(self.method, self.dt, self.window)
    }
}

fn run_one<M: ModelSystem + ?Sized>(
    m: &M,
    s0: &StateVector,
    amplitude: f64,
    setup: &SweepSetup,
    detector: &SpikeDetectorConfig,
) -> Result<Vec<f64>> {
    let stim = StimulusProtocol::Pulse {
        amplitude,
        onset: 0.0,
        duration: setup.window,
    };
    let tr = integrate(m, s0, &stim, &setup.config()).map_err(|e| match e {
        Error::Divergence { time, .. } => Error::SweepDiverged { amplitude, time },
        other => other,
    })?;
    let channel = m.labels()[m.voltage_index()].clone();
    Ok(detect_spikes(&tr, &channel, detector)?.times)
}

/// Spike count and mean rate per stimulus amplitude. Amplitudes must be
/// strictly increasing; runs are independent and execute in parallel, with
/// results collected back in input order.
pub fn fi_sweep<M: ModelSystem + ?Sized>(
    m: &M,
    s0: &StateVector,
    amplitudes: &[f64],
    setup: &SweepSetup,
    detector: &SpikeDetectorConfig,
) -> Result<Vec<SweepPoint>> {
    if amplitudes.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "sweep needs at least 2 amplitudes, got {}",
            amplitudes.len()
        )));
    }
    for w in amplitudes.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidInput(format!(
                "amplitudes must be strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
    }
    amplitudes
        .par_iter()
        .map(|&amplitude| {
            let spikes = run_one(m, s0, amplitude, setup, detector)?;
            Ok(SweepPoint {
                amplitude,
                count: spikes.len(),
                rate: spikes.len() as f64 / setup.window * 1000.0,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct FrequencyPoint {
    pub amplitude: f64,
    /// 1000 / period for periodic firing; None when the train failed the
    /// periodicity gate and was excluded from the span.
    pub rate: Option<f64>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct FrequencyReport {
    /// (max rate - min rate) / mean rate over the periodic amplitudes.
    pub span: f64,
    pub points: Vec<FrequencyPoint>,
}

/// How strongly the firing rate tracks the stimulus amplitude. Each
/// amplitude's steady rate comes from the mean inter-spike interval after
/// dropping `discard_transient` spikes; non-periodic entries are flagged
/// and left out of the span.
pub fn frequency_sensitivity<M: ModelSystem + ?Sized>(
    m: &M,
    s0: &StateVector,
    amplitudes: &[f64],
    setup: &SweepSetup,
    detector: &SpikeDetectorConfig,
    discard_transient: usize,
) -> Result<FrequencyReport> {
    if amplitudes.is_empty() {
        return Err(Error::InvalidInput("no amplitudes to sweep".into()));
    }
    let points: Vec<FrequencyPoint> = amplitudes
        .par_iter()
        .map(|&amplitude| {
            let spikes = run_one(m, s0, amplitude, setup, detector)?;
            let train = crate::analysis::spikes::SpikeTrain {
                times: spikes,
                channel: m.labels()[m.voltage_index()].clone(),
                config: *detector,
            };
            let rate = estimate_period(&train, discard_transient)
                .period()
                .map(|p| 1000.0 / p);
            Ok(FrequencyPoint { amplitude, rate })
        })
        .collect::<Result<_>>()?;

    let rates: Vec<f64> = points.iter().filter_map(|p| p.rate).collect();
    if rates.is_empty() {
        return Err(Error::AllNotPeriodic);
    }
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    let max = rates.iter().cloned().fold(f64::MIN, f64::max);
    let min = rates.iter().cloned().fold(f64::MAX, f64::min);
    Ok(FrequencyReport {
        span: (max - min) / mean,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::izhikevich::Izhikevich;

    /// Fires on a fixed clock no matter what current it gets.
    struct Metronome;
    impl ModelSystem for Metronome {
        fn dimension(&self) -> usize {
            1
        }
        fn labels(&self) -> Vec<String> {
            vec!["v".into()]
        }
        fn rhs(&self, t: f64, _s: &[f64], _i: f64, out: &mut [f64]) {
            use std::f64::consts::PI;
            let w = 2.0 * PI / 50.0;
            out[0] = w * (w * t).cos();
        }
    }

    fn det() -> SpikeDetectorConfig {
        SpikeDetectorConfig::new(29.9, 2.0)
    }

    #[test]
    fn equal_amplitudes_rejected() {
        let m = Izhikevich::default();
        let s0 = StateVector::new(vec![-65.0, -13.0]).unwrap();
        let setup = SweepSetup {
            method: Method::Rk4,
            dt: 0.01,
            window: 100.0,
        };
        let r = fi_sweep(&m, &s0, &[5.0, 5.0], &setup, &det());
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn counts_are_nondecreasing_and_silent_at_zero() {
        let m = Izhikevich::default();
        let s0 = StateVector::new(vec![-65.0, -13.0]).unwrap();
        let setup = SweepSetup {
            method: Method::Rk4,
            dt: 0.01,
            window: 300.0,
        };
        let pts = fi_sweep(&m, &s0, &[0.0, 5.0, 10.0], &setup, &det()).unwrap();
        assert_eq!(pts[0].count, 0);
        assert!(pts.windows(2).all(|w| w[0].count <= w[1].count));
        assert!(pts[2].count > 0);
        assert_eq!(pts[2].rate, pts[2].count as f64 / 300.0 * 1000.0);
    }

    #[test]
    fn repeated_sweeps_are_identical() {
        let m = Izhikevich::default();
        let s0 = StateVector::new(vec![-65.0, -13.0]).unwrap();
        let setup = SweepSetup {
            method: Method::Rk4,
            dt: 0.01,
            window: 200.0,
        };
        let a = fi_sweep(&m, &s0, &[3.0, 9.0, 14.0], &setup, &det()).unwrap();
        let b = fi_sweep(&m, &s0, &[3.0, 9.0, 14.0], &setup, &det()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.count, y.count);
            assert_eq!(x.rate.to_bits(), y.rate.to_bits());
        }
    }

    #[test]
    fn input_independent_firing_has_zero_span() {
        let s0 = StateVector::new(vec![0.0]).unwrap();
        let setup = SweepSetup {
            method: Method::Rk4,
            dt: 0.1,
            window: 600.0,
        };
        let rep = frequency_sensitivity(
            &Metronome,
            &s0,
            &[1.0, 2.0, 3.0],
            &setup,
            &SpikeDetectorConfig::new(0.5, 2.0),
            1,
        )
        .unwrap();
        assert!(rep.span.abs() < 1e-9, "span {}", rep.span);
        assert!(rep.points.iter().all(|p| p.rate.is_some()));
        let r = rep.points[0].rate.unwrap();
        assert!((r - 20.0).abs() < 0.1, "rate {r}");
    }

    #[test]
    fn silent_model_reports_all_not_periodic() {
        struct Flat;
        impl ModelSystem for Flat {
            fn dimension(&self) -> usize {
                1
            }
            fn labels(&self) -> Vec<String> {
                vec!["v".into()]
            }
            fn rhs(&self, _t: f64, _s: &[f64], _i: f64, out: &mut [f64]) {
                out[0] = 0.0;
            }
        }
        let s0 = StateVector::new(vec![-1.0]).unwrap();
        let setup = SweepSetup {
            method: Method::Euler,
            dt: 0.1,
            window: 50.0,
        };
        let r = frequency_sensitivity(
            &Flat,
            &s0,
            &[1.0, 2.0],
            &setup,
            &SpikeDetectorConfig::new(0.0, 0.0),
            0,
        );
        assert!(matches!(r, Err(Error::AllNotPeriodic)));
    }
}
