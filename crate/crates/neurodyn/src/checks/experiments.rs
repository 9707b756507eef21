//! The pinned experiment battery. Every configuration here is frozen; the
//! measured outcomes live in fixtures/derived.json. Verification re-runs
//! these and compares; `regenerate` re-measures and rewrites the file.

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::analysis::{
    acceleration_ratio, detect_spikes, estimate_period, fi_sweep, frequency_sensitivity,
    sync_report, AccelerationReport, FrequencyReport, Periodicity, SpikeDetectorConfig,
    SpikeTrain, SweepSetup, SyncReport,
};
use crate::checks::oracle::{find_equilibrium, LinearDecay};
use crate::coupled::{
    build_pair_mixed, FhnDrivenPair, HrGate, HrKernel, HrNetwork, HrNetworkParams, MlRateCell,
    MlSynapticPair, MlSynapticParams, PairKernel,
};
use crate::csvout::trajectory_to_csv;
use crate::error::{Error, Result};
use crate::fixtures::{
    AccelerationFixture, ConvergenceFixture, DerivedFixtures, DrivenPairFixture, EquilibriaFixture,
    FhnFixture, HhFixture, HrSyncFixture, IzhikevichFixture,
};
use crate::integrate::{convergence_order, integrate, IntegratorConfig, Method, Trajectory};
use crate::models::fhn::FitzHughNagumo;
use crate::models::fhn_cell::{FhnCell, RecoveryKind, SlowFastParams};
use crate::models::hh::HodgkinHuxley;
use crate::models::hr::HRParams;
use crate::models::izhikevich::Izhikevich;
use crate::models::ml::MLParams;
use crate::state::StateVector;
use crate::stimulus::StimulusProtocol;
use crate::system::ModelSystem;

// ------------------------------------------------------------- shared pins

pub const CONVERGENCE_DTS: [f64; 3] = [0.2, 0.1, 0.05];
pub const IZH_FI_AMPS: [f64; 4] = [0.0, 5.0, 10.0, 15.0];
pub const IZH_SPAN_AMPS: [f64; 3] = [8.0, 10.0, 12.0];
pub const HH_SPAN_AMPS: [f64; 3] = [10.0, 20.0, 40.0];
pub const FHN_SPAN_AMPS: [f64; 3] = [0.5, 0.8, 1.1];
/// One-way drive gain for the mismatched slow-fast pair; every point of the
/// searched grid [0.1, 1.5] locks, this one sits mid-plateau.
pub const DRIVEN_D: f64 = 0.5;
pub const DRIVEN_EPS: [f64; 2] = [0.08, 0.1];
/// Attractive gain for the identical-cell pair (the network convention puts
/// the minus sign in front of the coupling sum, so attraction is negative).
pub const HR_SYNC_GAIN: f64 = -0.5;
/// Mismatched-pair configuration where diffusive coupling shortens the
/// shared period below both isolated ones. Found by grid sweep over
/// (eta, eps mismatch, gain); the plateau {0.13..0.15} is stable, its
/// neighbors below lose the oscillation entirely.
pub const ACCEL_EPS: [f64; 2] = [0.08, 0.12];
pub const ACCEL_ETA: f64 = 0.28;
pub const ACCEL_GAIN: f64 = 0.14;

fn dimensionless_detector() -> SpikeDetectorConfig {
    SpikeDetectorConfig::new(1.0, 2.0)
}

fn izh_detector() -> SpikeDetectorConfig {
    // just below the reset guard so the pre-reset sample is always caught
    SpikeDetectorConfig::new(29.9, 2.0)
}

fn state(values: &[f64]) -> StateVector {
    StateVector::raw(values.to_vec())
}

/// Spikes inside [w0, end], detected on the full trace so the refractory
/// state carries across the window edge.
fn windowed_train(
    tr: &Trajectory,
    channel: &str,
    det: &SpikeDetectorConfig,
    w0: f64,
) -> Result<SpikeTrain> {
    let mut train = detect_spikes(tr, channel, det)?;
    train.times.retain(|&t| t >= w0);
    Ok(train)
}

fn require_period(p: Periodicity, what: &str) -> Result<f64> {
    p.period()
        .ok_or_else(|| Error::InvalidInput(format!("{what} did not settle into a period")))
}

// ------------------------------------------------------------ fast checks

pub fn convergence_slopes() -> Result<(f64, f64)> {
    let s0 = state(&[1.0]);
    let zero = StimulusProtocol::zero();
    let rk4 = convergence_order(&LinearDecay, &s0, &zero, Method::Rk4, &CONVERGENCE_DTS, 1.0)?;
    let euler = convergence_order(&LinearDecay, &s0, &zero, Method::Euler, &CONVERGENCE_DTS, 1.0)?;
    Ok((rk4, euler))
}

/// Longest simulation the fast suite triggers, in steps. The convergence
/// reference runs at min(dt)/10 over one time unit.
pub fn fast_suite_max_steps() -> usize {
    let dt_ref = CONVERGENCE_DTS[CONVERGENCE_DTS.len() - 1] / 10.0;
    (1.0 / dt_ref).round() as usize
}

/// Throws random states at the reset map and checks the guard and the
/// after-state are exact: fire iff v >= threshold, landing on (c, u + d)
/// bitwise, and leave non-firing states untouched.
pub fn reset_exactness(cases: usize, seed: u64) -> Result<()> {
    let m = Izhikevich::default();
    let p = m.params;
    let mut rng = StdRng::seed_from_u64(seed);
    for i in 0..cases {
        let v = p.threshold + rng.random_range(-10.0..10.0);
        let u = rng.random_range(-30.0..30.0);
        let mut s = [v, u];
        let fired = m.reset(&mut s);
        let should = v >= p.threshold;
        if fired != should {
            return Err(Error::InvalidInput(format!(
                "case {i}: guard fired={fired} at v={v} (threshold {})",
                p.threshold
            )));
        }
        let want = if should { [p.c, u + p.d] } else { [v, u] };
        if s[0].to_bits() != want[0].to_bits() || s[1].to_bits() != want[1].to_bits() {
            return Err(Error::InvalidInput(format!(
                "case {i}: reset map produced {s:?}, expected {want:?}"
            )));
        }
    }
    Ok(())
}

fn bits_equal(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn expect_bits(context: &str, got: &[f64], want: &[f64]) -> Result<()> {
    if bits_equal(got, want) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{context}: coupled rhs {got:?} != stacked isolated rhs {want:?}"
        )))
    }
}

/// With coupling gains at zero, every coupled family's rhs must equal the
/// stacked isolated evaluations bit for bit, over random states and inputs.
pub fn zero_coupling_reduction(cases: usize, seed: u64) -> Result<()> {
    let mut rng = StdRng::seed_from_u64(seed);

    let fhn_cell = FhnCell::default();
    let pair_diff = build_pair_mixed(
        Arc::new(FhnCell::default()),
        Arc::new(Izhikevich::default()),
        0.0,
        PairKernel::Diffusive,
    )?;
    let pair_drive = build_pair_mixed(
        Arc::new(FhnCell::default()),
        Arc::new(Izhikevich::default()),
        0.0,
        PairKernel::Drive,
    )?;
    let izh = Izhikevich::default();
    let driven = FhnDrivenPair::new(SlowFastParams::default(), SlowFastParams::default(), 0.0)?;
    let hr_net = HrNetwork::new(HrNetworkParams {
        cell: HRParams::default(),
        g_s: -0.5, // nonzero gain, all-zero matrix
        sigma: HrGate::Uniform,
        kernel: HrKernel::Diffusive,
        coupling: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
    })?;
    let hr_cell = crate::models::hr::HindmarshRose::default();
    let ml_pair = MlSynapticPair {
        params: MlSynapticParams {
            alpha: 0.0,
            ..MlSynapticParams::default()
        },
    };
    let ml_defaults = MlSynapticParams::default();
    let ml_cell = MlRateCell::new(MLParams::default(), ml_defaults.lambda, ml_defaults.g)?;

    for i in 0..cases {
        let input = rng.random_range(-5.0..5.0);

        // generic pair builder, both kernels, heterogeneous cells
        let s = [
            rng.random_range(-2.5..2.5),
            rng.random_range(-2.5..2.5),
            rng.random_range(-80.0..35.0),
            rng.random_range(-30.0..30.0),
        ];
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        fhn_cell.rhs(0.0, &s[..2], input, &mut a);
        izh.rhs(0.0, &s[2..], input, &mut b);
        let stacked = [a[0], a[1], b[0], b[1]];
        for (kernel, pair) in [("diffusive", &pair_diff), ("drive", &pair_drive)] {
            let mut out = [0.0; 4];
            pair.rhs(0.0, &s, input, &mut out);
            expect_bits(&format!("case {i}, build_pair {kernel} gain 0"), &out, &stacked)?;
        }

        // one-way driven pair at d = 0
        let s = [
            rng.random_range(-2.5..2.5),
            rng.random_range(-2.5..2.5),
            rng.random_range(-2.5..2.5),
            rng.random_range(-2.5..2.5),
        ];
        let mut out = [0.0; 4];
        driven.rhs(0.0, &s, input, &mut out);
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        fhn_cell.rhs(0.0, &s[..2], input, &mut a);
        fhn_cell.rhs(0.0, &s[2..], input, &mut b);
        expect_bits(
            &format!("case {i}, driven pair d=0"),
            &out,
            &[a[0], a[1], b[0], b[1]],
        )?;

        // network with an all-zero coupling matrix
        let s: Vec<f64> = (0..6)
            .map(|k| match k % 3 {
                0 => rng.random_range(-2.0..2.0),
                1 => rng.random_range(-12.0..2.0),
                _ => rng.random_range(-1.0..3.0),
            })
            .collect();
        let mut out = [0.0; 6];
        hr_net.rhs(0.0, &s, input, &mut out);
        let mut a = [0.0; 3];
        let mut b = [0.0; 3];
        hr_cell.rhs(0.0, &s[..3], input, &mut a);
        hr_cell.rhs(0.0, &s[3..], input, &mut b);
        expect_bits(
            &format!("case {i}, network zero matrix"),
            &out,
            &[a[0], a[1], a[2], b[0], b[1], b[2]],
        )?;

        // synaptic pair with the gate pinned shut (z = 0, alpha = 0)
        let s = [
            rng.random_range(-70.0..40.0),
            rng.random_range(0.0..1.0),
            0.0,
            rng.random_range(-70.0..40.0),
            rng.random_range(0.0..1.0),
        ];
        let mut out = [0.0; 5];
        ml_pair.rhs(0.0, &s, input, &mut out);
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        ml_cell.rhs(0.0, &s[..2], input, &mut a);
        ml_cell.rhs(0.0, &s[3..], input, &mut b);
        expect_bits(
            &format!("case {i}, synaptic pair closed gate"),
            &out,
            &[a[0], a[1], 0.0, b[0], b[1]],
        )?;
    }
    Ok(())
}

/// Max |rhs| at the pinned rest states with zero input, per model.
pub fn equilibrium_residuals(eq: &EquilibriaFixture) -> [f64; 3] {
    fn residual<M: ModelSystem>(m: &M, x: &[f64]) -> f64 {
        let mut out = vec![0.0; x.len()];
        m.rhs(0.0, x, 0.0, &mut out);
        out.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
    [
        residual(&HodgkinHuxley::default(), &eq.hh),
        residual(&FitzHughNagumo::default(), &eq.fhn),
        residual(&crate::models::ml::MorrisLecar::default(), &eq.ml),
    ]
}

// ------------------------------------------------------- simulation checks

fn izh_setup() -> SweepSetup {
    SweepSetup {
        method: Method::Rk4,
        dt: 0.01,
        window: 1000.0,
    }
}

pub fn izh_fi_counts() -> Result<Vec<usize>> {
    let pts = fi_sweep(
        &Izhikevich::default(),
        &state(&[-65.0, -13.0]),
        &IZH_FI_AMPS,
        &izh_setup(),
        &izh_detector(),
    )?;
    Ok(pts.iter().map(|p| p.count).collect())
}

pub fn izh_span() -> Result<FrequencyReport> {
    frequency_sensitivity(
        &Izhikevich::default(),
        &state(&[-65.0, -13.0]),
        &IZH_SPAN_AMPS,
        &izh_setup(),
        &izh_detector(),
        2,
    )
}

/// Step current I=10 for a second: reset count, spike count, peak recorded v.
pub fn izh_step10() -> Result<(usize, usize, f64)> {
    let cfg = IntegratorConfig::new(Method::Rk4, 0.01, 1000.0);
    let stim = StimulusProtocol::Step {
        amplitude: 10.0,
        onset: 0.0,
    };
    let tr = integrate(&Izhikevich::default(), &state(&[-65.0, -13.0]), &stim, &cfg)?;
    let spikes = detect_spikes(&tr, "v", &izh_detector())?;
    let max_v = tr.samples.iter().map(|s| s[0]).fold(f64::MIN, f64::max);
    Ok((tr.reset_times.len(), spikes.len(), max_v))
}

fn hh_spike_count(amplitude: f64, eq: &EquilibriaFixture) -> Result<usize> {
    let cfg = IntegratorConfig::new(Method::Rk4, 0.01, 1000.0);
    let stim = StimulusProtocol::Step {
        amplitude,
        onset: 0.0,
    };
    let tr = integrate(&HodgkinHuxley::default(), &state(&eq.hh), &stim, &cfg)?;
    Ok(detect_spikes(&tr, "V", &SpikeDetectorConfig::new(0.0, 2.0))?.len())
}

/// Bisects for the smallest constant current that sustains firing
/// (at least 2 spikes over a second).
pub fn hh_rheobase(eq: &EquilibriaFixture) -> Result<f64> {
    let (mut lo, mut hi) = (0.0f64, 20.0f64);
    for _ in 0..24 {
        let mid = 0.5 * (lo + hi);
        if hh_spike_count(mid, eq)? >= 2 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn hh_subthreshold_count(rheobase: f64, eq: &EquilibriaFixture) -> Result<usize> {
    hh_spike_count(0.8 * rheobase, eq)
}

pub fn hh_span(eq: &EquilibriaFixture) -> Result<FrequencyReport> {
    frequency_sensitivity(
        &HodgkinHuxley::default(),
        &state(&eq.hh),
        &HH_SPAN_AMPS,
        &SweepSetup {
            method: Method::Rk4,
            dt: 0.01,
            window: 1000.0,
        },
        &SpikeDetectorConfig::new(0.0, 2.0),
        2,
    )
}

pub fn fhn_span(eq: &EquilibriaFixture) -> Result<FrequencyReport> {
    frequency_sensitivity(
        &FitzHughNagumo::default(),
        &state(&eq.fhn),
        &FHN_SPAN_AMPS,
        &SweepSetup {
            method: Method::Rk4,
            dt: 0.05,
            window: 1000.0,
        },
        &dimensionless_detector(),
        2,
    )
}

/// One-way driven mismatched pair: lock quality after a 500-unit transient.
pub fn driven_pair_report() -> Result<SyncReport> {
    let cell = |eps| SlowFastParams {
        eps,
        eta: 0.1,
        g: RecoveryKind::Linear,
    };
    let pair = FhnDrivenPair::new(cell(DRIVEN_EPS[0]), cell(DRIVEN_EPS[1]), DRIVEN_D)?;
    let cfg = IntegratorConfig::new(Method::Rk4, 0.02, 2500.0);
    let tr = integrate(&pair, &state(&[1.0, 0.0, -1.0, 0.0]), &StimulusProtocol::zero(), &cfg)?;
    sync_report(&tr, "v_1", "v_2", (500.0, 2500.0), &dimensionless_detector())
}

/// Two identical cells, symmetric diffusive coupling at the pinned
/// attractive gain, distinct starts. Synchronization shows up as the
/// windowed voltage rms collapsing.
pub fn hr_pair_report() -> Result<SyncReport> {
    let net = HrNetwork::new(HrNetworkParams {
        cell: HRParams::default(),
        g_s: HR_SYNC_GAIN,
        sigma: HrGate::Uniform,
        kernel: HrKernel::Diffusive,
        coupling: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
    })?;
    let cfg = IntegratorConfig::new(Method::Rk4, 0.01, 2000.0);
    let s0 = state(&[-1.6, -10.0, 0.0, -1.1, -9.0, 0.2]);
    let stim = StimulusProtocol::Constant { amplitude: 2.0 };
    let tr = integrate(&net, &s0, &stim, &cfg)?;
    sync_report(&tr, "v_1", "v_2", (1500.0, 2000.0), &dimensionless_detector())
}

pub struct AccelerationMeasurement {
    pub isolated: [f64; 2],
    pub coupled: [f64; 2],
    pub report: AccelerationReport,
}

/// Runs both cells alone and coupled, measures steady periods past the
/// transient, and compares. The coupled start is pinned along with the
/// gains: the mismatched cell sits near a weakly repelling rest state, so a
/// poorly chosen start can fall asleep instead of oscillating.
pub fn acceleration_measurement() -> Result<AccelerationMeasurement> {
    let det = dimensionless_detector();
    let window_start = 1000.0;
    let cell = |eps| FhnCell {
        params: SlowFastParams {
            eps,
            eta: ACCEL_ETA,
            g: RecoveryKind::Linear,
        },
    };

    let mut isolated = [0.0; 2];
    for (slot, eps) in isolated.iter_mut().zip(ACCEL_EPS) {
        let cfg = IntegratorConfig::new(Method::Rk4, 0.02, 4000.0);
        let tr = integrate(&cell(eps), &state(&[1.5, 0.0]), &StimulusProtocol::zero(), &cfg)?;
        let train = windowed_train(&tr, "v", &det, window_start)?;
        *slot = require_period(
            estimate_period(&train, 0),
            &format!("isolated cell eps={eps}"),
        )?;
    }

    let pair = build_pair_mixed(
        Arc::new(cell(ACCEL_EPS[0])),
        Arc::new(cell(ACCEL_EPS[1])),
        ACCEL_GAIN,
        PairKernel::Diffusive,
    )?;
    let cfg = IntegratorConfig::new(Method::Rk4, 0.02, 4000.0);
    let tr = integrate(
        &pair,
        &state(&[1.5, 0.0, -1.5, 0.0]),
        &StimulusProtocol::zero(),
        &cfg,
    )?;
    let mut coupled = [0.0; 2];
    for (slot, ch) in coupled.iter_mut().zip(["v_1", "v_2"]) {
        let train = windowed_train(&tr, ch, &det, window_start)?;
        *slot = require_period(estimate_period(&train, 0), &format!("coupled channel {ch}"))?;
    }

    let report = acceleration_ratio(&isolated, coupled[0])?;
    Ok(AccelerationMeasurement {
        isolated,
        coupled,
        report,
    })
}

/// Runs the same scenario twice and renders both to CSV.
pub fn determinism_csvs() -> Result<(String, String)> {
    let run = || -> Result<String> {
        let cfg = IntegratorConfig {
            method: Method::Rk4,
            dt: 0.01,
            t_end: 400.0,
            record_stride: 5,
        };
        let stim = StimulusProtocol::Pulse {
            amplitude: 10.0,
            onset: 50.0,
            duration: 200.0,
        };
        let tr = integrate(&Izhikevich::default(), &state(&[-65.0, -13.0]), &stim, &cfg)?;
        Ok(trajectory_to_csv(&tr))
    };
    Ok((run()?, run()?))
}

// ------------------------------------------------------------------ regen

/// Re-measures every pinned quantity from scratch. Slow; used by the
/// fixture regeneration path only.
pub fn measure_all() -> Result<DerivedFixtures> {
    let equilibria = EquilibriaFixture {
        hh: find_equilibrium(&HodgkinHuxley::default(), &[-65.0, 0.05, 0.6, 0.32], 0.0)?,
        ml: find_equilibrium(
            &crate::models::ml::MorrisLecar::default(),
            &[-60.0, 0.015],
            0.0,
        )?,
        fhn: find_equilibrium(&FitzHughNagumo::default(), &[-1.2, -0.6], 0.0)?,
    };

    let (rk4_slope, euler_slope) = convergence_slopes()?;

    let fi_counts = izh_fi_counts()?;
    let (step10_resets, step10_spikes, _max_v) = izh_step10()?;
    let izh_span_report = izh_span()?;

    let rheobase = hh_rheobase(&equilibria)?;
    let subthreshold_count = hh_subthreshold_count(rheobase, &equilibria)?;
    let hh_span_report = hh_span(&equilibria)?;
    let fhn_span_report = fhn_span(&equilibria)?;

    let driven = driven_pair_report()?;
    let hr = hr_pair_report()?;
    let accel = acceleration_measurement()?;

    let rates = |rep: &FrequencyReport| -> Result<Vec<f64>> {
        rep.points
            .iter()
            .map(|p| {
                p.rate.ok_or_else(|| {
                    Error::InvalidInput(format!("amplitude {} not periodic", p.amplitude))
                })
            })
            .collect()
    };

    Ok(DerivedFixtures {
        convergence: ConvergenceFixture {
            rk4_slope,
            euler_slope,
        },
        equilibria,
        izhikevich: IzhikevichFixture {
            fi_counts,
            step10_resets,
            step10_spikes,
            span_rates: rates(&izh_span_report)?,
            span: izh_span_report.span,
        },
        hh: HhFixture {
            rheobase,
            subthreshold_count,
            span_rates: rates(&hh_span_report)?,
            span: hh_span_report.span,
        },
        fhn: FhnFixture {
            span_rates: rates(&fhn_span_report)?,
            span: fhn_span_report.span,
        },
        driven_pair: DrivenPairFixture {
            spikes: [driven.spikes_a, driven.spikes_b],
            offset_mean: driven.offset_mean.unwrap_or(f64::NAN),
            jitter: driven.jitter.unwrap_or(f64::NAN),
        },
        hr_sync: HrSyncFixture { rms: hr.rms },
        acceleration: AccelerationFixture {
            isolated: accel.isolated,
            coupled: accel.coupled,
            ratio: accel.report.ratio,
        },
    })
}
