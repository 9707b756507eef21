//! Acceptance battery: one test per headline behavior, each asserting its
//! stated tolerance and runtime budget. The pinned experiment definitions
//! and the frozen expected values live in the library's checks module, so
//! `neurodyn verify --full` exercises exactly the same code.

use std::time::{Duration, Instant};

use neurodyn::checks::experiments;
use neurodyn::fixtures::DerivedFixtures;

fn timed<T>(budget: Duration, what: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    assert!(
        took <= budget,
        "{what} took {took:.2?}, over its {budget:.2?} budget"
    );
    out
}

fn fixtures() -> DerivedFixtures {
    DerivedFixtures::load().expect("embedded fixture data must parse")
}

#[test]
fn criterion_01_integrator_convergence_orders() {
    let (rk4, euler) = timed(Duration::from_secs(1), "convergence measurement", || {
        experiments::convergence_slopes().unwrap()
    });
    assert!(
        (rk4 - 4.0).abs() <= 0.3,
        "rk4 error slope {rk4:.4} outside 4.0 +/- 0.3"
    );
    assert!(
        (euler - 1.0).abs() <= 0.2,
        "euler error slope {euler:.4} outside 1.0 +/- 0.2"
    );
    println!("PASS convergence orders: rk4 slope {rk4:.4}, euler slope {euler:.4}");
}

#[test]
fn criterion_02_reset_map_is_exact() {
    experiments::reset_exactness(10_000, 0x5eed).unwrap();
    println!("PASS reset exactness: 10000 random straddling states, zero tolerance");
}

#[test]
fn criterion_03_zero_coupling_reduces_bitwise() {
    experiments::zero_coupling_reduction(1_000, 0xc0ffee).unwrap();
    println!("PASS zero-coupling reduction: 1000 random states per family, bitwise");
}

#[test]
fn criterion_04_rest_states_are_equilibria() {
    let fx = fixtures();
    let [hh, fhn, ml] = timed(Duration::from_secs(1), "residual evaluation", || {
        experiments::equilibrium_residuals(&fx.equilibria)
    });
    for (name, r) in [("hh", hh), ("fhn", fhn), ("ml", ml)] {
        assert!(r < 1e-6, "{name} residual {r:.3e} at pinned rest state");
    }
    println!("PASS equilibrium residuals: hh {hh:.1e}, fhn {fhn:.1e}, ml {ml:.1e}");
}

#[test]
fn criterion_05_izhikevich_spiking_and_fi_curve() {
    let fx = fixtures();
    let counts = timed(Duration::from_secs(5), "f-I sweep", || {
        experiments::izh_fi_counts().unwrap()
    });
    assert_eq!(
        counts, fx.izhikevich.fi_counts,
        "spike counts drifted from their pinned values"
    );
    assert_eq!(counts[0], 0, "cell must stay silent with no drive");
    assert!(
        counts[2] >= 5,
        "I=10 over 1000 ms must give at least 5 spikes, got {}",
        counts[2]
    );
    assert!(
        counts.windows(2).all(|w| w[0] <= w[1]),
        "spike count must be nondecreasing in drive: {counts:?}"
    );
    println!("PASS izhikevich f-I: counts {counts:?} at I = {:?}", experiments::IZH_FI_AMPS);
}

#[test]
fn criterion_06_driven_pair_phase_locks() {
    let rep = timed(Duration::from_secs(30), "driven pair run", || {
        experiments::driven_pair_report().unwrap()
    });
    let jitter = rep.jitter.expect("enough spikes for a jitter estimate");
    assert!(rep.locked, "pair not locked, jitter {jitter:.3e}");
    assert!(jitter < 1.0, "jitter {jitter:.3e} at or over the lock tolerance");
    println!(
        "PASS driven pair lock: jitter {jitter:.2e}, offset {:.4}, {} / {} spikes",
        rep.offset_mean.unwrap(),
        rep.spikes_a,
        rep.spikes_b
    );
}

#[test]
fn criterion_07_identical_pair_synchronizes() {
    let rep = timed(Duration::from_secs(60), "identical pair run", || {
        experiments::hr_pair_report().unwrap()
    });
    assert!(
        rep.rms < 1e-3,
        "voltage rms {:.3e} after the transient window, expected < 1e-3",
        rep.rms
    );
    println!("PASS identical pair sync: windowed rms {:.3e}", rep.rms);
}

#[test]
fn criterion_08_coupling_accelerates_the_pinned_pair() {
    let m = timed(Duration::from_secs(120), "acceleration runs", || {
        experiments::acceleration_measurement().unwrap()
    });
    assert!(
        m.report.accelerated && m.report.ratio <= 0.99,
        "ACCELERATION NOT OBSERVED: isolated periods {:?}, coupled periods {:?}, \
         ratio {:.4} (need <= 0.99)",
        m.isolated,
        m.coupled,
        m.report.ratio
    );
    println!(
        "PASS acceleration: isolated {:?}, coupled {:.3}, ratio {:.4}",
        m.isolated, m.report.coupled_period, m.report.ratio
    );
}

#[test]
fn criterion_09_reruns_are_byte_identical() {
    let (a, b) = experiments::determinism_csvs().unwrap();
    assert_eq!(a, b, "two identical runs rendered different CSV bytes");
    println!("PASS determinism: {} CSV bytes byte-identical across reruns", a.len());
}

#[test]
fn criterion_10_frequency_spans_complete() {
    let fx = fixtures();
    let (hh, fhn) = timed(Duration::from_secs(120), "span sweeps", || {
        (
            experiments::hh_span(&fx.equilibria).unwrap(),
            experiments::fhn_span(&fx.equilibria).unwrap(),
        )
    });
    for (name, rep) in [("hh", &hh), ("fhn", &fhn)] {
        for p in &rep.points {
            assert!(
                p.rate.is_some(),
                "{name}: no periodic verdict at amplitude {}",
                p.amplitude
            );
        }
        assert!(rep.span.is_finite() && rep.span >= 0.0);
    }
    // the comparison itself is reported, not asserted
    println!(
        "PASS frequency spans: hh {:.4} over {:?}, fhn {:.4} over {:?} \
         (hh spans {:.1}x the fhn span)",
        hh.span,
        experiments::HH_SPAN_AMPS,
        fhn.span,
        experiments::FHN_SPAN_AMPS,
        hh.span / fhn.span
    );
}
