//! Self-verification: re-runs the pinned experiment battery and compares
//! against the frozen values in fixtures/derived.json. The fast set stays
//! under a couple of seconds; the full set re-measures every simulation.

pub mod experiments;
pub mod oracle;

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::fixtures::DerivedFixtures;

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn of(name: &'static str, result: Result<String>) -> Self {
        match result {
            Ok(detail) => CheckOutcome {
                name,
                passed: true,
                detail,
            },
            Err(e) => CheckOutcome {
                name,
                passed: false,
                detail: e.to_string(),
            },
        }
    }
}

fn mismatch(field: &str, got: impl std::fmt::Debug, want: impl std::fmt::Debug) -> Error {
    Error::InvalidInput(format!("{field}: measured {got:?}, fixture has {want:?}"))
}

fn expect_abs(field: &str, got: f64, want: f64, tol: f64) -> Result<()> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(mismatch(field, got, want))
    }
}

fn expect_rel(field: &str, got: f64, want: f64, tol: f64) -> Result<()> {
    let scale = want.abs().max(1e-12);
    if (got - want).abs() <= tol * scale {
        Ok(())
    } else {
        Err(mismatch(field, got, want))
    }
}

fn expect_each_rel(field: &str, got: &[f64], want: &[f64], tol: f64) -> Result<()> {
    if got.len() != want.len() {
        return Err(mismatch(field, got, want));
    }
    for (g, w) in got.iter().zip(want) {
        expect_rel(field, *g, *w, tol)?;
    }
    Ok(())
}

fn expect_in(field: &str, got: f64, lo: f64, hi: f64) -> Result<()> {
    if got >= lo && got <= hi {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{field}: {got} outside expected band [{lo}, {hi}]"
        )))
    }
}

// --------------------------------------------------------------- the checks

pub fn check_convergence(fx: &DerivedFixtures) -> CheckOutcome {
    CheckOutcome::of("convergence-order", (|| {
        let (rk4, euler) = experiments::convergence_slopes()?;
        expect_in("rk4 slope", rk4, 3.7, 4.3)?;
        expect_in("euler slope", euler, 0.8, 1.2)?;
        expect_abs("convergence.rk4_slope", rk4, fx.convergence.rk4_slope, 0.1)?;
        expect_abs("convergence.euler_slope", euler, fx.convergence.euler_slope, 0.1)?;
        Ok(format!("rk4 slope {rk4:.3}, euler slope {euler:.3}"))
    })())
}

pub fn check_reset_exactness() -> CheckOutcome {
    CheckOutcome::of("reset-exactness", (|| {
        experiments::reset_exactness(10_000, 0x5eed)?;
        Ok("10000 random straddling states, guard and after-state exact".into())
    })())
}

pub fn check_zero_coupling() -> CheckOutcome {
    CheckOutcome::of("zero-coupling-reduction", (|| {
        experiments::zero_coupling_reduction(1000, 0xc0ffee)?;
        Ok("1000 random states per family, coupled rhs bitwise equals stacked cells".into())
    })())
}

pub fn check_equilibria(fx: &DerivedFixtures) -> CheckOutcome {
    CheckOutcome::of("equilibrium-residuals", (|| {
        let [hh, fhn, ml] = experiments::equilibrium_residuals(&fx.equilibria);
        for (field, r) in [
            ("equilibria.hh", hh),
            ("equilibria.fhn", fhn),
            ("equilibria.ml", ml),
        ] {
            if !(r < 1e-6) {
                return Err(Error::InvalidInput(format!(
                    "{field}: residual {r:.3e} at stored rest state, expected < 1e-6"
                )));
            }
        }
        Ok(format!("max |rhs| at rest: hh {hh:.1e}, fhn {fhn:.1e}, ml {ml:.1e}"))
    })())
}

pub fn check_izhikevich(fx: &DerivedFixtures) -> CheckOutcome {
    CheckOutcome::of("izhikevich-spiking", (|| {
        let counts = experiments::izh_fi_counts()?;
        if counts != fx.izhikevich.fi_counts {
            return Err(mismatch("izhikevich.fi_counts", &counts, &fx.izhikevich.fi_counts));
        }
        if counts[0] != 0 {
            return Err(Error::InvalidInput(format!(
                "silent at zero drive violated: {} spikes",
                counts[0]
            )));
        }
        if counts[2] < 5 {
            return Err(Error::InvalidInput(format!(
                "I=10 over a second should give at least 5 spikes, got {}",
                counts[2]
            )));
        }
        if counts.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput(format!(
                "spike count not monotone in drive: {counts:?}"
            )));
        }
        let (resets, spikes, _) = experiments::izh_step10()?;
        if resets != fx.izhikevich.step10_resets {
            return Err(mismatch("izhikevich.step10_resets", resets, fx.izhikevich.step10_resets));
        }
        if spikes != fx.izhikevich.step10_spikes {
            return Err(mismatch("izhikevich.step10_spikes", spikes, fx.izhikevich.step10_spikes));
        }
        Ok(format!("f-I counts {counts:?}, step response {spikes} spikes / {resets} resets"))
    })())
}

pub fn check_hh_rheobase(fx: &DerivedFixtures) -> CheckOutcome {
    CheckOutcome::of("hh-rheobase", (|| {
        let rheo = experiments::hh_rheobase(&fx.equilibria)?;
        expect_abs("hh.rheobase", rheo, fx.hh.rheobase, 1e-9)?;
        let sub = experiments::hh_subthreshold_count(rheo, &fx.equilibria)?;
        if sub != fx.hh.subthreshold_count {
            return Err(mismatch("hh.subthreshold_count", sub, fx.hh.subthreshold_count));
        }
        if sub >= 2 {
            return Err(Error::InvalidInput(format!(
                "sustained firing below rheobase: {sub} spikes at 80% drive"
            )));
        }
        Ok(format!("rheobase {rheo:.6} uA/cm^2, {sub} spike(s) at 80% of it"))
    })())
}

pub fn check_driven_lock(fx: &DerivedFixtures) -> CheckOutcome {
    CheckOutcome::of("driven-pair-lock", (|| {
        let rep = experiments::driven_pair_report()?;
        if [rep.spikes_a, rep.spikes_b] != fx.driven_pair.spikes {
            return Err(mismatch(
                "driven_pair.spikes",
                [rep.spikes_a, rep.spikes_b],
                fx.driven_pair.spikes,
            ));
        }
        let jitter = rep
            .jitter
            .ok_or_else(|| Error::InvalidInput("driven pair: jitter undefined".into()))?;
        let offset = rep
            .offset_mean
            .ok_or_else(|| Error::InvalidInput("driven pair: offset undefined".into()))?;
        if !rep.locked {
            return Err(Error::InvalidInput(format!(
                "driven pair failed to lock: jitter {jitter:.3e}"
            )));
        }
        expect_abs("driven_pair.jitter", jitter, fx.driven_pair.jitter, 1e-3)?;
        expect_abs("driven_pair.offset_mean", offset, fx.driven_pair.offset_mean, 1e-3)?;
        Ok(format!(
            "locked, offset {offset:.4}, jitter {jitter:.2e} over {} spikes",
            rep.spikes_a
        ))
    })())
}

pub fn check_identical_sync(fx: &DerivedFixtures) -> CheckOutcome {
    CheckOutcome::of("identical-pair-sync", (|| {
        let rep = experiments::hr_pair_report()?;
        if !(rep.rms < 1e-3) {
            return Err(Error::InvalidInput(format!(
                "identical pair did not synchronize: windowed rms {:.3e}",
                rep.rms
            )));
        }
        expect_abs("hr_sync.rms", rep.rms, fx.hr_sync.rms, 1e-6)?;
        Ok(format!("windowed voltage rms {:.3e}", rep.rms))
    })())
}

pub fn check_acceleration(fx: &DerivedFixtures) -> CheckOutcome {
    CheckOutcome::of("acceleration", (|| {
        let m = experiments::acceleration_measurement()?;
        if !m.report.accelerated || m.report.ratio > 0.99 {
            return Err(Error::InvalidInput(format!(
                "coupling did not shorten the period: isolated {:?}, coupled {:?}, ratio {:.4}",
                m.isolated, m.coupled, m.report.ratio
            )));
        }
        expect_each_rel("acceleration.isolated", &m.isolated, &fx.acceleration.isolated, 1e-6)?;
        expect_each_rel("acceleration.coupled", &m.coupled, &fx.acceleration.coupled, 1e-6)?;
        expect_abs("acceleration.ratio", m.report.ratio, fx.acceleration.ratio, 1e-3)?;
        Ok(format!(
            "coupled period {:.3} vs fastest isolated {:.3}, ratio {:.4}",
            m.report.coupled_period, m.report.min_isolated, m.report.ratio
        ))
    })())
}

pub fn check_determinism() -> CheckOutcome {
    CheckOutcome::of("determinism", (|| {
        let (a, b) = experiments::determinism_csvs()?;
        if a != b {
            return Err(Error::InvalidInput(
                "identical runs rendered different CSV bytes".into(),
            ));
        }
        Ok(format!("repeated run byte-identical ({} bytes)", a.len()))
    })())
}

pub fn check_spans(fx: &DerivedFixtures) -> CheckOutcome {
    CheckOutcome::of("frequency-spans", (|| {
        let izh = experiments::izh_span()?;
        let hh = experiments::hh_span(&fx.equilibria)?;
        let fhn = experiments::fhn_span(&fx.equilibria)?;
        for (field, rep, rates, span) in [
            ("izhikevich", &izh, &fx.izhikevich.span_rates, fx.izhikevich.span),
            ("hh", &hh, &fx.hh.span_rates, fx.hh.span),
            ("fhn", &fhn, &fx.fhn.span_rates, fx.fhn.span),
        ] {
            let got: Vec<f64> = rep
                .points
                .iter()
                .map(|p| {
                    p.rate.ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "{field}: amplitude {} lost periodicity",
                            p.amplitude
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            expect_each_rel(&format!("{field}.span_rates"), &got, rates, 1e-6)?;
            expect_rel(&format!("{field}.span"), rep.span, span, 1e-6)?;
        }
        Ok(format!(
            "relative spans: izhikevich {:.3}, hh {:.3}, fhn {:.3}",
            izh.span, hh.span, fhn.span
        ))
    })())
}

// ------------------------------------------------------------------ suites

/// Cheap subset: no simulation longer than experiments::fast_suite_max_steps().
pub fn run_fast() -> Result<Vec<CheckOutcome>> {
    let fx = DerivedFixtures::load()?;
    Ok(vec![
        check_convergence(&fx),
        check_reset_exactness(),
        check_zero_coupling(),
        check_equilibria(&fx),
    ])
}

pub fn run_full() -> Result<Vec<CheckOutcome>> {
    let fx = DerivedFixtures::load()?;
    let mut out = vec![
        check_convergence(&fx),
        check_reset_exactness(),
        check_zero_coupling(),
        check_equilibria(&fx),
        check_izhikevich(&fx),
        check_hh_rheobase(&fx),
        check_driven_lock(&fx),
        check_identical_sync(&fx),
        check_acceleration(&fx),
        check_determinism(),
    ];
    out.push(check_spans(&fx));
    Ok(out)
}

/// Re-measures everything and rewrites the fixture source file. The embedded
/// copy only picks the new values up on the next build.
pub fn regenerate_fixtures() -> Result<PathBuf> {
    let fresh = experiments::measure_all()?;
    fresh.save_to_source()?;
    Ok(DerivedFixtures::source_path())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_checks_pass_against_embedded_fixtures() {
        for outcome in run_fast().unwrap() {
            assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
        }
    }

    #[test]
    fn tampered_fixture_fails_by_name() {
        let mut fx = DerivedFixtures::load().unwrap();
        fx.convergence.rk4_slope += 0.5;
        let outcome = check_convergence(&fx);
        assert!(!outcome.passed);
        assert!(
            outcome.detail.contains("convergence.rk4_slope"),
            "failure should name the stale field, got: {}",
            outcome.detail
        );

        let mut fx = DerivedFixtures::load().unwrap();
        fx.equilibria.fhn[0] += 0.05;
        let outcome = check_equilibria(&fx);
        assert!(!outcome.passed);
        assert!(outcome.detail.contains("equilibria.fhn"), "{}", outcome.detail);
    }

    #[test]
    fn fast_suite_stays_small() {
        assert!(experiments::fast_suite_max_steps() <= 2000);
    }
}
