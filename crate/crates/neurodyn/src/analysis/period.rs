use crate::analysis::spikes::SpikeTrain;

/// Verdict of the period estimator. Irregular trains (bursting, dying
/// oscillations, too few spikes) are NotPeriodic rather than an error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Periodicity {
    Periodic(f64),
    NotPeriodic,
}

impl Periodicity {
    pub fn period(&self) -> Option<f64> {
        match self {
            Periodicity::Periodic(p) => Some(*p),
            Periodicity::NotPeriodic => None,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Periodicity::Periodic(_))
    }
}

/// Interval variability gate: trains whose inter-spike intervals vary by
/// more than this coefficient of variation don't get a period.
pub const CV_MAX: f64 = 0.05;

/// Mean inter-spike interval after dropping the first `discard_transient`
/// spikes. Needs at least 3 remaining intervals and a coefficient of
/// variation of at most CV_MAX.
pub fn estimate_period(st: &SpikeTrain, discard_transient: usize) -> Periodicity {
    let kept: &[f64] = st.times.get(discard_transient..).unwrap_or(&[]);
    if kept.len() < 4 {
        return Periodicity::NotPeriodic;
    }
    let isis: Vec<f64> = kept.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = isis.iter().sum::<f64>() / isis.len() as f64;
    let var = isis.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / isis.len() as f64;
    if var.sqrt() / mean > CV_MAX {
        return Periodicity::NotPeriodic;
    }
    Periodicity::Periodic(mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::spikes::SpikeDetectorConfig;

    fn train(times: &[f64]) -> SpikeTrain {
        SpikeTrain {
            times: times.to_vec(),
            channel: "v".into(),
            config: SpikeDetectorConfig::new(0.0, 0.0),
        }
    }

    #[test]
    fn regular_train_returns_mean_interval() {
        assert_eq!(
            estimate_period(&train(&[10.0, 20.0, 30.0, 40.0]), 0),
            Periodicity::Periodic(10.0)
        );
    }

    #[test]
    fn discard_removes_startup_transient() {
        let st = train(&[50.0, 100.0, 200.0, 300.0, 400.0]);
        assert_eq!(estimate_period(&st, 1), Periodicity::Periodic(100.0));
        // keeping the early spike blows the variability gate
        assert_eq!(estimate_period(&st, 0), Periodicity::NotPeriodic);
    }

    #[test]
    fn short_or_empty_trains_are_not_periodic() {
        assert_eq!(estimate_period(&train(&[]), 0), Periodicity::NotPeriodic);
        assert_eq!(
            estimate_period(&train(&[1.0, 2.0, 3.0]), 0),
            Periodicity::NotPeriodic
        );
        // discard beyond the train length is fine
        assert_eq!(estimate_period(&train(&[1.0, 2.0]), 10), Periodicity::NotPeriodic);
    }

    #[test]
    fn irregular_intervals_fail_the_cv_gate() {
        let st = train(&[0.0, 10.0, 30.0, 40.0, 60.0]);
        assert_eq!(estimate_period(&st, 0), Periodicity::NotPeriodic);
    }

    #[test]
    fn scaling_times_scales_the_period() {
        let base = [3.0, 13.0, 23.0, 33.0, 43.0];
        let scaled: Vec<f64> = base.iter().map(|t| t * 2.5).collect();
        let p0 = estimate_period(&train(&base), 0).period().unwrap();
        let p1 = estimate_period(&train(&scaled), 0).period().unwrap();
        assert!((p1 - 2.5 * p0).abs() < 1e-12);
    }
}
