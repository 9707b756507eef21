use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct AccelerationReport {
    pub min_isolated: f64,
    pub coupled_period: f64,
    /// coupled period / fastest isolated period.
    pub ratio: f64,
    /// True only when the coupled rhythm is strictly faster than every
    /// isolated one.
    pub accelerated: bool,
}

/// Compares a coupled system's period against the periods its cells show in
/// isolation. "Accelerated" demands the coupled period beat the *fastest*
/// isolated cell, not just one of them.
pub fn acceleration_ratio(
    isolated_periods: &[f64],
    coupled_period: f64,
) -> Result<AccelerationReport> {
    if isolated_periods.is_empty() {
        return Err(Error::InvalidInput("no isolated periods given".into()));
    }
    for &p in isolated_periods.iter().chain(std::iter::once(&coupled_period)) {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidInput(format!(
                "periods must be positive and finite, got {p}"
            )));
        }
    }
    let min_isolated = isolated_periods.iter().cloned().fold(f64::MAX, f64::min);
    Ok(AccelerationReport {
        min_isolated,
        coupled_period,
        ratio: coupled_period / min_isolated,
        accelerated: coupled_period < min_isolated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn faster_than_both_is_accelerated() {
        let r = acceleration_ratio(&[10.0, 12.0], 8.0).unwrap();
        assert!((r.ratio - 0.8).abs() < 1e-15);
        assert!(r.accelerated);
    }

    #[test]
    fn faster_than_one_cell_only_is_not() {
        let r = acceleration_ratio(&[10.0, 12.0], 11.0).unwrap();
        assert!((r.ratio - 1.1).abs() < 1e-15);
        assert!(!r.accelerated);
    }

    #[test]
    fn equal_period_is_not_accelerated() {
        let r = acceleration_ratio(&[10.0], 10.0).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert!(!r.accelerated);
    }

    #[test]
    fn verdict_survives_rescaling() {
        let a = acceleration_ratio(&[45.4, 35.7], 26.4).unwrap();
        let b = acceleration_ratio(&[454.0, 357.0], 264.0).unwrap();
        assert!(a.accelerated && b.accelerated);
        assert!((a.ratio - b.ratio).abs() < 1e-12);
    }

    #[test]
    fn non_positive_periods_rejected() {
        assert!(acceleration_ratio(&[], 5.0).is_err());
        assert!(acceleration_ratio(&[0.0, 10.0], 5.0).is_err());
        assert!(acceleration_ratio(&[10.0], -1.0).is_err());
        assert!(acceleration_ratio(&[10.0], f64::NAN).is_err());
    }
}
