use crate::error::{Error, Result};
use crate::state::StateVector;

/// Contract every dynamical model implements.
///
/// `rhs` must be a pure function of its arguments: identical inputs produce
/// bitwise-identical derivatives, with no interior mutation or global state.
/// That is what makes whole-trajectory bitwise reproducibility possible.
pub trait ModelSystem: Send + Sync {
    /// Number of state variables.
    fn dimension(&self) -> usize;

    /// Per-variable channel names, in state order.
    fn labels(&self) -> Vec<String>;

    /// Writes d(state)/dt into `out`. `input` is the stimulus value already
    /// evaluated at the appropriate time; autonomous models ignore it.
    ///
    /// Both slices have length `dimension()`; callers guarantee that.
    fn rhs(&self, t: f64, state: &[f64], input: f64, out: &mut [f64]);

    /// Discrete reset map, applied by the integrator after a full step.
    /// Returns true when the guard fired and `state` was rewritten.
    /// The default is the identity (no reset rule).
    fn reset(&self, _state: &mut [f64]) -> bool {
        false
    }

    /// Post-step projection for variables with hard ranges (gating variables
    /// are clamped to [0, 1]). Default: nothing to clamp.
    fn clamp(&self, _state: &mut [f64]) {}

    /// Index of the primary voltage-like variable, used by generic coupling
    /// builders and default spike detection.
    fn voltage_index(&self) -> usize {
        0
    }

    /// Allocating convenience wrapper around `rhs` with input validation.
    fn derivative(&self, t: f64, state: &StateVector, input: f64) -> Result<StateVector>
    where
        Self: Sized,
    {
        validate_state(state, self)?;
        let mut out = vec![0.0; self.dimension()];
        self.rhs(t, state, input, &mut out);
        Ok(StateVector::raw(out))
    }
}

/// Checks that a state vector is usable with the given model: the length
/// matches the model dimension and every entry is finite.
pub fn validate_state(s: &StateVector, m: &(impl ModelSystem + ?Sized)) -> Result<()> {
    if s.len() != m.dimension() {
        return Err(Error::DimensionMismatch {
            want: m.dimension(),
            got: s.len(),
        });
    }
    for (index, v) in s.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteValue { index });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::hh::HodgkinHuxley;

    #[test]
    fn validate_state_checks_dimension_and_finiteness() {
        let hh = HodgkinHuxley::default();
        let ok = StateVector::raw(vec![-65.0, 0.05, 0.6, 0.32]);
        assert!(validate_state(&ok, &hh).is_ok());

        let short = StateVector::raw(vec![-65.0, 0.05]);
        match validate_state(&short, &hh).unwrap_err() {
            Error::DimensionMismatch { want, got } => {
                assert_eq!((want, got), (4, 2));
            }
            other => panic!("unexpected error {other:?}"),
        }

        let bad = StateVector::raw(vec![0.0, f64::NAN]);
        let fhn = crate::models::fhn::FitzHughNagumo::default();
        match validate_state(&bad, &fhn).unwrap_err() {
            Error::NonFiniteValue { index } => assert_eq!(index, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
