use crate::error::{Error, Result};

/// Fixed-length vector of model state variables.
///
/// The entry order is the owning model's published layout (see the model
/// catalog), so CSV columns and analysis channel names stay stable.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    /// Builds a state vector, rejecting NaN and infinities up front.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { index });
            }
        }
        Ok(Self(values))
    }

    /// Wraps values without the finiteness check. Integrator internals use
    /// this on buffers they police themselves; everything user-facing goes
    /// through [`StateVector::new`].
    pub fn raw(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for StateVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<StateVector> for Vec<f64> {
    fn from(s: StateVector) -> Vec<f64> {
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        let err = StateVector::new(vec![0.0, f64::NAN]).unwrap_err();
        match err {
            Error::NonFiniteValue { index } => assert_eq!(index, 1),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(StateVector::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(StateVector::new(vec![-65.0, 0.05, 0.6, 0.32]).is_ok());
    }

    #[test]
    fn raw_skips_the_check() {
        let s = StateVector::raw(vec![f64::NAN]);
        assert_eq!(s.len(), 1);
    }
}
