//! Small closed-form and root-finding references the verification suite
//! measures against.

use crate::error::{Error, Result};
use crate::system::ModelSystem;

/// y' = -y. The solution e^(-t) is known exactly, which makes this the
/// reference problem for convergence-order measurements.
pub struct LinearDecay;

impl ModelSystem for LinearDecay {
    fn dimension(&self) -> usize {
        1
    }

    fn labels(&self) -> Vec<String> {
        vec!["y".into()]
    }

    fn rhs(&self, _t: f64, s: &[f64], _input: f64, out: &mut [f64]) {
        out[0] = -s[0];
    }
}

/// Solves A x = b in place by Gaussian elimination with partial pivoting.
/// Sized for the tiny Jacobians here (dimension <= 4).
fn solve_linear(a: &mut [Vec<f64>], b: &mut [f64]) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::DivisionByZero("singular Jacobian in root search"));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

fn rhs_at<M: ModelSystem + ?Sized>(m: &M, x: &[f64], input: f64) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    m.rhs(0.0, x, input, &mut out);
    out
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Damped Newton iteration on the model's rhs at fixed input, with a
/// central-difference Jacobian. Converges to the rest state nearest the
/// guess; the caller supplies a guess inside the right basin.
pub fn find_equilibrium<M: ModelSystem + ?Sized>(
    m: &M,
    guess: &[f64],
    input: f64,
) -> Result<Vec<f64>> {
    let n = m.dimension();
    if guess.len() != n {
        return Err(Error::DimensionMismatch {
            want: n,
            got: guess.len(),
        });
    }
    let mut x = guess.to_vec();
    let mut f = rhs_at(m, &x, input);

    for _ in 0..200 {
        if max_abs(&f) < 1e-13 {
            return Ok(x);
        }
        let mut jac = vec![vec![0.0; n]; n];
        for j in 0..n {
            let h = 1e-6 * x[j].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let fp = rhs_at(m, &xp, input);
            let fm = rhs_at(m, &xm, input);
            for i in 0..n {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let mut rhs_neg: Vec<f64> = f.iter().map(|v| -v).collect();
        let step = solve_linear(&mut jac, &mut rhs_neg)?;

        // backtrack until the residual actually shrinks
        let norm0 = max_abs(&f);
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(&step).map(|(xi, s)| xi + scale * s).collect();
            let ft = rhs_at(m, &trial, input);
            if trial.iter().all(|v| v.is_finite()) && max_abs(&ft) < norm0 {
                x = trial;
                f = ft;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if max_abs(&f) < 1e-9 {
        Ok(x)
    } else {
        Err(Error::InvalidInput(format!(
            "root search stalled with residual {:.3e}",
            max_abs(&f)
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::fhn::FitzHughNagumo;
    use crate::models::hh::HodgkinHuxley;
    use crate::models::ml::MorrisLecar;

    #[test]
    fn linear_system_solved_exactly() {
        let mut a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let mut b = vec![5.0, 10.0];
        let x = solve_linear(&mut a, &mut b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let mut a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let mut b = vec![1.0, 2.0];
        assert!(solve_linear(&mut a, &mut b).is_err());
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let mut a = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let mut b = vec![2.0, 3.0];
        let x = solve_linear(&mut a, &mut b).unwrap();
        assert_eq!(x, vec![3.0, 2.0]);
    }

    #[test]
    fn finds_fhn_rest_state() {
        let m = FitzHughNagumo::default();
        let eq = find_equilibrium(&m, &[-1.0, -0.5], 0.0).unwrap();
        let f = rhs_at(&m, &eq, 0.0);
        assert!(max_abs(&f) < 1e-12);
        assert!((eq[0] - -1.19941).abs() < 1e-4);
    }

    #[test]
    fn finds_hh_and_ml_rest_states() {
        let hh = HodgkinHuxley::default();
        let eq = find_equilibrium(&hh, &[-65.0, 0.05, 0.6, 0.32], 0.0).unwrap();
        assert!(max_abs(&rhs_at(&hh, &eq, 0.0)) < 1e-10);
        assert!((eq[0] - -65.0).abs() < 0.5);

        let ml = MorrisLecar::default();
        let eq = find_equilibrium(&ml, &[-60.0, 0.015], 0.0).unwrap();
        assert!(max_abs(&rhs_at(&ml, &eq, 0.0)) < 1e-12);
        assert!((eq[0] - -60.855).abs() < 0.01);
    }
}
