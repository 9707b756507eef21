use crate::error::{Error, Result};
use crate::state::StateVector;
use crate::stimulus::StimulusProtocol;
use crate::system::{validate_state, ModelSystem};

/// Any state component beyond this magnitude counts as divergence. Far above
/// every trajectory scale the models here can produce.
const DIVERGENCE_BOUND: f64 = 1e9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Euler,
    Rk4,
}

#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Step size in the model's time unit (ms for the conductance models).
    pub dt: f64,
    pub t_end: f64,
    /// Store every k-th step. 1 keeps everything.
    #[serde(default = "default_stride")]
    pub record_stride: usize,
}

fn default_stride() -> usize {
    1
}

impl IntegratorConfig {
    pub fn new(method: Method, dt: f64, t_end: f64) -> Self {
        Self {
            method,
            dt,
            t_end,
            record_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "dt must be positive and finite, got {}",
                self.dt
            )));
        }
        if !(self.t_end >= self.dt) || !self.t_end.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "t_end must be at least one step (dt = {}), got {}",
                self.dt, self.t_end
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidConfig("record_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// Uniformly sampled run. Sample i sits at step i * stride of the underlying
/// grid, so its time is (i * stride) * dt; computing it that way (instead of
/// i * dt_effective) keeps times bitwise identical to a stride-1 run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub record_stride: usize,
    /// dt * record_stride, the spacing between stored samples.
    pub dt_effective: f64,
    pub labels: Vec<String>,
    pub samples: Vec<StateVector>,
    /// Times at which a reset map fired (end-of-step times).
    pub reset_times: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + ((i * self.record_stride) as f64) * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub fn channel_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// One column as a plain vector, by label.
    pub fn channel(&self, label: &str) -> Result<Vec<f64>> {
        let idx = self
            .channel_index(label)
            .ok_or_else(|| Error::UnknownChannel(label.to_string()))?;
        Ok(self.column(idx))
    }

    pub fn column(&self, idx: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s[idx]).collect()
    }

    pub fn last_state(&self) -> Option<&StateVector> {
        self.samples.last()
    }
}

/// Advances the model from s0 to t_end on a fixed grid. After every step the
/// state is clamped, checked against the divergence bound, recorded if the
/// step index is a stride multiple (pre-reset value), and finally passed to
/// the reset map, so a reset affects subsequent steps only. Euler samples the
/// stimulus at the step's start time; RK4 at its stage times.
pub fn integrate<M: ModelSystem + ?Sized>(
    m: &M,
    s0: &StateVector,
    stim: &StimulusProtocol,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    stim.validate()?;
    validate_state(s0, m)?;

    let dim = m.dimension();
    let dt = cfg.dt;
    let stride = cfg.record_stride;
    // epsilon absorbs representation error in t_end/dt (e.g. 1000/0.01)
    let n_steps = (cfg.t_end / dt + 1e-9).floor() as u64;

    let mut s = s0.as_slice().to_vec();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];

    let mut samples = Vec::with_capacity((n_steps as usize) / stride + 2);
    samples.push(s0.clone());
    let mut reset_times = Vec::new();

    let traj = |samples: Vec<StateVector>, reset_times: Vec<f64>| Trajectory {
        t0: 0.0,
        dt,
        record_stride: stride,
        dt_effective: dt * stride as f64,
        labels: m.labels(),
        samples,
        reset_times,
    };

    for i in 1..=n_steps {
        let t = ((i - 1) as f64) * dt;
        match cfg.method {
            Method::Euler => {
                m.rhs(t, &s, stim.evaluate(t), &mut k1);
                for d in 0..dim {
                    s[d] += dt * k1[d];
                }
            }
            Method::Rk4 => {
                let th = t + 0.5 * dt;
                let te = t + dt;
                let (i0, ih, ie) = (stim.evaluate(t), stim.evaluate(th), stim.evaluate(te));
                m.rhs(t, &s, i0, &mut k1);
                for d in 0..dim {
                    tmp[d] = s[d] + 0.5 * dt * k1[d];
                }
                m.rhs(th, &tmp, ih, &mut k2);
                for d in 0..dim {
                    tmp[d] = s[d] + 0.5 * dt * k2[d];
                }
                m.rhs(th, &tmp, ih, &mut k3);
                for d in 0..dim {
                    tmp[d] = s[d] + dt * k3[d];
                }
                m.rhs(te, &tmp, ie, &mut k4);
                for d in 0..dim {
                    s[d] += dt / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
                }
            }
        }
        m.clamp(&mut s);

        if s.iter().any(|x| !x.is_finite() || x.abs() > DIVERGENCE_BOUND) {
            return Err(Error::Divergence {
                time: i as f64 * dt,
                partial: Box::new(traj(samples, reset_times)),
            });
        }
        if i % stride as u64 == 0 {
            samples.push(StateVector::raw(s.clone()));
        }
        if m.reset(&mut s) {
            reset_times.push(i as f64 * dt);
        }
    }

    Ok(traj(samples, reset_times))
}

/// Empirical order of accuracy: integrates at each dt, measures the final
/// state's Euclidean distance from a reference run at dts.min()/10, and fits
/// log(error) against log(dt). Wants at least three step sizes, each half
/// the previous. A zero error at any dt means the grid can't distinguish the
/// runs and no order is defined.
pub fn convergence_order<M: ModelSystem + ?Sized>(
    m: &M,
    s0: &StateVector,
    stim: &StimulusProtocol,
    method: Method,
    dts: &[f64],
    t_end: f64,
) -> Result<f64> {
    if dts.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 step sizes, got {}",
            dts.len()
        )));
    }
    for pair in dts.windows(2) {
        if !(pair[1] > 0.0) || (pair[1] / pair[0] - 0.5).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "step sizes must halve: {} does not follow {}",
                pair[1], pair[0]
            )));
        }
    }

    let final_state = |dt: f64| -> Result<StateVector> {
        let mut cfg = IntegratorConfig::new(method, dt, t_end);
        // only the endpoint matters; skip intermediate storage
        cfg.record_stride = ((t_end / dt + 1e-9).floor() as usize).max(1);
        let tr = integrate(m, s0, stim, &cfg)?;
        Ok(tr.samples.last().expect("trajectory has samples").clone())
    };

    let reference = final_state(dts[dts.len() - 1] / 10.0)?;
    let mut errors = Vec::with_capacity(dts.len());
    for &dt in dts {
        let end = final_state(dt)?;
        let err: f64 = end
            .iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        errors.push(err);
    }
    if errors.iter().any(|e| *e == 0.0) {
        return Err(Error::DegenerateZeroError);
    }

    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::izhikevich::{Izhikevich, IzhikevichParams};

    struct Still;
    impl ModelSystem for Still {
        fn dimension(&self) -> usize {
            2
        }
        fn labels(&self) -> Vec<String> {
            vec!["a".into(), "b".into()]
        }
        fn rhs(&self, _t: f64, _s: &[f64], _i: f64, out: &mut [f64]) {
            out.fill(0.0);
        }
    }

    struct Decay;
    impl ModelSystem for Decay {
        fn dimension(&self) -> usize {
            1
        }
        fn labels(&self) -> Vec<String> {
            vec!["y".into()]
        }
        fn rhs(&self, _t: f64, s: &[f64], _i: f64, out: &mut [f64]) {
            out[0] = -s[0];
        }
    }

    struct Blowup;
    impl ModelSystem for Blowup {
        fn dimension(&self) -> usize {
            1
        }
        fn labels(&self) -> Vec<String> {
            vec!["y".into()]
        }
        fn rhs(&self, _t: f64, s: &[f64], _i: f64, out: &mut [f64]) {
            out[0] = s[0] * s[0];
        }
    }

    fn state(v: &[f64]) -> StateVector {
        StateVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn zero_rhs_holds_state_constant() {
        let cfg = IntegratorConfig::new(Method::Rk4, 0.1, 2.0);
        let s0 = state(&[1.5, -0.25]);
        let tr = integrate(&Still, &s0, &StimulusProtocol::zero(), &cfg).unwrap();
        assert_eq!(tr.len(), 21);
        for s in &tr.samples {
            assert_eq!(s.as_slice(), s0.as_slice());
        }
    }

    #[test]
    fn rk4_matches_exponential_decay() {
        let cfg = IntegratorConfig::new(Method::Rk4, 0.1, 1.0);
        let tr = integrate(&Decay, &state(&[1.0]), &StimulusProtocol::zero(), &cfg).unwrap();
        let y = tr.last_state().unwrap()[0];
        assert!((y - 0.367_879_4).abs() < 1e-6, "got {y}");
    }

    #[test]
    fn sample_count_matches_grid_formula() {
        for (dt, t_end, stride) in [(0.1, 1.0, 1), (0.01, 1000.0, 7), (0.05, 0.3, 2)] {
            let cfg = IntegratorConfig {
                method: Method::Euler,
                dt,
                t_end,
                record_stride: stride,
            };
            let tr = integrate(&Decay, &state(&[1.0]), &StimulusProtocol::zero(), &cfg).unwrap();
            let expect = (t_end / (dt * stride as f64) + 1e-9).floor() as usize + 1;
            assert_eq!(tr.len(), expect, "dt={dt} t_end={t_end} stride={stride}");
            assert!((tr.time(tr.len() - 1) - t_end).abs() < dt * stride as f64);
        }
    }

    #[test]
    fn strided_run_is_a_bitwise_subsequence() {
        let dense = IntegratorConfig::new(Method::Rk4, 0.02, 3.0);
        let mut sparse = dense;
        sparse.record_stride = 5;
        let s0 = state(&[0.8]);
        let a = integrate(&Decay, &s0, &StimulusProtocol::zero(), &dense).unwrap();
        let b = integrate(&Decay, &s0, &StimulusProtocol::zero(), &sparse).unwrap();
        for (i, sb) in b.samples.iter().enumerate() {
            assert_eq!(sb.as_slice(), a.samples[5 * i].as_slice());
            assert_eq!(b.time(i).to_bits(), a.time(5 * i).to_bits());
        }
    }

    #[test]
    fn reset_fires_and_caps_recorded_voltage() {
        let m = Izhikevich {
            params: IzhikevichParams::default(),
        };
        let cfg = IntegratorConfig::new(Method::Rk4, 0.01, 200.0);
        let stim = StimulusProtocol::Constant { amplitude: 10.0 };
        let tr = integrate(&m, &state(&[-65.0, -13.0]), &stim, &cfg).unwrap();
        assert!(!tr.reset_times.is_empty());
        // pre-reset samples may overshoot by at most one step of growth
        let v_max = tr.samples.iter().map(|s| s[0]).fold(f64::MIN, f64::max);
        assert!(v_max < m.params.threshold + 5.0, "v_max = {v_max}");
    }

    #[test]
    fn divergence_reports_time_and_partial() {
        let cfg = IntegratorConfig::new(Method::Euler, 0.5, 10.0);
        let err = integrate(&Blowup, &state(&[1.0]), &StimulusProtocol::zero(), &cfg).unwrap_err();
        match err {
            Error::Divergence { time, partial } => {
                assert!(time > 0.0 && time <= 10.0);
                assert!(partial
                    .samples
                    .iter()
                    .all(|s| s.iter().all(|x| x.is_finite())));
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn config_invariants_enforced() {
        let bad_dt = IntegratorConfig::new(Method::Euler, 0.0, 1.0);
        assert!(bad_dt.validate().is_err());
        let short = IntegratorConfig::new(Method::Euler, 0.1, 0.05);
        assert!(short.validate().is_err());
        let mut no_stride = IntegratorConfig::new(Method::Euler, 0.1, 1.0);
        no_stride.record_stride = 0;
        assert!(no_stride.validate().is_err());
    }

    #[test]
    fn convergence_reports_classical_orders() {
        let dts = [0.2, 0.1, 0.05];
        let s0 = state(&[1.0]);
        let zero = StimulusProtocol::zero();
        let rk4 = convergence_order(&Decay, &s0, &zero, Method::Rk4, &dts, 1.0).unwrap();
        assert!((3.7..=4.3).contains(&rk4), "rk4 slope {rk4}");
        let euler = convergence_order(&Decay, &s0, &zero, Method::Euler, &dts, 1.0).unwrap();
        assert!((0.8..=1.2).contains(&euler), "euler slope {euler}");
    }

    #[test]
    fn zero_error_has_no_order() {
        let r = convergence_order(
            &Still,
            &state(&[1.0, 2.0]),
            &StimulusProtocol::zero(),
            Method::Rk4,
            &[0.2, 0.1, 0.05],
            1.0,
        );
        assert!(matches!(r, Err(Error::DegenerateZeroError)));
    }

    #[test]
    fn step_sizes_must_halve() {
        let r = convergence_order(
            &Decay,
            &state(&[1.0]),
            &StimulusProtocol::zero(),
            Method::Rk4,
            &[0.2, 0.15, 0.05],
            1.0,
        );
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }
}
