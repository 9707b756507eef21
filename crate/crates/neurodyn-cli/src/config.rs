//! Scenario files: the TOML schema, its resolution into a runnable workload,
//! and the content digest that ties outputs back to the exact configuration.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Component, Path};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use neurodyn::analysis::SpikeDetectorConfig;
use neurodyn::coupled::{
    build_pair_mixed, parse_matrix, FhnDrivenPair, HrGate, HrKernel, HrNetwork, HrNetworkParams,
    MlSynapticPair, MlSynapticParams, PairKernel,
};
use neurodyn::models::fhn::{FHNParams, FitzHughNagumo};
use neurodyn::models::fhn_cell::{FhnCell, RecoveryKind, SlowFastParams};
use neurodyn::models::hh::{HHParams, HodgkinHuxley};
use neurodyn::models::hr::{HRParams, HindmarshRose};
use neurodyn::models::izhikevich::{Izhikevich, IzhikevichParams};
use neurodyn::models::ml::{MLParams, MorrisLecar};
use neurodyn::models::presets;
use neurodyn::{IntegratorConfig, ModelSystem, StateVector, StimulusProtocol};

const KNOWN_KINDS: &str = "hh, izhikevich, fhn, hr, ml, fhn_cell";

/// Problems found before any simulation starts, split by exit code: unreadable
/// or malformed input versus input that parsed but cannot be run.
#[derive(Debug)]
pub enum ConfigError {
    Parse(String),
    Validation(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(msg) => write!(f, "config parse error: {msg}"),
            ConfigError::Validation(msg) => write!(f, "config validation error: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation(msg.into())
}

/// One scenario file. Field names are the TOML keys; unknown keys are
/// rejected at parse time so typos surface instead of silently defaulting.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Display name; also the output directory name unless `output_dir` says
    /// otherwise.
    pub scenario: String,
    pub output_dir: Option<String>,
    pub model: Option<ModelBlock>,
    pub coupling: Option<CouplingBlock>,
    /// Defaults to no external drive.
    pub stimulus: Option<StimulusProtocol>,
    pub integrator: Option<IntegratorConfig>,
    pub analysis: Option<AnalysisBlock>,
}

/// A single cell, either by preset name or by kind plus explicit parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub preset: Option<String>,
    pub kind: Option<String>,
    /// Parameter overrides for `kind`; every key must name a real parameter.
    pub params: Option<toml::Value>,
    /// Start state. Optional with a preset (the preset's default is used),
    /// required with `kind`.
    pub initial: Option<Vec<f64>>,
}

/// Wraps the model in one of the coupled families. The `initial` fields give
/// the stacked start state and default to repeating the cell's start.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CouplingBlock {
    /// Two cells exchanging voltage current symmetrically; `cell2` makes the
    /// pair heterogeneous and defaults to a copy of the model block.
    Pair {
        kernel: PairKernel,
        gain: f64,
        cell2: Option<ModelBlock>,
        initial: Option<Vec<f64>>,
    },
    /// One-way voltage drive between two slow-fast cells; requires the model
    /// to be `fhn_cell`. `cell2` overrides the follower's constants.
    DrivenFhn {
        d: f64,
        cell2: Option<SlowFastParams>,
        initial: Option<Vec<f64>>,
    },
    /// N cells on a weighted graph; requires the model to be `hr`. Exactly
    /// one of `matrix` (inline rows) or `matrix_file` (whitespace-separated
    /// text) supplies the coupling weights.
    HrNetwork {
        g_s: f64,
        gate: Option<HrGate>,
        kernel: Option<HrKernel>,
        matrix: Option<Vec<Vec<f64>>>,
        matrix_file: Option<String>,
        initial: Option<Vec<f64>>,
    },
    /// Gate-mediated one-way pair; requires the model to be `ml`. The named
    /// fields override the gate constants' defaults.
    MlSynaptic {
        lambda: Option<f64>,
        tau: Option<f64>,
        alpha: Option<f64>,
        gamma: Option<f64>,
        initial: Option<Vec<f64>>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisBlock {
    /// Spike detector for all spike-based analyses. Defaults to the preset's
    /// detector when the model came from a preset.
    pub detector: Option<SpikeDetectorConfig>,
    /// Channel the detector runs on; defaults to the system's voltage channel.
    pub channel: Option<String>,
    pub spikes: Option<SpikesBlock>,
    pub fi: Option<FiBlock>,
    pub frequency: Option<FrequencyBlock>,
    pub sync: Option<SyncBlock>,
    pub acceleration: Option<AccelerationBlock>,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpikesBlock {
    /// Spikes dropped from the front before the period estimate.
    #[serde(default)]
    pub discard_transient: usize,
}

/// Spike count and mean rate per amplitude, one fresh run each.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiBlock {
    pub amplitudes: Vec<f64>,
    /// Run length per amplitude, in the model's time unit.
    pub window: f64,
}

/// Steady firing rate per amplitude plus the relative span across them.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyBlock {
    pub amplitudes: Vec<f64>,
    pub window: f64,
    #[serde(default)]
    pub discard_transient: usize,
}

/// Waveform and spike-time agreement between two channels of the main run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncBlock {
    pub channel_a: String,
    pub channel_b: String,
    /// Analysis window [start, end] inside the trajectory.
    pub window: [f64; 2],
}

/// Self-contained experiment: two slow-fast cells are timed in isolation,
/// then diffusively coupled at each gain, and the coupled period is compared
/// against the faster isolated one. Uses the `[integrator]` and `[stimulus]`
/// blocks; `[model]` and `[coupling]` must be absent.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccelerationBlock {
    pub gains: Vec<f64>,
    /// Timescale constants of the two cells.
    pub eps: [f64; 2],
    /// Shared recovery offset.
    pub eta: f64,
    pub recovery: Option<RecoveryKind>,
    /// Stacked start state [v1, w1, v2, w2]; defaults to opposite knees.
    pub initial: Option<Vec<f64>>,
    /// Spikes before this time are ignored when measuring periods.
    pub window_start: f64,
}

/// A parsed, validated scenario with everything resolved to concrete values.
pub struct ResolvedScenario {
    pub name: String,
    /// Directory name under the output root.
    pub run_dir: String,
    /// Hex sha-256 over the canonical JSON form of the parsed config.
    pub digest: String,
    /// The config itself as JSON, embedded in reports.
    pub config_value: serde_json::Value,
    pub workload: Workload,
}

pub enum Workload {
    Trajectory(Box<TrajectoryRun>),
    Acceleration(Box<AccelerationRun>),
}

pub struct TrajectoryRun {
    pub system: Arc<dyn ModelSystem>,
    pub initial: StateVector,
    pub stimulus: StimulusProtocol,
    pub integrator: IntegratorConfig,
    pub detector: Option<SpikeDetectorConfig>,
    /// Channel spike detection runs on.
    pub channel: String,
    pub discard_transient: usize,
    pub fi: Option<FiBlock>,
    pub frequency: Option<FrequencyBlock>,
    pub sync: Option<SyncBlock>,
}

pub struct AccelerationRun {
    pub cell1: SlowFastParams,
    pub cell2: SlowFastParams,
    pub gains: Vec<f64>,
    pub initial: StateVector,
    pub stimulus: StimulusProtocol,
    pub integrator: IntegratorConfig,
    pub detector: SpikeDetectorConfig,
    pub window_start: f64,
}

/// Reads and fully resolves a scenario file.
pub fn load(path: &Path) -> Result<ResolvedScenario, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
    let cfg: ScenarioConfig = toml::from_str(&text)
        .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
    resolve(cfg)
}

pub fn resolve(cfg: ScenarioConfig) -> Result<ResolvedScenario, ConfigError> {
    if cfg.scenario.trim().is_empty() {
        return Err(invalid("scenario name must not be empty"));
    }
    let run_dir = cfg.output_dir.clone().unwrap_or_else(|| cfg.scenario.clone());
    validate_run_dir(&run_dir)?;

    let (digest, config_value) = digest_config(&cfg)?;

    let stimulus = cfg.stimulus.clone().unwrap_or_else(StimulusProtocol::zero);
    stimulus
        .validate()
        .map_err(|e| invalid(format!("stimulus: {e}")))?;
    let integrator = cfg
        .integrator
        .ok_or_else(|| invalid("an [integrator] block is required"))?;
    integrator
        .validate()
        .map_err(|e| invalid(format!("integrator: {e}")))?;

    let analysis = cfg.analysis.clone().unwrap_or_else(|| AnalysisBlock {
        detector: None,
        channel: None,
        spikes: None,
        fi: None,
        frequency: None,
        sync: None,
        acceleration: None,
    });
    if let Some(det) = &analysis.detector {
        det.validate()
            .map_err(|e| invalid(format!("analysis.detector: {e}")))?;
    }

    let workload = if let Some(accel) = &analysis.acceleration {
        resolve_acceleration(&cfg, &analysis, accel, stimulus, integrator)?
    } else {
        resolve_trajectory(&cfg, &analysis, stimulus, integrator)?
    };

    Ok(ResolvedScenario {
        name: cfg.scenario,
        run_dir,
        digest,
        config_value,
        workload,
    })
}

fn resolve_acceleration(
    cfg: &ScenarioConfig,
    analysis: &AnalysisBlock,
    accel: &AccelerationBlock,
    stimulus: StimulusProtocol,
    integrator: IntegratorConfig,
) -> Result<Workload, ConfigError> {
    if cfg.model.is_some() || cfg.coupling.is_some() {
        return Err(invalid(
            "[analysis.acceleration] defines its own cells; remove the [model] and [coupling] blocks",
        ));
    }
    if analysis.spikes.is_some()
        || analysis.fi.is_some()
        || analysis.frequency.is_some()
        || analysis.sync.is_some()
        || analysis.channel.is_some()
    {
        return Err(invalid(
            "[analysis.acceleration] cannot be combined with other analysis blocks",
        ));
    }

    if accel.gains.is_empty() {
        return Err(invalid("analysis.acceleration.gains must not be empty"));
    }
    for &k in &accel.gains {
        if !k.is_finite() {
            return Err(invalid(format!(
                "analysis.acceleration.gains must be finite, got {k}"
            )));
        }
    }
    let g = accel.recovery.unwrap_or(RecoveryKind::Linear);
    let cell = |eps: f64| SlowFastParams {
        eps,
        eta: accel.eta,
        g,
    };
    let (cell1, cell2) = (cell(accel.eps[0]), cell(accel.eps[1]));
    for (name, c) in [("eps[0]", &cell1), ("eps[1]", &cell2)] {
        c.validate()
            .map_err(|e| invalid(format!("analysis.acceleration ({name}): {e}")))?;
    }
    if !accel.window_start.is_finite()
        || accel.window_start < 0.0
        || accel.window_start >= integrator.t_end
    {
        return Err(invalid(format!(
            "analysis.acceleration.window_start must lie in [0, t_end), got {}",
            accel.window_start
        )));
    }
    let initial = accel
        .initial
        .clone()
        .unwrap_or_else(|| vec![1.5, 0.0, -1.5, 0.0]);
    if initial.len() != 4 {
        return Err(invalid(format!(
            "analysis.acceleration.initial needs 4 values [v1, w1, v2, w2], got {}",
            initial.len()
        )));
    }
    let initial = StateVector::new(initial)
        .map_err(|e| invalid(format!("analysis.acceleration.initial: {e}")))?;
    let detector = analysis
        .detector
        .unwrap_or_else(|| SpikeDetectorConfig::new(1.0, 2.0));

    Ok(Workload::Acceleration(Box::new(AccelerationRun {
        cell1,
        cell2,
        gains: accel.gains.clone(),
        initial,
        stimulus,
        integrator,
        detector,
        window_start: accel.window_start,
    })))
}

fn resolve_trajectory(
    cfg: &ScenarioConfig,
    analysis: &AnalysisBlock,
    stimulus: StimulusProtocol,
    integrator: IntegratorConfig,
) -> Result<Workload, ConfigError> {
    let block = cfg
        .model
        .as_ref()
        .ok_or_else(|| invalid("a [model] block is required"))?;
    let base = resolve_model(block)?;

    let (system, initial) = match &cfg.coupling {
        None => (base.built.arc(), base.initial.clone()),
        Some(coupling) => apply_coupling(&base, coupling)?,
    };

    let initial = StateVector::new(initial).map_err(|e| invalid(format!("initial state: {e}")))?;
    if initial.len() != system.dimension() {
        return Err(invalid(format!(
            "initial state has {} values but the system has {} variables",
            initial.len(),
            system.dimension()
        )));
    }

    let labels = system.labels();
    let detector = analysis.detector.or(base.detector);
    let channel = analysis
        .channel
        .clone()
        .unwrap_or_else(|| labels[system.voltage_index()].clone());
    if !labels.iter().any(|l| l == &channel) {
        return Err(invalid(format!(
            "analysis.channel \"{channel}\" is not one of the system's channels ({})",
            labels.join(", ")
        )));
    }
    let spike_based = analysis.spikes.is_some()
        || analysis.fi.is_some()
        || analysis.frequency.is_some()
        || analysis.sync.is_some();
    if spike_based && detector.is_none() {
        return Err(invalid(
            "analysis.detector is required: the model was built inline, so there is no preset default",
        ));
    }

    if let Some(fi) = &analysis.fi {
        validate_amplitudes("analysis.fi", &fi.amplitudes, 2)?;
        validate_window("analysis.fi.window", fi.window)?;
    }
    if let Some(fr) = &analysis.frequency {
        validate_amplitudes("analysis.frequency", &fr.amplitudes, 1)?;
        validate_window("analysis.frequency.window", fr.window)?;
    }
    if let Some(sync) = &analysis.sync {
        for ch in [&sync.channel_a, &sync.channel_b] {
            if !labels.iter().any(|l| l == ch) {
                return Err(invalid(format!(
                    "analysis.sync channel \"{ch}\" is not one of the system's channels ({})",
                    labels.join(", ")
                )));
            }
        }
        let [w0, w1] = sync.window;
        // the recorded span can stop one partial step short of t_end, so
        // check against the real last sample time
        let span_end = (integrator.t_end / integrator.dt + 1e-9).floor() * integrator.dt;
        if !w0.is_finite() || !w1.is_finite() || !(w0 < w1) {
            return Err(invalid(format!(
                "analysis.sync.window must be an increasing pair, got [{w0}, {w1}]"
            )));
        }
        if w0 < 0.0 || w1 > span_end + 1e-9 {
            return Err(invalid(format!(
                "analysis.sync.window [{w0}, {w1}] reaches outside the run (samples end at {span_end})"
            )));
        }
    }

    Ok(Workload::Trajectory(Box::new(TrajectoryRun {
        system,
        initial,
        stimulus,
        integrator,
        detector,
        channel,
        discard_transient: analysis.spikes.map(|s| s.discard_transient).unwrap_or(0),
        fi: analysis.fi.clone(),
        frequency: analysis.frequency.clone(),
        sync: analysis.sync.clone(),
    })))
}

fn validate_amplitudes(what: &str, amps: &[f64], min_len: usize) -> Result<(), ConfigError> {
    if amps.len() < min_len {
        return Err(invalid(format!(
            "{what}.amplitudes needs at least {min_len} values, got {}",
            amps.len()
        )));
    }
    for w in amps.windows(2) {
        if !(w[0] < w[1]) {
            return Err(invalid(format!(
                "{what}.amplitudes must be strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
    }
    if let Some(bad) = amps.iter().find(|a| !a.is_finite()) {
        return Err(invalid(format!("{what}.amplitudes must be finite, got {bad}")));
    }
    Ok(())
}

fn validate_window(what: &str, window: f64) -> Result<(), ConfigError> {
    if !(window > 0.0) || !window.is_finite() {
        return Err(invalid(format!("{what} must be positive, got {window}")));
    }
    Ok(())
}

/// A concrete single cell with its parameters kept accessible, so coupling
/// families that need a specific kind can check for it.
enum BuiltModel {
    Hh(HHParams),
    Izhikevich(IzhikevichParams),
    Fhn(FHNParams),
    Hr(HRParams),
    Ml(MLParams),
    FhnCell(SlowFastParams),
}

impl BuiltModel {
    fn kind(&self) -> &'static str {
        match self {
            BuiltModel::Hh(_) => "hh",
            BuiltModel::Izhikevich(_) => "izhikevich",
            BuiltModel::Fhn(_) => "fhn",
            BuiltModel::Hr(_) => "hr",
            BuiltModel::Ml(_) => "ml",
            BuiltModel::FhnCell(_) => "fhn_cell",
        }
    }

    fn arc(&self) -> Arc<dyn ModelSystem> {
        match self {
            BuiltModel::Hh(p) => Arc::new(HodgkinHuxley { params: *p }),
            BuiltModel::Izhikevich(p) => Arc::new(Izhikevich { params: *p }),
            BuiltModel::Fhn(p) => Arc::new(FitzHughNagumo { params: *p }),
            BuiltModel::Hr(p) => Arc::new(HindmarshRose { params: *p }),
            BuiltModel::Ml(p) => Arc::new(MorrisLecar { params: *p }),
            BuiltModel::FhnCell(p) => Arc::new(FhnCell { params: *p }),
        }
    }
}

struct ResolvedModel {
    built: BuiltModel,
    initial: Vec<f64>,
    /// Preset-supplied detector defaults, if any.
    detector: Option<SpikeDetectorConfig>,
}

fn resolve_model(block: &ModelBlock) -> Result<ResolvedModel, ConfigError> {
    match (&block.preset, &block.kind) {
        (Some(_), Some(_)) => Err(invalid(
            "model.preset and model.kind are mutually exclusive",
        )),
        (None, None) => Err(invalid(
            "the [model] block needs either preset = \"...\" or kind = \"...\"",
        )),
        (Some(name), None) => {
            if block.params.is_some() {
                return Err(invalid(
                    "model.params cannot be combined with a preset; spell the model out with kind + params",
                ));
            }
            let known = || {
                presets::all()
                    .iter()
                    .map(|p| p.name)
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let preset = presets::find(name)
                .ok_or_else(|| invalid(format!("unknown preset \"{name}\" (known: {})", known())))?;
            if !preset.simulable {
                return Err(invalid(format!(
                    "preset \"{name}\" is a component catalog entry, not a simulable model"
                )));
            }
            let built = match preset.name {
                "hh" => BuiltModel::Hh(HHParams::default()),
                "izhikevich_rs" => BuiltModel::Izhikevich(IzhikevichParams::default()),
                "fhn" => BuiltModel::Fhn(FHNParams::default()),
                "hr" => BuiltModel::Hr(HRParams::default()),
                "ml" => BuiltModel::Ml(MLParams::default()),
                "fhn_cell" => BuiltModel::FhnCell(SlowFastParams::default()),
                other => {
                    return Err(invalid(format!(
                        "preset \"{other}\" has no runnable model registered"
                    )))
                }
            };
            Ok(ResolvedModel {
                built,
                initial: block
                    .initial
                    .clone()
                    .unwrap_or_else(|| preset.initial.to_vec()),
                detector: Some(SpikeDetectorConfig::new(preset.threshold, preset.refractory)),
            })
        }
        (None, Some(kind)) => {
            let built = build_kind(kind, block.params.as_ref())?;
            let initial = block.initial.clone().ok_or_else(|| {
                invalid("model.initial is required when the model is given by kind")
            })?;
            Ok(ResolvedModel {
                built,
                initial,
                detector: None,
            })
        }
    }
}

fn build_kind(kind: &str, params: Option<&toml::Value>) -> Result<BuiltModel, ConfigError> {
    let built = match kind {
        "hh" => BuiltModel::Hh(typed_params(kind, params)?),
        "izhikevich" => BuiltModel::Izhikevich(typed_params(kind, params)?),
        "fhn" => BuiltModel::Fhn(typed_params(kind, params)?),
        "hr" => BuiltModel::Hr(typed_params(kind, params)?),
        "ml" => BuiltModel::Ml(typed_params(kind, params)?),
        "fhn_cell" => BuiltModel::FhnCell(typed_params(kind, params)?),
        other => {
            return Err(invalid(format!(
                "unknown model kind \"{other}\" (known: {KNOWN_KINDS})"
            )))
        }
    };
    let check = match &built {
        BuiltModel::Hh(p) => p.validate(),
        BuiltModel::Izhikevich(p) => p.validate(),
        BuiltModel::Fhn(p) => p.validate(),
        BuiltModel::Hr(p) => p.validate(),
        BuiltModel::Ml(p) => p.validate(),
        BuiltModel::FhnCell(p) => p.validate(),
    };
    check.map_err(|e| invalid(format!("{kind} params: {e}")))?;
    Ok(built)
}

/// Deserializes a parameter table on top of the type's defaults, rejecting
/// keys the type does not have (the `#[serde(default)]` on the parameter
/// structs would otherwise let typos slip through as silent defaults).
fn typed_params<T>(kind: &str, params: Option<&toml::Value>) -> Result<T, ConfigError>
where
    T: Default + Serialize + DeserializeOwned,
{
    let Some(value) = params else {
        return Ok(T::default());
    };
    let table = value
        .as_table()
        .ok_or_else(|| invalid(format!("model.params for {kind} must be a table")))?;
    let known: BTreeSet<String> = toml::Value::try_from(T::default())
        .ok()
        .and_then(|v| v.as_table().map(|t| t.keys().cloned().collect()))
        .unwrap_or_default();
    for key in table.keys() {
        if !known.contains(key) {
            return Err(invalid(format!(
                "unknown {kind} parameter \"{key}\" (known: {})",
                known.iter().cloned().collect::<Vec<_>>().join(", ")
            )));
        }
    }
    value
        .clone()
        .try_into()
        .map_err(|e| invalid(format!("{kind} params: {e}")))
}

fn apply_coupling(
    base: &ResolvedModel,
    coupling: &CouplingBlock,
) -> Result<(Arc<dyn ModelSystem>, Vec<f64>), ConfigError> {
    match coupling {
        CouplingBlock::Pair {
            kernel,
            gain,
            cell2,
            initial,
        } => {
            let second = match cell2 {
                Some(block) => resolve_model(block)?,
                None => ResolvedModel {
                    built: rebuild(&base.built),
                    initial: base.initial.clone(),
                    detector: None,
                },
            };
            let sys = build_pair_mixed(base.built.arc(), second.built.arc(), *gain, *kernel)
                .map_err(|e| invalid(format!("coupling: {e}")))?;
            let start = initial.clone().unwrap_or_else(|| {
                let mut s = base.initial.clone();
                s.extend_from_slice(&second.initial);
                s
            });
            Ok((Arc::new(sys), start))
        }
        CouplingBlock::DrivenFhn { d, cell2, initial } => {
            let BuiltModel::FhnCell(p1) = base.built else {
                return Err(invalid(format!(
                    "driven_fhn coupling requires model kind fhn_cell, got {}",
                    base.built.kind()
                )));
            };
            let p2 = cell2.unwrap_or(p1);
            let sys =
                FhnDrivenPair::new(p1, p2, *d).map_err(|e| invalid(format!("coupling: {e}")))?;
            let start = initial
                .clone()
                .unwrap_or_else(|| [base.initial.clone(), base.initial.clone()].concat());
            Ok((Arc::new(sys), start))
        }
        CouplingBlock::HrNetwork {
            g_s,
            gate,
            kernel,
            matrix,
            matrix_file,
            initial,
        } => {
            let BuiltModel::Hr(cell) = base.built else {
                return Err(invalid(format!(
                    "hr_network coupling requires model kind hr, got {}",
                    base.built.kind()
                )));
            };
            let weights = match (matrix, matrix_file) {
                (Some(_), Some(_)) => {
                    return Err(invalid(
                        "coupling.matrix and coupling.matrix_file are mutually exclusive",
                    ))
                }
                (None, None) => {
                    return Err(invalid(
                        "hr_network coupling needs either matrix or matrix_file",
                    ))
                }
                (Some(rows), None) => rows.clone(),
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| invalid(format!("coupling.matrix_file {path}: {e}")))?;
                    parse_matrix(&text)
                        .map_err(|e| invalid(format!("coupling.matrix_file {path}: {e}")))?
                }
            };
            let cells = weights.len();
            let sys = HrNetwork::new(HrNetworkParams {
                cell,
                g_s: *g_s,
                sigma: gate.unwrap_or(HrGate::Uniform),
                kernel: kernel.unwrap_or(HrKernel::Diffusive),
                coupling: weights,
            })
            .map_err(|e| invalid(format!("coupling: {e}")))?;
            let start = initial
                .clone()
                .unwrap_or_else(|| base.initial.repeat(cells));
            Ok((Arc::new(sys), start))
        }
        CouplingBlock::MlSynaptic {
            lambda,
            tau,
            alpha,
            gamma,
            initial,
        } => {
            let BuiltModel::Ml(cell) = base.built else {
                return Err(invalid(format!(
                    "ml_synaptic coupling requires model kind ml, got {}",
                    base.built.kind()
                )));
            };
            let mut params = MlSynapticParams {
                cell1: cell,
                cell2: cell,
                ..Default::default()
            };
            if let Some(v) = lambda {
                params.lambda = *v;
            }
            if let Some(v) = tau {
                params.tau = *v;
            }
            if let Some(v) = alpha {
                params.alpha = *v;
            }
            if let Some(v) = gamma {
                params.gamma = *v;
            }
            params
                .validate()
                .map_err(|e| invalid(format!("coupling: {e}")))?;
            let sys = MlSynapticPair { params };
            let start = initial.clone().unwrap_or_else(|| {
                vec![
                    base.initial[0],
                    base.initial[1],
                    0.0,
                    base.initial[0],
                    base.initial[1],
                ]
            });
            Ok((Arc::new(sys), start))
        }
    }
}

fn rebuild(built: &BuiltModel) -> BuiltModel {
    match built {
        BuiltModel::Hh(p) => BuiltModel::Hh(*p),
        BuiltModel::Izhikevich(p) => BuiltModel::Izhikevich(*p),
        BuiltModel::Fhn(p) => BuiltModel::Fhn(*p),
        BuiltModel::Hr(p) => BuiltModel::Hr(*p),
        BuiltModel::Ml(p) => BuiltModel::Ml(*p),
        BuiltModel::FhnCell(p) => BuiltModel::FhnCell(*p),
    }
}

fn validate_run_dir(name: &str) -> Result<(), ConfigError> {
    let p = Path::new(name);
    if p.is_absolute()
        || p.components()
            .any(|c| matches!(c, Component::ParentDir | Component::RootDir))
    {
        return Err(invalid(format!(
            "output directory \"{name}\" must be a relative path without \"..\""
        )));
    }
    Ok(())
}

/// Canonical digest of the parsed config: serialize to JSON (object keys are
/// sorted maps, struct fields have a fixed order) and hash the bytes. The
/// same settings give the same digest regardless of TOML key order,
/// whitespace or comments.
pub fn digest_config(
    cfg: &ScenarioConfig,
) -> Result<(String, serde_json::Value), ConfigError> {
    let value = serde_json::to_value(cfg)
        .map_err(|e| invalid(format!("config not serializable: {e}")))?;
    let text = serde_json::to_string(&value)
        .map_err(|e| invalid(format!("config not serializable: {e}")))?;
    Ok((sha256_hex(text.as_bytes()), value))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    let hash = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in hash {
        let _ = write!(out, "{b:02x}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ResolvedScenario, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        resolve(cfg)
    }

    fn parse_err(text: &str) -> ConfigError {
        match parse(text) {
            Ok(_) => panic!("expected the scenario to be rejected"),
            Err(e) => e,
        }
    }

    const MINIMAL: &str = r#"
        scenario = "smoke"
        [model]
        preset = "fhn"
        [integrator]
        method = "rk4"
        dt = 0.05
        t_end = 10.0
    "#;

    #[test]
    fn minimal_preset_scenario_resolves() {
        let r = parse(MINIMAL).unwrap();
        assert_eq!(r.run_dir, "smoke");
        let Workload::Trajectory(run) = r.workload else {
            panic!("expected a trajectory workload");
        };
        assert_eq!(run.system.dimension(), 2);
        assert_eq!(run.channel, "v");
        // preset detector carried over
        assert_eq!(run.detector.unwrap().threshold, 1.0);
    }

    #[test]
    fn unknown_preset_is_a_validation_error_naming_it() {
        let err = parse_err(
            r#"
            scenario = "x"
            [model]
            preset = "izh_rs_typo"
            [integrator]
            method = "rk4"
            dt = 0.01
            t_end = 1.0
        "#,
        );
        match err {
            ConfigError::Validation(msg) => assert!(msg.contains("izh_rs_typo"), "{msg}"),
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn preset_and_kind_are_mutually_exclusive() {
        let err = parse_err(
            r#"
            scenario = "x"
            [model]
            preset = "fhn"
            kind = "fhn"
            [integrator]
            method = "euler"
            dt = 0.1
            t_end = 1.0
        "#,
        );
        assert!(matches!(err, ConfigError::Validation(_)), "{err}");
    }

    #[test]
    fn inline_kind_requires_initial_state() {
        let err = parse_err(
            r#"
            scenario = "x"
            [model]
            kind = "izhikevich"
            [integrator]
            method = "rk4"
            dt = 0.01
            t_end = 1.0
        "#,
        );
        match err {
            ConfigError::Validation(msg) => assert!(msg.contains("initial"), "{msg}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn mistyped_parameter_name_is_rejected() {
        let err = parse_err(
            r#"
            scenario = "x"
            [model]
            kind = "izhikevich"
            initial = [-65.0, -13.0]
            [model.params]
            treshold = 25.0
            [integrator]
            method = "rk4"
            dt = 0.01
            t_end = 1.0
        "#,
        );
        match err {
            ConfigError::Validation(msg) => {
                assert!(msg.contains("treshold"), "{msg}");
                assert!(msg.contains("threshold"), "should list real names: {msg}");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unknown_top_level_key_fails_at_parse_time() {
        let err = parse_err(
            r#"
            scenario = "x"
            stimulos = 3
        "#,
        );
        assert!(matches!(err, ConfigError::Parse(_)), "{err}");
    }

    #[test]
    fn digest_ignores_key_order_but_not_values() {
        let a: ScenarioConfig = toml::from_str(
            r#"
            scenario = "d"
            [model]
            kind = "izhikevich"
            initial = [-65.0, -13.0]
            [model.params]
            a = 0.03
            b = 0.25
            [integrator]
            method = "rk4"
            dt = 0.01
            t_end = 1.0
        "#,
        )
        .unwrap();
        // same settings, tables and keys shuffled, comments added
        let b: ScenarioConfig = toml::from_str(
            r#"
            scenario = "d"
            [integrator]
            t_end = 1.0 # one unit
            dt = 0.01
            method = "rk4"
            [model]
            initial = [-65.0, -13.0]
            kind = "izhikevich"
            [model.params]
            b = 0.25
            a = 0.03
        "#,
        )
        .unwrap();
        let (da, _) = digest_config(&a).unwrap();
        let (db, _) = digest_config(&b).unwrap();
        assert_eq!(da, db);

        let mut c = a.clone();
        c.scenario = "e".into();
        let (dc, _) = digest_config(&c).unwrap();
        assert_ne!(da, dc);
    }

    #[test]
    fn driven_family_rejects_wrong_cell_kind() {
        let err = parse_err(
            r#"
            scenario = "x"
            [model]
            preset = "hh"
            [coupling]
            family = "driven_fhn"
            d = 0.5
            [integrator]
            method = "rk4"
            dt = 0.01
            t_end = 1.0
        "#,
        );
        match err {
            ConfigError::Validation(msg) => assert!(msg.contains("fhn_cell"), "{msg}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn pair_coupling_stacks_initial_states() {
        let r = parse(
            r#"
            scenario = "pair"
            [model]
            preset = "fhn_cell"
            [coupling]
            family = "pair"
            kernel = "diffusive"
            gain = 0.1
            [integrator]
            method = "rk4"
            dt = 0.02
            t_end = 10.0
        "#,
        )
        .unwrap();
        let Workload::Trajectory(run) = r.workload else {
            panic!("expected trajectory");
        };
        assert_eq!(run.system.dimension(), 4);
        assert_eq!(run.initial.as_slice(), &[1.0, 0.0, 1.0, 0.0]);
        assert_eq!(run.channel, "v_1");
    }

    #[test]
    fn acceleration_block_must_stand_alone() {
        let err = parse_err(
            r#"
            scenario = "x"
            [model]
            preset = "fhn_cell"
            [integrator]
            method = "rk4"
            dt = 0.02
            t_end = 100.0
            [analysis.acceleration]
            gains = [0.1]
            eps = [0.08, 0.12]
            eta = 0.28
            window_start = 10.0
        "#,
        );
        assert!(matches!(err, ConfigError::Validation(_)), "{err}");
    }

    #[test]
    fn sync_window_must_fit_the_run() {
        let err = parse_err(
            r#"
            scenario = "x"
            [model]
            preset = "fhn_cell"
            [coupling]
            family = "pair"
            kernel = "diffusive"
            gain = 0.1
            [integrator]
            method = "rk4"
            dt = 0.02
            t_end = 100.0
            [analysis.sync]
            channel_a = "v_1"
            channel_b = "v_2"
            window = [50.0, 200.0]
        "#,
        );
        match err {
            ConfigError::Validation(msg) => assert!(msg.contains("window"), "{msg}"),
            other => panic!("{other}"),
        }
    }
}
