//! Carries a resolved scenario through simulation and analysis and writes the
//! outputs: `trajectory.csv`, `report.json` and `manifest.json` inside the
//! run directory. Every file is written atomically (temp file in the same
//! directory, then rename), so an interrupted run never leaves a torn file.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde_json::{json, Value};

use neurodyn::analysis::{
    acceleration_ratio, detect_spikes, estimate_period, fi_sweep, frequency_sensitivity,
    sync_report, SpikeDetectorConfig, SpikeTrain, SweepSetup,
};
use neurodyn::coupled::{build_pair_mixed, PairKernel};
use neurodyn::csvout::trajectory_to_csv;
use neurodyn::models::fhn_cell::FhnCell;
use neurodyn::{integrate, Error, StateVector, Trajectory};

use crate::config::{AccelerationRun, ResolvedScenario, TrajectoryRun, Workload};

pub enum RunError {
    /// The state left the representable range; the partial trajectory and a
    /// manifest with the failure status are on disk.
    Diverged(String),
    /// Simulation or analysis failed after validation, or an output could
    /// not be written.
    Failed(String),
}

pub struct RunSummary {
    pub dir: PathBuf,
    /// Human-readable one-liners for stdout.
    pub lines: Vec<String>,
}

pub fn execute(sc: &ResolvedScenario, out_root: &Path) -> Result<RunSummary, RunError> {
    let dir = out_root.join(&sc.run_dir);
    std::fs::create_dir_all(&dir)
        .map_err(|e| RunError::Failed(format!("cannot create {}: {e}", dir.display())))?;
    let started = wall_ms();
    match &sc.workload {
        Workload::Trajectory(run) => run_trajectory(sc, run, &dir, started),
        Workload::Acceleration(run) => run_acceleration(sc, run, &dir, started),
    }
}

fn run_trajectory(
    sc: &ResolvedScenario,
    run: &TrajectoryRun,
    dir: &Path,
    started: u64,
) -> Result<RunSummary, RunError> {
    let tr = match integrate(&*run.system, &run.initial, &run.stimulus, &run.integrator) {
        Ok(tr) => tr,
        Err(Error::Divergence { time, partial }) => {
            let status = format!("diverged at t={time}");
            write_atomic(&dir.join("trajectory.csv"), trajectory_to_csv(&partial).as_bytes())?;
            write_manifest(sc, dir, started, &status, &["trajectory.csv"])?;
            return Err(RunError::Diverged(status));
        }
        Err(other) => {
            let status = format!("failed: {other}");
            write_manifest(sc, dir, started, &status, &[])?;
            return Err(RunError::Failed(other.to_string()));
        }
    };

    write_atomic(&dir.join("trajectory.csv"), trajectory_to_csv(&tr).as_bytes())?;

    match analyze(run, &tr) {
        Ok((results, lines)) => {
            write_report(sc, dir, results)?;
            write_manifest(sc, dir, started, "ok", &["trajectory.csv", "report.json"])?;
            Ok(RunSummary {
                dir: dir.to_path_buf(),
                lines,
            })
        }
        Err(msg) => {
            let status = format!("failed: {msg}");
            write_manifest(sc, dir, started, &status, &["trajectory.csv"])?;
            Err(RunError::Failed(msg))
        }
    }
}

/// Runs every configured analysis against the finished trajectory and
/// collects the report sections plus their stdout one-liners.
fn analyze(run: &TrajectoryRun, tr: &Trajectory) -> Result<(Value, Vec<String>), String> {
    let mut results = serde_json::Map::new();
    let mut lines = Vec::new();

    results.insert(
        "trajectory".into(),
        json!({
            "file": "trajectory.csv",
            "samples": tr.len(),
            "channels": tr.labels,
            "resets": tr.reset_times.len(),
        }),
    );
    lines.push(format!(
        "trajectory: {} samples, {} resets",
        tr.len(),
        tr.reset_times.len()
    ));

    if let Some(det) = &run.detector {
        let train = detect_spikes(tr, &run.channel, det).map_err(|e| e.to_string())?;
        let period = estimate_period(&train, run.discard_transient).period();
        lines.push(match period {
            Some(p) => format!("spikes on {}: {} (period {p:.6})", run.channel, train.len()),
            None => format!("spikes on {}: {} (not periodic)", run.channel, train.len()),
        });
        results.insert(
            "spikes".into(),
            json!({
                "channel": run.channel,
                "count": train.len(),
                "times": train.times,
                "period": period,
            }),
        );

        if let Some(fi) = &run.fi {
            let setup = SweepSetup {
                method: run.integrator.method,
                dt: run.integrator.dt,
                window: fi.window,
            };
            let points = fi_sweep(&*run.system, &run.initial, &fi.amplitudes, &setup, det)
                .map_err(|e| e.to_string())?;
            lines.push(format!(
                "f-I sweep: counts {:?} at amplitudes {:?}",
                points.iter().map(|p| p.count).collect::<Vec<_>>(),
                fi.amplitudes
            ));
            results.insert("fi".into(), json!({ "window": fi.window, "points": points }));
        }

        if let Some(fr) = &run.frequency {
            let setup = SweepSetup {
                method: run.integrator.method,
                dt: run.integrator.dt,
                window: fr.window,
            };
            let report = frequency_sensitivity(
                &*run.system,
                &run.initial,
                &fr.amplitudes,
                &setup,
                det,
                fr.discard_transient,
            )
            .map_err(|e| e.to_string())?;
            lines.push(format!("frequency span: {:.6}", report.span));
            results.insert(
                "frequency".into(),
                serde_json::to_value(&report).map_err(|e| e.to_string())?,
            );
        }

        if let Some(sync) = &run.sync {
            let report = sync_report(
                tr,
                &sync.channel_a,
                &sync.channel_b,
                (sync.window[0], sync.window[1]),
                det,
            )
            .map_err(|e| e.to_string())?;
            lines.push(format!(
                "sync {} vs {}: rms {:.3e}, locked {}",
                sync.channel_a, sync.channel_b, report.rms, report.locked
            ));
            results.insert(
                "sync".into(),
                serde_json::to_value(&report).map_err(|e| e.to_string())?,
            );
        }
    }

    Ok((Value::Object(results), lines))
}

fn run_acceleration(
    sc: &ResolvedScenario,
    run: &AccelerationRun,
    dir: &Path,
    started: u64,
) -> Result<RunSummary, RunError> {
    match acceleration_results(run) {
        Ok((results, lines)) => {
            write_report(sc, dir, results)?;
            write_manifest(sc, dir, started, "ok", &["report.json"])?;
            Ok(RunSummary {
                dir: dir.to_path_buf(),
                lines,
            })
        }
        Err(RunError::Diverged(status)) => {
            write_manifest(sc, dir, started, &status, &[])?;
            Err(RunError::Diverged(status))
        }
        Err(RunError::Failed(msg)) => {
            write_manifest(sc, dir, started, &format!("failed: {msg}"), &[])?;
            Err(RunError::Failed(msg))
        }
    }
}

fn acceleration_results(run: &AccelerationRun) -> Result<(Value, Vec<String>), RunError> {
    let cells = [run.cell1, run.cell2];
    let mut isolated = [0.0; 2];
    for (i, params) in cells.iter().enumerate() {
        let cell = FhnCell { params: *params };
        let half = &run.initial.as_slice()[2 * i..2 * i + 2];
        let s0 = StateVector::new(half.to_vec()).map_err(|e| RunError::Failed(e.to_string()))?;
        let tr = run_or_diverge(&cell, &s0, run)?;
        let train = windowed(&tr, "v", &run.detector, run.window_start)
            .map_err(RunError::Failed)?;
        isolated[i] = estimate_period(&train, 0).period().ok_or_else(|| {
            RunError::Failed(format!(
                "isolated cell {} (eps = {}) is not periodic over the analysis window",
                i + 1,
                params.eps
            ))
        })?;
    }

    let rows: Vec<Value> = run
        .gains
        .par_iter()
        .map(|&gain| -> Result<Value, RunError> {
            let pair = build_pair_mixed(
                Arc::new(FhnCell { params: run.cell1 }),
                Arc::new(FhnCell { params: run.cell2 }),
                gain,
                PairKernel::Diffusive,
            )
            .map_err(|e| RunError::Failed(e.to_string()))?;
            let tr = run_or_diverge(&pair, &run.initial, run)?;
            let mut periods = [None, None];
            for (i, ch) in ["v_1", "v_2"].iter().enumerate() {
                let train = windowed(&tr, ch, &run.detector, run.window_start)
                    .map_err(RunError::Failed)?;
                periods[i] = estimate_period(&train, 0).period();
            }
            // cell 1's rhythm stands in for the pair; by this point a locked
            // pair shows the same period on both channels
            let row = match periods[0] {
                Some(p1) => {
                    let rep = acceleration_ratio(&isolated, p1)
                        .map_err(|e| RunError::Failed(e.to_string()))?;
                    json!({
                        "gain": gain,
                        "coupled_period": periods[0],
                        "coupled_period_2": periods[1],
                        "ratio": rep.ratio,
                        "accelerated": rep.accelerated,
                    })
                }
                None => json!({
                    "gain": gain,
                    "coupled_period": Value::Null,
                    "coupled_period_2": periods[1],
                    "ratio": Value::Null,
                    "accelerated": false,
                    "note": "not periodic over the analysis window",
                }),
            };
            Ok(row)
        })
        .collect::<Result<_, _>>()?;

    let mut lines = vec![format!(
        "isolated periods: {:.6} (eps {}), {:.6} (eps {})",
        isolated[0], run.cell1.eps, isolated[1], run.cell2.eps
    )];
    for row in &rows {
        let gain = row["gain"].as_f64().unwrap_or(f64::NAN);
        lines.push(match (row["ratio"].as_f64(), row["accelerated"].as_bool()) {
            (Some(ratio), Some(acc)) => format!(
                "gain {gain}: period {:.6}, ratio {ratio:.4}, accelerated {acc}",
                row["coupled_period"].as_f64().unwrap_or(f64::NAN)
            ),
            _ => format!("gain {gain}: not periodic over the analysis window"),
        });
    }

    let results = json!({
        "acceleration": {
            "isolated_periods": isolated,
            "rows": rows,
        }
    });
    Ok((results, lines))
}

fn run_or_diverge<M: neurodyn::ModelSystem + ?Sized>(
    m: &M,
    s0: &StateVector,
    run: &AccelerationRun,
) -> Result<Trajectory, RunError> {
    integrate(m, s0, &run.stimulus, &run.integrator).map_err(|e| match e {
        Error::Divergence { time, .. } => RunError::Diverged(format!("diverged at t={time}")),
        other => RunError::Failed(other.to_string()),
    })
}

/// Spike train on one channel restricted to t >= start.
fn windowed(
    tr: &Trajectory,
    channel: &str,
    det: &SpikeDetectorConfig,
    start: f64,
) -> Result<SpikeTrain, String> {
    let full = detect_spikes(tr, channel, det).map_err(|e| e.to_string())?;
    Ok(SpikeTrain {
        times: full.times.into_iter().filter(|&t| t >= start).collect(),
        channel: full.channel,
        config: full.config,
    })
}

fn write_report(sc: &ResolvedScenario, dir: &Path, results: Value) -> Result<(), RunError> {
    let report = json!({
        "scenario": sc.name,
        "config_digest": sc.digest,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "config": sc.config_value,
        "results": results,
    });
    write_atomic(&dir.join("report.json"), pretty(&report)?.as_bytes())
}

fn write_manifest(
    sc: &ResolvedScenario,
    dir: &Path,
    started: u64,
    status: &str,
    files: &[&str],
) -> Result<(), RunError> {
    let manifest = json!({
        "scenario": sc.name,
        "config_digest": sc.digest,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "status": status,
        "files": files,
        "started_at_unix_ms": started,
        "finished_at_unix_ms": wall_ms(),
    });
    write_atomic(&dir.join("manifest.json"), pretty(&manifest)?.as_bytes())
}

fn pretty(value: &Value) -> Result<String, RunError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| RunError::Failed(format!("report serialization: {e}")))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let io_err = |e: &dyn std::fmt::Display| {
        RunError::Failed(format!("cannot write {}: {e}", path.display()))
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(&e))?;
    tmp.write_all(bytes).map_err(|e| io_err(&e))?;
    tmp.persist(path).map_err(|e| io_err(&e))?;
    Ok(())
}

fn wall_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_existing_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, b"first").map_err(|_| ()).unwrap();
        write_atomic(&path, b"second").map_err(|_| ()).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
    }

    #[test]
    fn windowed_train_drops_early_spikes() {
        use neurodyn::{IntegratorConfig, Method, ModelSystem, StimulusProtocol};

        // sawtooth crossing 0.5 once per time unit
        struct Saw;
        impl ModelSystem for Saw {
            fn dimension(&self) -> usize {
                1
            }
            fn labels(&self) -> Vec<String> {
                vec!["v".into()]
            }
            fn rhs(&self, t: f64, _s: &[f64], _i: f64, out: &mut [f64]) {
                use std::f64::consts::PI;
                out[0] = 2.0 * PI * (2.0 * PI * t).cos();
            }
        }
        let s0 = StateVector::new(vec![0.0]).unwrap();
        let cfg = IntegratorConfig::new(Method::Rk4, 0.01, 10.0);
        let tr = integrate(&Saw, &s0, &StimulusProtocol::zero(), &cfg).unwrap();
        let det = SpikeDetectorConfig::new(0.5, 0.2);
        let full = detect_spikes(&tr, "v", &det).unwrap();
        let late = windowed(&tr, "v", &det, 5.0).unwrap();
        assert!(late.len() < full.len());
        assert!(late.times.iter().all(|&t| t >= 5.0));
    }
}
