use crate::analysis::spikes::{detect_spikes, SpikeDetectorConfig};
use crate::error::{Error, Result};
use crate::integrate::Trajectory;

/// Two trains count as locked when their pairwise spike offsets scatter by
/// less than this (ms, or one time unit for dimensionless models).
pub const LOCK_TOLERANCE: f64 = 1.0;

#[derive(Clone, Debug, serde::Serialize)]
pub struct SyncReport {
    /// Root-mean-square of (a - b) over the analysis window.
    pub rms: f64,
    pub spikes_a: usize,
    pub spikes_b: usize,
    /// Mean of (b spike time - matched a spike time). None when either train
    /// has too few spikes to pair.
    pub offset_mean: Option<f64>,
    /// Standard deviation of the offsets; None marks it undefined.
    pub jitter: Option<f64>,
    pub locked: bool,
}

/// Greedy monotone nearest-spike pairing: for each spike in `a`, walk
/// forward through `b` while the next candidate is strictly closer, emit
/// that offset, and never reuse a consumed candidate. Robust to a missing
/// spike at a window edge.
fn pair_offsets(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut offsets = Vec::new();
    let mut j = 0;
    for &ta in a {
        if j >= b.len() {
            break;
        }
        let mut k = j;
        while k + 1 < b.len() && (b[k + 1] - ta).abs() < (b[k] - ta).abs() {
            k += 1;
        }
        offsets.push(b[k] - ta);
        j = k + 1;
    }
    offsets
}

/// Compares two voltage channels of one trajectory over [window.0,
/// window.1]: waveform distance as rms, spike alignment as mean offset and
/// jitter. Spikes are detected on the full trace, then restricted to the
/// window. Fewer than 3 windowed spikes in either train leaves the offset
/// statistics undefined and the verdict unlocked.
pub fn sync_report(
    tr: &Trajectory,
    ch_a: &str,
    ch_b: &str,
    window: (f64, f64),
    detector: &SpikeDetectorConfig,
) -> Result<SyncReport> {
    let ia = tr
        .channel_index(ch_a)
        .ok_or_else(|| Error::UnknownChannel(ch_a.to_string()))?;
    let ib = tr
        .channel_index(ch_b)
        .ok_or_else(|| Error::UnknownChannel(ch_b.to_string()))?;
    let (w0, w1) = window;
    if !w0.is_finite() || !w1.is_finite() || !(w0 < w1) {
        return Err(Error::InvalidInput(format!(
            "analysis window must be an increasing finite pair, got ({w0}, {w1})"
        )));
    }
    if tr.is_empty() {
        return Err(Error::InvalidInput("empty trajectory".into()));
    }
    let span_end = tr.time(tr.len() - 1);
    if w0 < tr.t0 - 1e-9 || w1 > span_end + 1e-9 {
        return Err(Error::InvalidInput(format!(
            "window ({w0}, {w1}) outside trajectory span ({}, {span_end})",
            tr.t0
        )));
    }

    let mut sq_sum = 0.0;
    let mut n_in = 0usize;
    for (i, s) in tr.samples.iter().enumerate() {
        let t = tr.time(i);
        if t >= w0 && t <= w1 {
            let d = s[ia] - s[ib];
            sq_sum += d * d;
            n_in += 1;
        }
    }
    if n_in == 0 {
        return Err(Error::InvalidInput(
            "analysis window contains no samples".into(),
        ));
    }
    let rms = (sq_sum / n_in as f64).sqrt();

    let windowed = |label: &str| -> Result<Vec<f64>> {
        Ok(detect_spikes(tr, label, detector)?
            .times
            .into_iter()
            .filter(|&t| t >= w0 && t <= w1)
            .collect())
    };
    let sa = windowed(ch_a)?;
    let sb = windowed(ch_b)?;

    let (offset_mean, jitter) = if sa.len() < 3 || sb.len() < 3 {
        (None, None)
    } else {
        let offs = pair_offsets(&sa, &sb);
        let mean = offs.iter().sum::<f64>() / offs.len() as f64;
        let jitter = if offs.len() < 2 {
            None
        } else {
            let var =
                offs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / offs.len() as f64;
            Some(var.sqrt())
        };
        (Some(mean), jitter)
    };
    Ok(SyncReport {
        rms,
        spikes_a: sa.len(),
        spikes_b: sb.len(),
        offset_mean,
        jitter,
        locked: jitter.map_or(false, |j| j < LOCK_TOLERANCE),
    })
}
