//! Gait event detection (mid-stance, heel-strike) and event-based stride
//! redefinition.

use std::ops::Range;

use crate::error::{degenerate, invalid, Result};
use crate::preprocess::{RawStride, StrideDefinition};
use crate::tensor::Signal;

/// Parameters for event detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventConfig {
    /// Sliding-window length (samples) for the mid-stance energy minimum.
    pub midstance_window: usize,
    /// Fraction of the stride at which the heel-strike search begins; the
    /// search always runs to the end of the stride.
    pub heelstrike_search_from: f64,
}

impl Default for EventConfig {
    fn default() -> Self {
        // ~49 ms at 102.4 Hz; heel-strike lives in the second half of a
        // stride segmented to start near mid-stance.
        Self { midstance_window: 5, heelstrike_search_from: 0.5 }
    }
}

/// Finds the mid-stance instant: the center of the `window`-sample sliding
/// window with the lowest total gyroscope energy Σ(gx² + gy² + gz²).
///
/// Ties keep the earliest window. Returns an index relative to stride start.
pub fn detect_midstance(stride: &RawStride, window: usize) -> Result<usize> {
    let n = stride.num_samples();
    if window == 0 {
        return Err(invalid("mid-stance window must be at least 1 sample"));
    }
    if n <= window {
        return Err(degenerate(format!(
            "stride {} of patient {} has {} samples, too short for a {}-sample window",
            stride.stride_id, stride.patient_id, n, window
        )));
    }
    let energy: Vec<f64> = (0..n)
        .map(|t| {
            let gx = stride.gyro.row(0)[t];
            let gy = stride.gyro.row(1)[t];
            let gz = stride.gyro.row(2)[t];
            gx * gx + gy * gy + gz * gz
        })
        .collect();
    let mut best_start = 0;
    let mut best_sum = f64::INFINITY;
    let mut sum: f64 = energy[..window].iter().sum();
    for s in 0..=n - window {
        if s > 0 {
            // Recompute rather than slide: exact ties matter for the
            // first-window rule and running subtraction loses them.
            sum = energy[s..s + window].iter().sum();
        }
        if sum < best_sum {
            best_sum = sum;
            best_start = s;
        }
    }
    Ok(best_start + window / 2)
}

/// Finds the heel-strike instant: the minimum of the accelerometer x-axis
/// within `search` (half-open, relative to stride start). Ties keep the
/// earliest sample.
pub fn detect_heelstrike(stride: &RawStride, search: Range<usize>) -> Result<usize> {
    let n = stride.num_samples();
    if search.start >= search.end {
        return Err(invalid(format!("empty heel-strike search range {search:?}")));
    }
    if search.end > n {
        return Err(invalid(format!(
            "heel-strike search range {search:?} exceeds stride length {n}"
        )));
    }
    let ax = stride.accel.row(0);
    let mut best = search.start;
    for t in search {
        if ax[t] < ax[best] {
            best = t;
        }
    }
    Ok(best)
}

/// Detects the anchoring event of `definition` in one stride, returning an
/// index relative to stride start.
fn stride_event(stride: &RawStride, definition: StrideDefinition, cfg: &EventConfig) -> Result<usize> {
    match definition {
        StrideDefinition::MsDtw => Err(invalid("the dataset definition has no detected event")),
        StrideDefinition::MsToMs => detect_midstance(stride, cfg.midstance_window),
        StrideDefinition::HsToHs => {
            let n = stride.num_samples();
            if !(0.0..1.0).contains(&cfg.heelstrike_search_from) {
                return Err(invalid(format!(
                    "heel-strike search fraction {} outside [0, 1)",
                    cfg.heelstrike_search_from
                )));
            }
            let from = (n as f64 * cfg.heelstrike_search_from).floor() as usize;
            detect_heelstrike(stride, from.min(n - 1)..n)
        }
    }
}

/// Re-anchors stride borders on detected events: output stride `i` spans
/// event(i) → event(i+1) on the recording clock. The last input stride has no
/// following event and yields no output, so `k` strides become `k − 1`.
///
/// For the dataset definition the input borders are returned unchanged.
///
/// The inputs must be consecutive strides of one foot of one patient, sorted
/// by start index, and together must cover every sample between the first and
/// last event — a gap in coverage is an error. Where two inputs overlap, the
/// earlier stride's samples win. Detected events must be strictly increasing
/// on the recording clock.
///
/// Each output keeps the identity (id, reference length) of the input stride
/// whose swing phase it contains, since the reference measures the swing
/// displacement: between consecutive mid-stances that is the stride the
/// leading event belongs to, between consecutive heel strikes it is the
/// following one (a heel strike ends its stride's swing, so the segment
/// carries the next swing).
pub fn redefine_strides(
    strides: &[RawStride],
    definition: StrideDefinition,
    cfg: &EventConfig,
) -> Result<Vec<RawStride>> {
    if definition == StrideDefinition::MsDtw {
        return Ok(strides.to_vec());
    }
    if strides.len() < 2 {
        return Ok(Vec::new());
    }
    let first = &strides[0];
    for pair in strides.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.patient_id != b.patient_id || a.foot != b.foot {
            return Err(invalid(format!(
                "strides mix recordings: patient {}/{} foot {}/{}",
                a.patient_id, b.patient_id, a.foot, b.foot
            )));
        }
        if a.sample_rate != b.sample_rate {
            return Err(invalid("strides mix sample rates"));
        }
        if a.start > b.start {
            return Err(invalid("strides must be sorted by start index"));
        }
    }

    let events: Vec<usize> = strides
        .iter()
        .map(|s| Ok(s.start + stride_event(s, definition, cfg)?))
        .collect::<Result<_>>()?;
    for (i, pair) in events.windows(2).enumerate() {
        if pair[0] >= pair[1] {
            return Err(degenerate(format!(
                "events not strictly increasing: stride {} event at sample {}, stride {} at {}",
                strides[i].stride_id,
                pair[0],
                strides[i + 1].stride_id,
                pair[1]
            )));
        }
    }

    // Copies the sample at absolute index `t` from the earliest input stride
    // covering it.
    let sample = |t: usize| -> Result<(usize, [f64; 3], [f64; 3])> {
        for s in strides {
            if t >= s.start && t < s.end {
                let rel = t - s.start;
                let pick = |sig: &Signal| [sig.row(0)[rel], sig.row(1)[rel], sig.row(2)[rel]];
                return Ok((rel, pick(&s.accel), pick(&s.gyro)));
            }
        }
        Err(degenerate(format!(
            "recording gap: no input stride covers sample {t} needed by the redefined borders"
        )))
    };

    let mut out = Vec::with_capacity(strides.len() - 1);
    for i in 0..strides.len() - 1 {
        let (from, to) = (events[i], events[i + 1]);
        let n = to - from;
        let mut accel = Signal::zeros(3, n);
        let mut gyro = Signal::zeros(3, n);
        for t in from..to {
            let (_, a, g) = sample(t)?;
            for c in 0..3 {
                accel.row_mut(c)[t - from] = a[c];
                gyro.row_mut(c)[t - from] = g[c];
            }
        }
        let source = match definition {
            StrideDefinition::MsToMs => &strides[i],
            StrideDefinition::HsToHs => &strides[i + 1],
            StrideDefinition::MsDtw => unreachable!("handled above"),
        };
        out.push(RawStride::new(
            source.patient_id.clone(),
            source.foot,
            source.stride_id,
            from,
            first.sample_rate,
            source.reference_length_cm,
            accel,
            gyro,
        )?);
    }
    Ok(out)
}
