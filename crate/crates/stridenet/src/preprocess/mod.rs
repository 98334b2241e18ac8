//! Turns raw per-stride sensor records into fixed-size normalized network
//! inputs: calibration to physical units, axis alignment, event-based stride
//! redefinition, range normalization and zero-padding.

mod events;
mod profile;

pub use events::{detect_heelstrike, detect_midstance, redefine_strides, EventConfig};
pub use profile::{AxisAlignment, AxisScaleOffset, CalibrationProfile, FootCalibration};

use crate::error::{invalid, Result};
use crate::tensor::Signal;

/// Which foot a sensor record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Foot {
    Left,
    Right,
}

impl Foot {
    pub fn as_str(self) -> &'static str {
        match self {
            Foot::Left => "left",
            Foot::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Foot::Left),
            "right" => Ok(Foot::Right),
            other => Err(invalid(format!("unknown foot {other:?} (expected left|right)"))),
        }
    }
}

impl std::fmt::Display for Foot {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How stride borders are defined: the segmentation borders supplied with the
/// dataset (`MsDtw`), or borders re-anchored on detected gait events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrideDefinition {
    /// Borders as annotated in the source dataset.
    MsDtw,
    /// Heel-strike to next heel-strike.
    HsToHs,
    /// Mid-stance to next mid-stance.
    MsToMs,
}

impl StrideDefinition {
    pub fn as_str(self) -> &'static str {
        match self {
            StrideDefinition::MsDtw => "msdtw",
            StrideDefinition::HsToHs => "hs-hs",
            StrideDefinition::MsToMs => "ms-ms",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "msdtw" => Ok(StrideDefinition::MsDtw),
            "hs-hs" => Ok(StrideDefinition::HsToHs),
            "ms-ms" => Ok(StrideDefinition::MsToMs),
            other => Err(invalid(format!(
                "unknown stride definition {other:?} (expected msdtw|hs-hs|ms-ms)"
            ))),
        }
    }
}

impl std::fmt::Display for StrideDefinition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One annotated stride of 3-axis accelerometer + 3-axis gyroscope data.
///
/// Values may be raw sensor counts or physical units (g, °/s) depending on
/// whether [`calibrate`] has been applied; the type does not distinguish.
/// `start`/`end` are sample indices on the per-foot recording clock, so
/// consecutive strides from one foot can be stitched back together.
#[derive(Debug, Clone, PartialEq)]
pub struct RawStride {
    pub patient_id: String,
    pub foot: Foot,
    pub stride_id: u32,
    /// First sample index in the original recording.
    pub start: usize,
    /// One past the last sample index; `end - start` equals the sample count.
    pub end: usize,
    pub sample_rate: f64,
    /// Reference stride length from the pressure-mat ground truth.
    pub reference_length_cm: f64,
    /// 3 × n accelerometer rows (x, y, z).
    pub accel: Signal,
    /// 3 × n gyroscope rows (x, y, z).
    pub gyro: Signal,
}

impl RawStride {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        patient_id: impl Into<String>,
        foot: Foot,
        stride_id: u32,
        start: usize,
        sample_rate: f64,
        reference_length_cm: f64,
        accel: Signal,
        gyro: Signal,
    ) -> Result<Self> {
        if accel.channels() != 3 || gyro.channels() != 3 {
            return Err(invalid(format!(
                "stride needs 3 accel + 3 gyro channels, got {} + {}",
                accel.channels(),
                gyro.channels()
            )));
        }
        if accel.length() != gyro.length() {
            return Err(invalid(format!(
                "accel length {} != gyro length {}",
                accel.length(),
                gyro.length()
            )));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(invalid(format!("sample rate must be positive, got {sample_rate}")));
        }
        if !(reference_length_cm.is_finite() && reference_length_cm > 0.0) {
            return Err(invalid(format!(
                "reference length must be positive, got {reference_length_cm}"
            )));
        }
        let end = start + accel.length();
        Ok(Self {
            patient_id: patient_id.into(),
            foot,
            stride_id,
            start,
            end,
            sample_rate,
            reference_length_cm,
            accel,
            gyro,
        })
    }

    /// Number of samples in the stride.
    pub fn num_samples(&self) -> usize {
        self.accel.length()
    }
}

/// Full-scale sensor ranges used for normalization to ±1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorRanges {
    pub accel_g: f64,
    pub gyro_dps: f64,
}

impl Default for SensorRanges {
    fn default() -> Self {
        Self { accel_g: 6.0, gyro_dps: 500.0 }
    }
}

/// Fixed-size normalized input/label pair for the network.
///
/// `signal` holds channels (accel x,y,z, gyro x,y,z) scaled into [−1, 1],
/// left-aligned and zero-padded to the configured length.
#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessedStride {
    pub patient_id: String,
    pub foot: Foot,
    pub stride_id: u32,
    pub definition: StrideDefinition,
    pub reference_length_cm: f64,
    /// Samples actually covered by the stride; the rest is zero padding.
    pub unpadded_length: usize,
    /// 6 × padded-length normalized signal.
    pub signal: Signal,
}

impl PreprocessedStride {
    pub fn new(
        patient_id: impl Into<String>,
        foot: Foot,
        stride_id: u32,
        definition: StrideDefinition,
        reference_length_cm: f64,
        unpadded_length: usize,
        signal: Signal,
    ) -> Result<Self> {
        if signal.channels() != 6 {
            return Err(invalid(format!("expected 6 channels, got {}", signal.channels())));
        }
        if unpadded_length == 0 || unpadded_length > signal.length() {
            return Err(invalid(format!(
                "unpadded length {} outside 1..={}",
                unpadded_length,
                signal.length()
            )));
        }
        if !(reference_length_cm.is_finite() && reference_length_cm > 0.0) {
            return Err(invalid(format!(
                "reference length must be positive, got {reference_length_cm}"
            )));
        }
        for c in 0..6 {
            let row = signal.row(c);
            for (t, &v) in row.iter().enumerate() {
                if t < unpadded_length {
                    if v.abs() > 1.0 {
                        return Err(invalid(format!(
                            "normalized value {v} at channel {c}, sample {t} exceeds ±1"
                        )));
                    }
                } else if v != 0.0 {
                    return Err(invalid(format!(
                        "padding at channel {c}, sample {t} is {v}, expected exactly 0"
                    )));
                }
            }
        }
        Ok(Self {
            patient_id: patient_id.into(),
            foot,
            stride_id,
            definition,
            reference_length_cm,
            unpadded_length,
            signal,
        })
    }
}

/// Converts raw sensor counts to physical units (g, °/s) and aligns axes so
/// both feet share one coordinate convention.
///
/// Per axis: `value_phys = scale · (value_raw − offset)`, then the foot's
/// signed-permutation alignment is applied to each 3-vector sample (same
/// alignment for accelerometer and gyroscope, since both live in the sensor
/// frame).
pub fn calibrate(raw: &RawStride, profile: &CalibrationProfile) -> Result<RawStride> {
    let cal = profile.foot(raw.foot);
    let n = raw.num_samples();
    let mut accel = Signal::zeros(3, n);
    let mut gyro = Signal::zeros(3, n);
    for t in 0..n {
        let a = cal.alignment.apply(cal.accel.apply([
            raw.accel.row(0)[t],
            raw.accel.row(1)[t],
            raw.accel.row(2)[t],
        ]));
        let g = cal.alignment.apply(cal.gyro.apply([
            raw.gyro.row(0)[t],
            raw.gyro.row(1)[t],
            raw.gyro.row(2)[t],
        ]));
        for c in 0..3 {
            accel.row_mut(c)[t] = a[c];
            gyro.row_mut(c)[t] = g[c];
        }
    }
    RawStride::new(
        raw.patient_id.clone(),
        raw.foot,
        raw.stride_id,
        raw.start,
        raw.sample_rate,
        raw.reference_length_cm,
        accel,
        gyro,
    )
}

/// Scales a calibrated stride by the sensor ranges (accel by ±`accel_g`,
/// gyro by ±`gyro_dps`), left-aligns it and zero-pads to `padded_len`.
///
/// Strides longer than `padded_len` are rejected rather than truncated:
/// silently dropping samples would corrupt the signal/label relationship.
/// Values outside the stated range (|scaled| > 1) are also rejected.
pub fn normalize_and_pad(
    stride: &RawStride,
    definition: StrideDefinition,
    ranges: SensorRanges,
    padded_len: usize,
) -> Result<PreprocessedStride> {
    if !(ranges.accel_g > 0.0 && ranges.gyro_dps > 0.0) {
        return Err(invalid("sensor ranges must be positive"));
    }
    let n = stride.num_samples();
    if n > padded_len {
        return Err(invalid(format!(
            "stride {} of patient {} has {} samples, longer than the padded length {}",
            stride.stride_id, stride.patient_id, n, padded_len
        )));
    }
    let mut signal = Signal::zeros(6, padded_len);
    for c in 0..3 {
        for t in 0..n {
            signal.row_mut(c)[t] = stride.accel.row(c)[t] / ranges.accel_g;
            signal.row_mut(c + 3)[t] = stride.gyro.row(c)[t] / ranges.gyro_dps;
        }
    }
    for c in 0..6 {
        for t in 0..n {
            let v = signal.row(c)[t];
            if v.abs() > 1.0 {
                let (kind, range) = if c < 3 {
                    ("accel", ranges.accel_g)
                } else {
                    ("gyro", ranges.gyro_dps)
                };
                return Err(invalid(format!(
                    "{kind} sample {t} of stride {} exceeds the ±{range} sensor range \
                     (normalized magnitude {})",
                    stride.stride_id,
                    v.abs()
                )));
            }
        }
    }
    PreprocessedStride::new(
        stride.patient_id.clone(),
        stride.foot,
        stride.stride_id,
        definition,
        stride.reference_length_cm,
        n,
        signal,
    )
}
