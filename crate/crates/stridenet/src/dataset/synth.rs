//! Synthetic gait recordings whose stride length is a known functional of
//! the signal, for desk-scale verification of the whole pipeline.
//!
//! Each stride is a gait-shaped 6-channel segment: a quiet stance window
//! early on (so mid-stance detection has a target), one positive swing
//! rotation bump on the gyroscope swing axis, and a sharp accelerometer dip
//! late in the stride (the heel strike). The stored reference length is
//! `SWING_SCALE · Δt · Σ max(gyro_y, 0)` plus optional Gaussian label noise,
//! so with zero noise the label is exactly recoverable from the samples.

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::preprocess::{Foot, RawStride, SensorRanges};
use crate::tensor::{SeededRng, Signal};

use super::{RawTable, TableMeta};

/// Sample rate of generated recordings, Hz.
pub const SYNTH_SAMPLE_RATE_HZ: f64 = 102.4;

/// Stride length (cm) per (°/s)·s of positive swing-axis rotation.
const SWING_SCALE: f64 = 2.5;

/// How generated stride lengths spread over the plausible range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthDistribution {
    /// Patient means spread broadly, wide per-stride scatter.
    Uniform,
    /// Lengths cluster around a typical value; extremes are rare.
    Clustered,
}

impl LengthDistribution {
    pub fn as_str(self) -> &'static str {
        match self {
            LengthDistribution::Uniform => "uniform",
            LengthDistribution::Clustered => "clustered",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(LengthDistribution::Uniform),
            "clustered" => Ok(LengthDistribution::Clustered),
            other => Err(invalid(format!(
                "unknown length distribution {other:?} (expected uniform or clustered)"
            ))),
        }
    }
}

impl std::fmt::Display for LengthDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub patients: usize,
    pub strides_per_patient: usize,
    /// Standard deviation of the Gaussian label noise, cm.
    pub noise_cm: f64,
    pub distribution: LengthDistribution,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            patients: 50,
            strides_per_patient: 12,
            noise_cm: 1.0,
            distribution: LengthDistribution::Uniform,
        }
    }
}

/// The noiseless label functional: positive swing-axis rotation integrated
/// over the stride, scaled to centimeters.
pub fn swing_integral_cm(stride: &RawStride) -> f64 {
    let dt = 1.0 / stride.sample_rate;
    SWING_SCALE * dt * stride.gyro.row(1).iter().filter(|&&v| v > 0.0).sum::<f64>()
}

/// Generates a raw table of gait-shaped strides. The result depends only on
/// the generator's construction seed: per-patient streams are derived from
/// it, not from the generator's current position.
pub fn generate_synthetic(cfg: &SynthConfig, rng: &mut SeededRng) -> Result<RawTable> {
    if cfg.patients == 0 || cfg.strides_per_patient == 0 {
        return Err(invalid("patient and stride counts must be ≥ 1"));
    }
    if !(cfg.noise_cm.is_finite() && cfg.noise_cm >= 0.0) {
        return Err(invalid(format!("label noise {} must be finite and ≥ 0", cfg.noise_cm)));
    }

    let mut strides = Vec::with_capacity(cfg.patients * cfg.strides_per_patient);
    for p in 0..cfg.patients {
        let mut prng = rng.derive(p as u64);
        let mean_length = match cfg.distribution {
            LengthDistribution::Uniform => prng.uniform_in(55.0, 145.0),
            LengthDistribution::Clustered => (95.0 + prng.normal(12.0)).clamp(55.0, 145.0),
        };
        let patient_id = format!("p{p:03}");
        let left = cfg.strides_per_patient - cfg.strides_per_patient / 2;
        for (foot, count) in [(Foot::Left, left), (Foot::Right, cfg.strides_per_patient / 2)] {
            let mut clock = 0;
            for stride_id in 0..count {
                let stride = synth_stride(
                    &mut prng,
                    &patient_id,
                    foot,
                    stride_id as u32,
                    clock,
                    mean_length,
                    cfg,
                )?;
                clock = stride.end;
                strides.push(stride);
            }
        }
    }
    let meta = TableMeta {
        sample_rate_hz: SYNTH_SAMPLE_RATE_HZ,
        ranges: SensorRanges::default(),
        source: "synthetic".into(),
        calibrated: true,
    };
    RawTable::new(meta, strides)
}

fn synth_stride(
    rng: &mut SeededRng,
    patient_id: &str,
    foot: Foot,
    stride_id: u32,
    start: usize,
    mean_length: f64,
    cfg: &SynthConfig,
) -> Result<RawStride> {
    let n = 100 + rng.index(41); // 0.98 .. 1.37 s
    let swing_width = 24 + rng.index(17);
    let scatter = match cfg.distribution {
        LengthDistribution::Uniform => 18.0,
        LengthDistribution::Clustered => 6.0,
    };
    let target_cm = (mean_length + rng.normal(scatter)).clamp(40.0, 160.0);

    let quiet_from = n / 10;
    let quiet_to = n * 34 / 100;
    let swing_from = n * 45 / 100;
    let heelstrike = n * 92 / 100;

    // Swing amplitude that makes the positive-rotation integral hit the
    // target length; stays below the ±500 °/s range for every n and width.
    let dt = 1.0 / SYNTH_SAMPLE_RATE_HZ;
    let sine_sum: f64 =
        (0..swing_width).map(|k| (PI * k as f64 / swing_width as f64).sin()).sum();
    let amplitude = target_cm / (SWING_SCALE * dt * sine_sum);

    let phase = rng.uniform_in(0.0, 2.0 * PI);
    let (mut ax, mut ay, mut az) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut gx, mut gy, mut gz) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for t in 0..n {
        let u = t as f64 / n as f64;
        ax[t] = 0.06 * (2.0 * PI * 5.0 * u + phase).sin();
        ay[t] = 0.04 * (2.0 * PI * 4.0 * u + 1.3 * phase).sin();
        az[t] = 1.0 + 0.05 * (2.0 * PI * 3.0 * u + 0.7 * phase).sin();
        gx[t] = -4.0 + 2.0 * (2.0 * PI * 2.0 * u + phase).sin();
        // Strictly negative outside the swing bump: only the bump feeds the
        // positive-rotation integral that defines the label.
        gy[t] = -6.0 + 3.0 * (2.0 * PI * 2.5 * u + 0.4 * phase).sin();
        gz[t] = 3.0 + 1.5 * (2.0 * PI * 1.5 * u + 2.0 * phase).sin();
    }
    for t in quiet_from..quiet_to {
        let u = t as f64 / n as f64;
        ax[t] *= 0.3;
        ay[t] *= 0.3;
        az[t] = 1.0 + 0.01 * (2.0 * PI * 3.0 * u).sin();
        gx[t] = 0.15 * (2.0 * PI * 2.0 * u + phase).sin();
        gy[t] = -0.4 + 0.2 * (2.0 * PI * 2.0 * u).sin();
        gz[t] = 0.1 * (2.0 * PI * 1.5 * u).sin();
    }
    for k in 0..swing_width {
        let t = swing_from + k;
        let s = (PI * k as f64 / swing_width as f64).sin();
        let wobble = (2.0 * PI * k as f64 / swing_width as f64).sin();
        gy[t] = amplitude * s;
        gx[t] = 0.15 * amplitude * wobble;
        gz[t] = -0.1 * amplitude * s;
        ax[t] += 0.5 * wobble;
        az[t] += 0.6 * s;
    }
    // Heel strike: a sharp, unique accelerometer-x minimum plus an impact
    // spike, well after the swing bump ends.
    ax[heelstrike] = -3.4 - 0.4 * rng.uniform();
    ax[heelstrike - 1] = -1.3;
    ax[heelstrike + 1] = -1.1;
    az[heelstrike] = 2.4;
    gy[heelstrike] = -40.0;

    let accel = Signal::from_rows(&[ax, ay, az])?;
    let gyro = Signal::from_rows(&[gx, gy, gz])?;
    let noiseless =
        SWING_SCALE * dt * gyro.row(1).iter().filter(|&&v| v > 0.0).sum::<f64>();
    let noise = if cfg.noise_cm > 0.0 { rng.normal(cfg.noise_cm) } else { 0.0 };
    let reference = (noiseless + noise).max(1.0);

    RawStride::new(
        patient_id,
        foot,
        stride_id,
        start,
        SYNTH_SAMPLE_RATE_HZ,
        reference,
        accel,
        gyro,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{detect_heelstrike, detect_midstance, redefine_strides, EventConfig, StrideDefinition};

    fn generate(cfg: &SynthConfig, seed: u64) -> RawTable {
        generate_synthetic(cfg, &mut SeededRng::new(seed)).unwrap()
    }

    #[test]
    fn generator_is_deterministic_in_the_seed() {
        let cfg = SynthConfig { patients: 4, strides_per_patient: 5, ..SynthConfig::default() };
        assert_eq!(generate(&cfg, 3), generate(&cfg, 3));
        assert_ne!(generate(&cfg, 3), generate(&cfg, 4));
    }

    #[test]
    fn zero_noise_labels_equal_the_swing_integral_bitwise() {
        let cfg = SynthConfig {
            patients: 6,
            strides_per_patient: 4,
            noise_cm: 0.0,
            ..SynthConfig::default()
        };
        let table = generate(&cfg, 9);
        assert_eq!(table.strides.len(), 24);
        for s in &table.strides {
            assert_eq!(s.reference_length_cm, swing_integral_cm(s));
        }
        // Perfect linear dependence: correlation is 1 up to rounding.
        let labels: Vec<f64> = table.strides.iter().map(|s| s.reference_length_cm).collect();
        let integrals: Vec<f64> = table.strides.iter().map(swing_integral_cm).collect();
        let corr = pearson(&labels, &integrals);
        assert!((corr - 1.0).abs() < 1e-12, "correlation {corr}");
    }

    #[test]
    fn label_noise_has_the_configured_spread() {
        let cfg = SynthConfig {
            patients: 40,
            strides_per_patient: 10,
            noise_cm: 2.0,
            ..SynthConfig::default()
        };
        let table = generate(&cfg, 10);
        let residuals: Vec<f64> = table
            .strides
            .iter()
            .map(|s| s.reference_length_cm - swing_integral_cm(s))
            .collect();
        let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
        let var = residuals.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>()
            / (residuals.len() - 1) as f64;
        let std = var.sqrt();
        assert!((1.8..2.2).contains(&std), "residual std {std}");
    }

    #[test]
    fn signals_respect_sensor_ranges_and_padding_budget() {
        let table = generate(
            &SynthConfig { patients: 10, strides_per_patient: 8, ..SynthConfig::default() },
            11,
        );
        for s in &table.strides {
            assert!(s.num_samples() <= 256);
            assert!(s.accel.values().iter().all(|v| v.abs() <= 6.0));
            assert!(s.gyro.values().iter().all(|v| v.abs() <= 500.0));
            assert!(s.reference_length_cm > 0.0);
        }
    }

    #[test]
    fn recordings_are_contiguous_per_foot() {
        let cfg = SynthConfig { patients: 3, strides_per_patient: 5, ..SynthConfig::default() };
        let table = generate(&cfg, 12);
        // Odd stride counts put the extra stride on the left foot.
        let p0_left: Vec<_> = table
            .strides
            .iter()
            .filter(|s| s.patient_id == "p000" && s.foot == Foot::Left)
            .collect();
        let p0_right: Vec<_> = table
            .strides
            .iter()
            .filter(|s| s.patient_id == "p000" && s.foot == Foot::Right)
            .collect();
        assert_eq!((p0_left.len(), p0_right.len()), (3, 2));
        for feet in [p0_left, p0_right] {
            assert_eq!(feet[0].start, 0);
            for pair in feet.windows(2) {
                assert_eq!(pair[1].start, pair[0].end, "recording must have no gaps");
                assert_eq!(pair[1].stride_id, pair[0].stride_id + 1);
            }
        }
    }

    #[test]
    fn planted_events_are_what_the_detectors_find() {
        let table = generate(
            &SynthConfig { patients: 4, strides_per_patient: 6, ..SynthConfig::default() },
            13,
        );
        let cfg = EventConfig::default();
        for s in &table.strides {
            let n = s.num_samples();
            let ms = detect_midstance(s, cfg.midstance_window).unwrap();
            assert!(
                (n / 10..n * 34 / 100).contains(&ms),
                "mid-stance {ms} outside the quiet zone of a {n}-sample stride"
            );
            let hs = detect_heelstrike(s, n / 2..n).unwrap();
            assert_eq!(hs, n * 92 / 100, "heel strike must sit on the planted dip");
        }
    }

    #[test]
    fn whole_recordings_redefine_cleanly_under_both_event_definitions() {
        let table = generate(
            &SynthConfig { patients: 2, strides_per_patient: 6, ..SynthConfig::default() },
            14,
        );
        let cfg = EventConfig::default();
        for patient in ["p000", "p001"] {
            for foot in [Foot::Left, Foot::Right] {
                let recording: Vec<RawStride> = table
                    .strides
                    .iter()
                    .filter(|s| s.patient_id == patient && s.foot == foot)
                    .cloned()
                    .collect();
                for definition in [StrideDefinition::MsToMs, StrideDefinition::HsToHs] {
                    let out = redefine_strides(&recording, definition, &cfg).unwrap();
                    assert_eq!(out.len(), recording.len() - 1);
                    assert!(out.iter().all(|s| s.num_samples() <= 256));
                }
            }
        }
    }

    #[test]
    fn clustered_lengths_are_tighter_than_uniform() {
        let base = SynthConfig { patients: 40, strides_per_patient: 6, ..SynthConfig::default() };
        let spread = |dist: LengthDistribution| {
            let table = generate(&SynthConfig { distribution: dist, ..base.clone() }, 15);
            let lengths: Vec<f64> =
                table.strides.iter().map(|s| s.reference_length_cm).collect();
            let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
            (lengths.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>()
                / (lengths.len() - 1) as f64)
                .sqrt()
        };
        let uniform = spread(LengthDistribution::Uniform);
        let clustered = spread(LengthDistribution::Clustered);
        assert!(
            clustered < 0.7 * uniform,
            "clustered spread {clustered} vs uniform {uniform}"
        );
    }

    #[test]
    fn generator_validates_its_config() {
        let mut rng = SeededRng::new(1);
        assert!(generate_synthetic(
            &SynthConfig { patients: 0, ..SynthConfig::default() },
            &mut rng
        )
        .is_err());
        assert!(generate_synthetic(
            &SynthConfig { noise_cm: f64::NAN, ..SynthConfig::default() },
            &mut rng
        )
        .is_err());
    }

    fn pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (&a, &b) in x.iter().zip(y) {
            sxy += (a - mx) * (b - my);
            sxx += (a - mx) * (a - mx);
            syy += (b - my) * (b - my);
        }
        sxy / (sxx * syy).sqrt()
    }
}
