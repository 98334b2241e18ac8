//! End-to-end glue: raw tables through calibration, event redefinition and
//! normalization into network-ready tables, plus the run manifest written
//! next to every artifact set.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fmt::Write as _;
use std::path::Path;

use crate::dataset::{dataset_hash, PreprocessedTable, RawTable, TableMeta};
use crate::error::{invalid, Result};
use crate::ioutil::write_atomic;
use crate::kv;
use crate::network::NetworkConfig;
use crate::preprocess::{
    calibrate, normalize_and_pad, redefine_strides, CalibrationProfile, EventConfig, Foot,
    RawStride, StrideDefinition,
};
use crate::training::TrainConfig;

/// Padded signal length matching the full-size network input.
pub const DEFAULT_PADDED_LENGTH: usize = 256;

/// Turns a raw table into a network-ready one: calibrates if the table still
/// holds sensor counts, re-anchors stride borders per `definition` on each
/// recording (one foot of one patient, sorted by start), then range-normalizes
/// and zero-pads every stride to `padded_length`.
///
/// Calibration policy: a table whose metadata says `calibrated` must not be
/// given a profile (it would be applied twice); a raw-count table requires
/// one.
pub fn preprocess_table(
    raw: &RawTable,
    profile: Option<&CalibrationProfile>,
    definition: StrideDefinition,
    events: &EventConfig,
    padded_length: usize,
) -> Result<PreprocessedTable> {
    let calibrated: Vec<RawStride> = if raw.meta.calibrated {
        if profile.is_some() {
            return Err(invalid(
                "table is already calibrated; refusing to apply a profile on top",
            ));
        }
        raw.strides.clone()
    } else {
        let profile = profile.ok_or_else(|| {
            invalid("table holds uncalibrated sensor counts; a calibration profile is required")
        })?;
        raw.strides.iter().map(|s| calibrate(s, profile)).collect::<Result<_>>()?
    };

    let mut recordings: BTreeMap<(String, Foot), Vec<RawStride>> = BTreeMap::new();
    for s in calibrated {
        recordings.entry((s.patient_id.clone(), s.foot)).or_default().push(s);
    }

    let mut out = Vec::new();
    for recording in recordings.into_values() {
        let mut recording = recording;
        recording.sort_by_key(|s| s.start);
        for stride in redefine_strides(&recording, definition, events)? {
            out.push(normalize_and_pad(&stride, definition, raw.meta.ranges, padded_length)?);
        }
    }

    let meta = TableMeta { calibrated: true, ..raw.meta.clone() };
    PreprocessedTable::new(meta, definition, padded_length, out)
}

/// The `key = value` record written next to every run's outputs: tool
/// version, subcommand, seed, full configuration and dataset hashes — enough
/// to reproduce the artifacts exactly.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pairs: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(subcommand: &str) -> Self {
        let mut m = Self::default();
        m.push("tool", env!("CARGO_PKG_NAME"));
        m.push("version", env!("CARGO_PKG_VERSION"));
        m.push("subcommand", subcommand);
        m
    }

    /// Records one setting. Keys must be unique within a manifest.
    pub fn push(&mut self, key: &str, value: impl Display) -> &mut Self {
        debug_assert!(
            self.pairs.iter().all(|(k, _)| k != key),
            "duplicate manifest key {key:?}"
        );
        self.pairs.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push_network(&mut self, net: &NetworkConfig) -> &mut Self {
        self.push("net_input_length", net.input_length)
            .push("net_input_channels", net.input_channels)
            .push("net_conv1_kernels", net.conv1_kernels)
            .push("net_conv1_kernel_len", net.conv1_kernel_len)
            .push("net_conv2_kernels", net.conv2_kernels)
            .push("net_conv2_kernel_len", net.conv2_kernel_len)
            .push("net_pool_width", net.pool_width)
            .push("net_hidden_units", net.hidden_units)
            .push("net_p_drop", net.p_drop)
    }

    pub fn push_train(&mut self, cfg: &TrainConfig) -> &mut Self {
        self.push("train_iterations", cfg.iterations)
            .push("train_batch_size", cfg.batch_size)
            .push("train_learning_rate", cfg.learning_rate)
            .push("train_beta1", cfg.beta1)
            .push("train_beta2", cfg.beta2)
            .push("train_epsilon", cfg.epsilon)
            .push("train_log_every", cfg.log_every)
            .push("train_seed", cfg.seed)
    }

    pub fn push_events(&mut self, cfg: &EventConfig) -> &mut Self {
        self.push("events_midstance_window", cfg.midstance_window)
            .push("events_heelstrike_search_from", cfg.heelstrike_search_from)
    }

    pub fn push_meta(&mut self, meta: &TableMeta) -> &mut Self {
        self.push("table_sample_rate_hz", meta.sample_rate_hz)
            .push("table_accel_range_g", meta.ranges.accel_g)
            .push("table_gyro_range_dps", meta.ranges.gyro_dps)
            .push("table_source", &meta.source)
            .push("table_calibrated", meta.calibrated)
    }

    /// Records a dataset directory the run read or wrote: its path and the
    /// content hash over every file in it. Call for outputs only after they
    /// are written.
    pub fn push_dataset(&mut self, role: &str, dir: &Path) -> Result<&mut Self> {
        let hash = dataset_hash(dir)?;
        self.push(&format!("{role}_path"), dir.display());
        self.push(&format!("{role}_hash"), hash);
        Ok(self)
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# run manifest\n");
        let _ = writeln!(out, "{}", kv::render_kv(&self.pairs).trim_end());
        out
    }

    /// Atomic write (temp file + rename), like every other artifact.
    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}
