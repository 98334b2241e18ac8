//! On-disk dataset container and synthetic data generation.
//!
//! A dataset is a directory:
//!
//! ```text
//! <dir>/meta.txt                       key = value metadata
//! <dir>/strides.csv                    stride index
//! <dir>/samples/<patient>_<foot>.csv   one CSV per recording
//! ```
//!
//! Raw tables index strides as `patient_id,foot,stride_id,start,end,
//! reference_length_cm` with sample rows `patient_id,foot,stride_id,
//! sample_idx,ax,ay,az,gx,gy,gz` in g and °/s on the recording clock.
//! Preprocessed tables index `patient_id,foot,stride_id,reference_length_cm,
//! unpadded_length` and store only the unpadded normalized samples (the zero
//! tail is reconstructed on load). Floats are written in shortest
//! round-trip decimal form, so save → load → save is byte-identical.

mod synth;

pub use synth::{
    generate_synthetic, swing_integral_cm, LengthDistribution, SynthConfig, SYNTH_SAMPLE_RATE_HZ,
};

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::ioutil::write_atomic;
use crate::kv;
use crate::preprocess::{Foot, PreprocessedStride, RawStride, SensorRanges, StrideDefinition};
use crate::tensor::Signal;

const META_FILE: &str = "meta.txt";
const INDEX_FILE: &str = "strides.csv";
const SAMPLES_DIR: &str = "samples";
const RAW_INDEX_HEADER: [&str; 6] =
    ["patient_id", "foot", "stride_id", "start", "end", "reference_length_cm"];
const PRE_INDEX_HEADER: [&str; 5] =
    ["patient_id", "foot", "stride_id", "reference_length_cm", "unpadded_length"];
const SAMPLES_HEADER: [&str; 10] =
    ["patient_id", "foot", "stride_id", "sample_idx", "ax", "ay", "az", "gx", "gy", "gz"];

/// Dataset-level metadata shared by raw and preprocessed tables.
#[derive(Debug, Clone, PartialEq)]
pub struct TableMeta {
    pub sample_rate_hz: f64,
    pub ranges: SensorRanges,
    /// Free-form provenance tag, e.g. `synthetic`.
    pub source: String,
    /// Whether device units have already been mapped to g and °/s.
    pub calibrated: bool,
}

/// Which kind of table a directory holds, read from `meta.txt` alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Raw,
    Preprocessed,
}

/// Counters for rows the loader tolerated rather than rejected.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    /// Index rows with an empty reference length; their strides are skipped.
    pub skipped_missing_reference: usize,
}

/// Annotated strides with their sample data, before preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub meta: TableMeta,
    pub strides: Vec<RawStride>,
}

/// Normalized, padded strides of one stride definition.
#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessedTable {
    pub meta: TableMeta,
    pub definition: StrideDefinition,
    pub padded_length: usize,
    pub strides: Vec<PreprocessedStride>,
}

/// Reads the directory's `meta.txt` and reports which table kind it holds.
pub fn table_kind(dir: &Path) -> Result<TableKind> {
    let path = dir.join(META_FILE);
    let map = kv::read_kv_file(&path)?;
    match meta_value(&map, "kind", &path)?.as_str() {
        "raw" => Ok(TableKind::Raw),
        "preprocessed" => Ok(TableKind::Preprocessed),
        other => Err(parse_err(&path, 0, format!("unknown table kind {other:?}"))),
    }
}

impl RawTable {
    pub fn new(meta: TableMeta, strides: Vec<RawStride>) -> Result<Self> {
        for s in &strides {
            validate_patient_id(&s.patient_id)?;
            if s.sample_rate != meta.sample_rate_hz {
                return Err(invalid(format!(
                    "stride {} of patient {} has sample rate {}, table says {}",
                    s.stride_id, s.patient_id, s.sample_rate, meta.sample_rate_hz
                )));
            }
        }
        Ok(Self { meta, strides })
    }

    /// Distinct patient ids in sorted order.
    pub fn patient_ids(&self) -> Vec<String> {
        self.strides.iter().map(|s| s.patient_id.clone()).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let mut meta_pairs = vec![("kind".to_string(), "raw".to_string())];
        push_meta_pairs(&mut meta_pairs, &self.meta);

        let mut index = csv_writer(&RAW_INDEX_HEADER);
        let mut recordings: BTreeMap<(String, Foot), Vec<&RawStride>> = BTreeMap::new();
        for s in &self.strides {
            index.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.patient_id, s.foot, s.stride_id, s.start, s.end, s.reference_length_cm
            ));
            recordings.entry((s.patient_id.clone(), s.foot)).or_default().push(s);
        }

        let mut files = Vec::new();
        for ((patient, foot), strides) in &recordings {
            let mut body = csv_writer(&SAMPLES_HEADER);
            for s in strides {
                for t in 0..s.num_samples() {
                    body.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{}\n",
                        patient,
                        foot,
                        s.stride_id,
                        s.start + t,
                        s.accel.get(0, t),
                        s.accel.get(1, t),
                        s.accel.get(2, t),
                        s.gyro.get(0, t),
                        s.gyro.get(1, t),
                        s.gyro.get(2, t)
                    ));
                }
            }
            files.push((recording_file_name(patient, *foot), body));
        }
        write_table_dir(dir, &meta_pairs, &index, &files)
    }

    /// Loads a raw table; index rows with an empty reference length are
    /// skipped and counted rather than rejected.
    pub fn load(dir: &Path) -> Result<(Self, LoadStats)> {
        let meta_path = dir.join(META_FILE);
        let map = kv::read_kv_file(&meta_path)?;
        expect_kind(&map, "raw", &meta_path)?;
        let meta = parse_meta(&map, &meta_path)?;

        let index_path = dir.join(INDEX_FILE);
        let rows = read_index_rows(&index_path, &RAW_INDEX_HEADER)?;
        let mut stats = LoadStats::default();
        let mut entries = Vec::new();
        for row in &rows {
            let reference: Option<f64> = if row.fields[5].is_empty() {
                None
            } else {
                Some(parse_field(&row.fields[5], "reference_length_cm", &index_path, row.line)?)
            };
            if reference.is_none() {
                stats.skipped_missing_reference += 1;
            }
            entries.push(RawIndexEntry {
                patient: row.fields[0].clone(),
                foot: parse_foot(&row.fields[1], &index_path, row.line)?,
                stride_id: parse_field(&row.fields[2], "stride_id", &index_path, row.line)?,
                start: parse_field(&row.fields[3], "start", &index_path, row.line)?,
                end: parse_field(&row.fields[4], "end", &index_path, row.line)?,
                reference,
                line: row.line,
            });
        }

        let mut recordings: BTreeMap<(String, Foot), Vec<&RawIndexEntry>> = BTreeMap::new();
        for e in &entries {
            recordings.entry((e.patient.clone(), e.foot)).or_default().push(e);
        }
        expect_sample_files(dir, recordings.keys())?;

        let mut by_key: BTreeMap<(String, Foot, u32), RawStride> = BTreeMap::new();
        for ((patient, foot), recording_entries) in &recordings {
            let path = dir.join(SAMPLES_DIR).join(recording_file_name(patient, *foot));
            let mut groups = read_sample_groups(&path, patient, *foot)?;
            for e in recording_entries {
                let Some(rows) = groups.remove(&e.stride_id) else {
                    return Err(parse_err(
                        &index_path,
                        e.line,
                        format!("no samples for stride {} of {patient}/{foot}", e.stride_id),
                    ));
                };
                if e.reference.is_none() {
                    continue; // skipped stride; its samples are simply unused
                }
                if e.end <= e.start || rows.len() != e.end - e.start {
                    return Err(parse_err(
                        &index_path,
                        e.line,
                        format!(
                            "stride {} spans [{}, {}) but has {} sample rows",
                            e.stride_id,
                            e.start,
                            e.end,
                            rows.len()
                        ),
                    ));
                }
                let mut accel = Signal::zeros(3, rows.len());
                let mut gyro = Signal::zeros(3, rows.len());
                for (t, row) in rows.iter().enumerate() {
                    if row.sample_idx != e.start + t {
                        return Err(parse_err(
                            &path,
                            row.line,
                            format!(
                                "stride {} sample indices must run {}..{} contiguously, found {}",
                                e.stride_id, e.start, e.end, row.sample_idx
                            ),
                        ));
                    }
                    for c in 0..3 {
                        accel.row_mut(c)[t] = row.values[c];
                        gyro.row_mut(c)[t] = row.values[c + 3];
                    }
                }
                let stride = RawStride::new(
                    patient.clone(),
                    *foot,
                    e.stride_id,
                    e.start,
                    meta.sample_rate_hz,
                    e.reference.unwrap(),
                    accel,
                    gyro,
                )?;
                by_key.insert((patient.clone(), *foot, e.stride_id), stride);
            }
            if let Some((&stray, rows)) = groups.iter().next() {
                return Err(parse_err(
                    &path,
                    rows.first().map_or(0, |r| r.line),
                    format!("samples reference stride {stray}, which the index does not list"),
                ));
            }
        }

        // Rebuild in index order, skipping reference-less entries.
        let strides = entries
            .iter()
            .filter(|e| e.reference.is_some())
            .map(|e| by_key.remove(&(e.patient.clone(), e.foot, e.stride_id)).expect("built above"))
            .collect();
        Ok((Self::new(meta, strides)?, stats))
    }
}

impl PreprocessedTable {
    pub fn new(
        meta: TableMeta,
        definition: StrideDefinition,
        padded_length: usize,
        strides: Vec<PreprocessedStride>,
    ) -> Result<Self> {
        for s in &strides {
            validate_patient_id(&s.patient_id)?;
            if s.definition != definition {
                return Err(invalid(format!(
                    "stride {} of patient {} is {}, table says {}",
                    s.stride_id, s.patient_id, s.definition, definition
                )));
            }
            if s.signal.length() != padded_length {
                return Err(invalid(format!(
                    "stride {} of patient {} is padded to {}, table says {}",
                    s.stride_id,
                    s.patient_id,
                    s.signal.length(),
                    padded_length
                )));
            }
        }
        Ok(Self { meta, definition, padded_length, strides })
    }

    pub fn patient_ids(&self) -> Vec<String> {
        self.strides.iter().map(|s| s.patient_id.clone()).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let mut meta_pairs = vec![("kind".to_string(), "preprocessed".to_string())];
        push_meta_pairs(&mut meta_pairs, &self.meta);
        meta_pairs.push(("definition".into(), self.definition.to_string()));
        meta_pairs.push(("padded_length".into(), self.padded_length.to_string()));

        let mut index = csv_writer(&PRE_INDEX_HEADER);
        let mut recordings: BTreeMap<(String, Foot), Vec<&PreprocessedStride>> = BTreeMap::new();
        for s in &self.strides {
            index.push_str(&format!(
                "{},{},{},{},{}\n",
                s.patient_id, s.foot, s.stride_id, s.reference_length_cm, s.unpadded_length
            ));
            recordings.entry((s.patient_id.clone(), s.foot)).or_default().push(s);
        }

        let mut files = Vec::new();
        for ((patient, foot), strides) in &recordings {
            let mut body = csv_writer(&SAMPLES_HEADER);
            for s in strides {
                for t in 0..s.unpadded_length {
                    body.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{}\n",
                        patient,
                        foot,
                        s.stride_id,
                        t,
                        s.signal.get(0, t),
                        s.signal.get(1, t),
                        s.signal.get(2, t),
                        s.signal.get(3, t),
                        s.signal.get(4, t),
                        s.signal.get(5, t)
                    ));
                }
            }
            files.push((recording_file_name(patient, *foot), body));
        }
        write_table_dir(dir, &meta_pairs, &index, &files)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let meta_path = dir.join(META_FILE);
        let map = kv::read_kv_file(&meta_path)?;
        expect_kind(&map, "preprocessed", &meta_path)?;
        let meta = parse_meta(&map, &meta_path)?;
        let definition = StrideDefinition::parse(meta_value(&map, "definition", &meta_path)?)
            .map_err(|e| parse_err(&meta_path, 0, e.to_string()))?;
        let padded_length: usize =
            parse_field(meta_value(&map, "padded_length", &meta_path)?, "padded_length", &meta_path, 0)?;

        let index_path = dir.join(INDEX_FILE);
        let rows = read_index_rows(&index_path, &PRE_INDEX_HEADER)?;
        struct Entry {
            patient: String,
            foot: Foot,
            stride_id: u32,
            reference: f64,
            unpadded: usize,
            line: u64,
        }
        let mut entries = Vec::new();
        for row in &rows {
            entries.push(Entry {
                patient: row.fields[0].clone(),
                foot: parse_foot(&row.fields[1], &index_path, row.line)?,
                stride_id: parse_field(&row.fields[2], "stride_id", &index_path, row.line)?,
                reference: parse_field(&row.fields[3], "reference_length_cm", &index_path, row.line)?,
                unpadded: parse_field(&row.fields[4], "unpadded_length", &index_path, row.line)?,
                line: row.line,
            });
        }

        let mut recordings: BTreeMap<(String, Foot), Vec<&Entry>> = BTreeMap::new();
        for e in &entries {
            recordings.entry((e.patient.clone(), e.foot)).or_default().push(e);
        }
        expect_sample_files(dir, recordings.keys())?;

        let mut by_key: BTreeMap<(String, Foot, u32), PreprocessedStride> = BTreeMap::new();
        for ((patient, foot), recording_entries) in &recordings {
            let path = dir.join(SAMPLES_DIR).join(recording_file_name(patient, *foot));
            let mut groups = read_sample_groups(&path, patient, *foot)?;
            for e in recording_entries {
                let Some(rows) = groups.remove(&e.stride_id) else {
                    return Err(parse_err(
                        &index_path,
                        e.line,
                        format!("no samples for stride {} of {patient}/{foot}", e.stride_id),
                    ));
                };
                if rows.len() != e.unpadded {
                    return Err(parse_err(
                        &index_path,
                        e.line,
                        format!(
                            "stride {} declares {} samples but has {} rows",
                            e.stride_id,
                            e.unpadded,
                            rows.len()
                        ),
                    ));
                }
                let mut signal = Signal::zeros(6, padded_length);
                for (t, row) in rows.iter().enumerate() {
                    if row.sample_idx != t {
                        return Err(parse_err(
                            &path,
                            row.line,
                            format!(
                                "stride {} sample indices must run 0..{} contiguously, found {}",
                                e.stride_id, e.unpadded, row.sample_idx
                            ),
                        ));
                    }
                    for c in 0..6 {
                        signal.row_mut(c)[t] = row.values[c];
                    }
                }
                let stride = PreprocessedStride::new(
                    patient.clone(),
                    *foot,
                    e.stride_id,
                    definition,
                    e.reference,
                    e.unpadded,
                    signal,
                )?;
                by_key.insert((patient.clone(), *foot, e.stride_id), stride);
            }
            if let Some((&stray, rows)) = groups.iter().next() {
                return Err(parse_err(
                    &path,
                    rows.first().map_or(0, |r| r.line),
                    format!("samples reference stride {stray}, which the index does not list"),
                ));
            }
        }

        let strides = entries
            .iter()
            .map(|e| by_key.remove(&(e.patient.clone(), e.foot, e.stride_id)).expect("built above"))
            .collect();
        Self::new(meta, definition, padded_length, strides)
    }
}

/// Conventional file name for the run manifest written next to a table.
/// Excluded from [`dataset_hash`], so recording a hash in the manifest does
/// not change the hash.
pub const MANIFEST_FILE: &str = "manifest.txt";

/// SHA-256 over every file under `dir` (relative path, length, bytes), in
/// sorted path order, skipping the run manifest. Identifies a dataset in run
/// manifests.
pub fn dataset_hash(dir: &Path) -> Result<String> {
    use sha2::{Digest, Sha256};
    let mut files = Vec::new();
    collect_files(dir, Path::new(""), &mut files)?;
    files.retain(|f| f != MANIFEST_FILE);
    files.sort();
    let mut hasher = Sha256::new();
    for rel in &files {
        hasher.update(rel.as_bytes());
        hasher.update([0u8]);
        let bytes = std::fs::read(dir.join(rel))?;
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    let mut out = String::with_capacity(64);
    for b in hasher.finalize() {
        let _ = std::fmt::Write::write_fmt(&mut out, format_args!("{b:02x}"));
    }
    Ok(out)
}

fn collect_files(root: &Path, rel: &Path, out: &mut Vec<String>) -> Result<()> {
    let mut names: Vec<_> = std::fs::read_dir(root.join(rel))?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.file_name())
        .collect();
    names.sort();
    for name in names {
        let rel_child = rel.join(&name);
        if root.join(&rel_child).is_dir() {
            collect_files(root, &rel_child, out)?;
        } else {
            // Forward slashes keep the hash path-separator independent.
            let mut s = String::new();
            for comp in rel_child.components() {
                if !s.is_empty() {
                    s.push('/');
                }
                s.push_str(&comp.as_os_str().to_string_lossy());
            }
            out.push(s);
        }
    }
    Ok(())
}

// ---- shared plumbing --------------------------------------------------------

fn validate_patient_id(id: &str) -> Result<()> {
    if id.is_empty() {
        return Err(invalid("patient id must be non-empty"));
    }
    if !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
        return Err(invalid(format!(
            "patient id {id:?} may only contain ASCII letters, digits, '-' and '_' (it names files)"
        )));
    }
    Ok(())
}

fn recording_file_name(patient: &str, foot: Foot) -> String {
    format!("{patient}_{foot}.csv")
}

fn push_meta_pairs(pairs: &mut Vec<(String, String)>, meta: &TableMeta) {
    pairs.push(("source".into(), meta.source.clone()));
    pairs.push(("sample_rate_hz".into(), meta.sample_rate_hz.to_string()));
    pairs.push(("accel_range_g".into(), meta.ranges.accel_g.to_string()));
    pairs.push(("gyro_range_dps".into(), meta.ranges.gyro_dps.to_string()));
    pairs.push(("calibrated".into(), meta.calibrated.to_string()));
}

fn parse_meta(map: &BTreeMap<String, String>, path: &Path) -> Result<TableMeta> {
    let sample_rate_hz: f64 =
        parse_field(meta_value(map, "sample_rate_hz", path)?, "sample_rate_hz", path, 0)?;
    let accel_g: f64 = parse_field(meta_value(map, "accel_range_g", path)?, "accel_range_g", path, 0)?;
    let gyro_dps: f64 =
        parse_field(meta_value(map, "gyro_range_dps", path)?, "gyro_range_dps", path, 0)?;
    let calibrated = match meta_value(map, "calibrated", path)?.as_str() {
        "true" => true,
        "false" => false,
        other => return Err(parse_err(path, 0, format!("calibrated must be true/false, got {other:?}"))),
    };
    if !(sample_rate_hz > 0.0 && accel_g > 0.0 && gyro_dps > 0.0) {
        return Err(parse_err(path, 0, "sample rate and sensor ranges must be positive".into()));
    }
    Ok(TableMeta {
        sample_rate_hz,
        ranges: SensorRanges { accel_g, gyro_dps },
        source: meta_value(map, "source", path)?.clone(),
        calibrated,
    })
}

fn expect_kind(map: &BTreeMap<String, String>, want: &str, path: &Path) -> Result<()> {
    let kind = meta_value(map, "kind", path)?;
    if kind != want {
        return Err(parse_err(path, 0, format!("table kind is {kind:?}, expected {want:?}")));
    }
    Ok(())
}

fn meta_value<'m>(map: &'m BTreeMap<String, String>, key: &str, path: &Path) -> Result<&'m String> {
    map.get(key).ok_or_else(|| parse_err(path, 0, format!("missing key {key:?}")))
}

fn parse_err(path: &Path, line: u64, msg: String) -> Error {
    Error::Parse { path: path.to_path_buf(), line, msg }
}

fn parse_field<T: std::str::FromStr>(raw: &str, name: &str, path: &Path, line: u64) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse()
        .map_err(|e: T::Err| parse_err(path, line, format!("column {name}: {e} (value {raw:?})")))
}

fn parse_foot(raw: &str, path: &Path, line: u64) -> Result<Foot> {
    Foot::parse(raw).map_err(|e| parse_err(path, line, e.to_string()))
}

fn csv_writer(header: &[&str]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    s
}

fn write_table_dir(
    dir: &Path,
    meta_pairs: &[(String, String)],
    index: &str,
    files: &[(String, String)],
) -> Result<()> {
    let samples = dir.join(SAMPLES_DIR);
    std::fs::create_dir_all(&samples)?;
    // Drop recordings from a previous save so the directory holds exactly
    // this table.
    for entry in std::fs::read_dir(&samples)? {
        let entry = entry?;
        if entry.path().extension().is_some_and(|e| e == "csv") {
            std::fs::remove_file(entry.path())?;
        }
    }
    write_atomic(&dir.join(META_FILE), kv::render_kv(meta_pairs).as_bytes())?;
    write_atomic(&dir.join(INDEX_FILE), index.as_bytes())?;
    for (name, body) in files {
        write_atomic(&samples.join(name), body.as_bytes())?;
    }
    Ok(())
}

struct CsvRow {
    fields: Vec<String>,
    line: u64,
}

struct RawIndexEntry {
    patient: String,
    foot: Foot,
    stride_id: u32,
    start: usize,
    end: usize,
    reference: Option<f64>,
    line: u64,
}

struct SampleRow {
    sample_idx: usize,
    values: [f64; 6],
    line: u64,
}

/// Reads a CSV, checks the exact header, and returns rows with line numbers.
fn read_index_rows(path: &Path, header: &[&str]) -> Result<Vec<CsvRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| parse_err(path, 0, e.to_string()))?;
    let got = reader.headers().map_err(|e| parse_err(path, 0, e.to_string()))?;
    if got.iter().ne(header.iter().copied()) {
        return Err(parse_err(
            path,
            1,
            format!("header must be {}, got {}", header.join(","), got.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(parse_err(
                path,
                line,
                format!("expected {} columns, found {}", header.len(), record.len()),
            ));
        }
        rows.push(CsvRow { fields: record.iter().map(str::to_string).collect(), line });
    }
    Ok(rows)
}

/// Reads one recording's samples, grouped by stride id in file order.
fn read_sample_groups(
    path: &Path,
    patient: &str,
    foot: Foot,
) -> Result<BTreeMap<u32, Vec<SampleRow>>> {
    let rows = read_index_rows(path, &SAMPLES_HEADER)?;
    let mut groups: BTreeMap<u32, Vec<SampleRow>> = BTreeMap::new();
    for row in rows {
        if row.fields[0] != patient || parse_foot(&row.fields[1], path, row.line)? != foot {
            return Err(parse_err(
                path,
                row.line,
                format!(
                    "row belongs to {}/{}, file holds recording {patient}/{foot}",
                    row.fields[0], row.fields[1]
                ),
            ));
        }
        let stride_id: u32 = parse_field(&row.fields[2], "stride_id", path, row.line)?;
        let sample_idx: usize = parse_field(&row.fields[3], "sample_idx", path, row.line)?;
        let mut values = [0.0; 6];
        for (c, v) in values.iter_mut().enumerate() {
            *v = parse_field(&row.fields[4 + c], SAMPLES_HEADER[4 + c], path, row.line)?;
        }
        groups.entry(stride_id).or_default().push(SampleRow { sample_idx, values, line: row.line });
    }
    Ok(groups)
}

/// The samples directory must hold exactly the recordings the index names.
fn expect_sample_files<'k>(
    dir: &Path,
    keys: impl Iterator<Item = &'k (String, Foot)>,
) -> Result<()> {
    let expected: BTreeSet<String> =
        keys.map(|(p, f)| recording_file_name(p, *f)).collect();
    let samples = dir.join(SAMPLES_DIR);
    if !samples.exists() {
        if expected.is_empty() {
            return Ok(());
        }
        return Err(parse_err(&samples, 0, "samples directory is missing".into()));
    }
    let mut found = BTreeSet::new();
    for entry in std::fs::read_dir(&samples)? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        found.insert(name);
    }
    for name in &expected {
        if !found.contains(name) {
            return Err(parse_err(&samples.join(name), 0, "recording file is missing".into()));
        }
    }
    for name in &found {
        if !expected.contains(name) {
            return Err(parse_err(
                &samples.join(name),
                0,
                "recording file is not referenced by the stride index".into(),
            ));
        }
    }
    Ok(())
}
