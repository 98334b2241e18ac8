//! Patient-wise k-fold cross-validation, the pooled error-statistics report,
//! and agreement exports (CSV and SVG).

pub mod plot;
pub mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{degenerate, invalid, Result};
use crate::ioutil::write_atomic;
use crate::network::{predict, NetworkConfig, NetworkParams};
use crate::preprocess::{PreprocessedStride, StrideDefinition};
use crate::tensor::SeededRng;
use crate::training::{train_refs, TrainConfig, TrainLog};
use stats::{
    abs_error_stats, bland_altman, error_regression, relative_precision, signed_error_stats,
    spearman_cc, BlandAltman,
};

/// One train/test partition of the patient ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    pub fold: usize,
    pub train_patients: Vec<String>,
    pub test_patients: Vec<String>,
}

/// Partitions distinct patient ids into `k` test groups after one seeded
/// shuffle. The first `n mod k` folds hold `⌈n/k⌉` patients, the rest `⌊n/k⌋`;
/// every patient lands in exactly one test set.
pub fn patientwise_kfold(
    patients: &[String],
    k: usize,
    rng: &mut SeededRng,
) -> Result<Vec<FoldSplit>> {
    let distinct: BTreeSet<&String> = patients.iter().collect();
    if distinct.len() != patients.len() {
        return Err(invalid("patient ids must be distinct"));
    }
    if k < 2 {
        return Err(invalid("cross-validation needs k ≥ 2; k = 1 holds nothing out"));
    }
    if patients.len() < k {
        return Err(invalid(format!(
            "{} patients cannot fill {k} folds",
            patients.len()
        )));
    }
    let mut shuffled = patients.to_vec();
    rng.shuffle(&mut shuffled);
    let n = shuffled.len();
    let (quota, remainder) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for fold in 0..k {
        let size = quota + usize::from(fold < remainder);
        let mut test: Vec<String> = shuffled[start..start + size].to_vec();
        let mut train: Vec<String> =
            shuffled[..start].iter().chain(&shuffled[start + size..]).cloned().collect();
        start += size;
        test.sort();
        train.sort();
        folds.push(FoldSplit { fold, train_patients: train, test_patients: test });
    }
    Ok(folds)
}

/// One held-out prediction from cross-validation.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub patient_id: String,
    pub definition: StrideDefinition,
    pub predicted_cm: f64,
    pub reference_cm: f64,
    pub fold: usize,
}

/// Error statistics for a single patient's pooled predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct PatientSummary {
    pub patient_id: String,
    pub strides: usize,
    /// Mean signed error (cm); 0 strides cannot occur.
    pub accuracy_cm: f64,
    /// Sample standard deviation of the signed error (cm); 0 for one stride.
    pub precision_cm: f64,
}

/// The pooled statistics battery over a set of predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub definition: StrideDefinition,
    pub strides: usize,
    pub mean_predicted_cm: f64,
    pub mean_reference_cm: f64,
    /// Mean signed error (cm).
    pub accuracy_cm: f64,
    /// Sample standard deviation of the signed error (cm).
    pub precision_cm: f64,
    /// Precision divided by the mean reference length.
    pub relative_precision: f64,
    pub abs_accuracy_cm: f64,
    pub abs_precision_cm: f64,
    pub spearman: f64,
    pub per_patient: Vec<PatientSummary>,
    /// Agreement points and ±1.96σ limits, in cm.
    pub bland_altman: BlandAltman,
    /// OLS of the difference on the agreement value: slope is unitless,
    /// the intercept is in cm.
    pub regression_slope: f64,
    pub regression_intercept_cm: f64,
}

/// Computes the full statistics battery over pooled predictions of a single
/// stride definition.
pub fn evaluate(records: &[PredictionRecord]) -> Result<EvaluationReport> {
    if records.len() < 2 {
        return Err(invalid("need at least 2 predictions to estimate precision"));
    }
    let definition = records[0].definition;
    if records.iter().any(|r| r.definition != definition) {
        return Err(invalid("records mix stride definitions; evaluate one definition at a time"));
    }
    let y: Vec<f64> = records.iter().map(|r| r.predicted_cm).collect();
    let y_ref: Vec<f64> = records.iter().map(|r| r.reference_cm).collect();
    let (accuracy_cm, precision_cm) = signed_error_stats(&y, &y_ref)?;
    let relative = relative_precision(&y, &y_ref)?;
    let (abs_accuracy_cm, abs_precision_cm) = abs_error_stats(&y, &y_ref)?;
    let spearman = spearman_cc(&y, &y_ref)?;
    let ba = bland_altman(&y, &y_ref)?;
    let (regression_slope, regression_intercept_cm) = error_regression(&y, &y_ref)?;

    let mut by_patient: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in records {
        by_patient.entry(&r.patient_id).or_default().push(r.predicted_cm - r.reference_cm);
    }
    let per_patient = by_patient
        .into_iter()
        .map(|(id, errors)| PatientSummary {
            patient_id: id.to_string(),
            strides: errors.len(),
            accuracy_cm: stats::mean(&errors),
            precision_cm: stats::sample_std(&errors),
        })
        .collect();

    Ok(EvaluationReport {
        definition,
        strides: records.len(),
        mean_predicted_cm: stats::mean(&y),
        mean_reference_cm: stats::mean(&y_ref),
        accuracy_cm,
        precision_cm,
        relative_precision: relative,
        abs_accuracy_cm,
        abs_precision_cm,
        spearman,
        per_patient,
        bland_altman: ba,
        regression_slope,
        regression_intercept_cm,
    })
}

impl EvaluationReport {
    /// Two-column `statistic,value` CSV of the scalar battery.
    pub fn stats_csv(&self) -> String {
        let mut out = String::from("statistic,value\n");
        let mut row = |name: &str, value: String| {
            let _ = writeln!(out, "{name},{value}");
        };
        row("definition", self.definition.to_string());
        row("strides", self.strides.to_string());
        row("mean_predicted_cm", self.mean_predicted_cm.to_string());
        row("mean_reference_cm", self.mean_reference_cm.to_string());
        row("accuracy_cm", self.accuracy_cm.to_string());
        row("precision_cm", self.precision_cm.to_string());
        row("relative_precision", self.relative_precision.to_string());
        row("abs_accuracy_cm", self.abs_accuracy_cm.to_string());
        row("abs_precision_cm", self.abs_precision_cm.to_string());
        row("spearman", self.spearman.to_string());
        row("ba_lower_limit_cm", self.bland_altman.lower_limit.to_string());
        row("ba_upper_limit_cm", self.bland_altman.upper_limit.to_string());
        row("regression_slope", self.regression_slope.to_string());
        row("regression_intercept_cm", self.regression_intercept_cm.to_string());
        out
    }

    /// Per-patient error table as CSV.
    pub fn per_patient_csv(&self) -> String {
        let mut out = String::from("patient_id,strides,accuracy_cm,precision_cm\n");
        for p in &self.per_patient {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                p.patient_id, p.strides, p.accuracy_cm, p.precision_cm
            );
        }
        out
    }

    /// Agreement points as CSV, converted from cm to meters.
    pub fn points_csv(&self) -> String {
        let mut out = String::from("agreement_m,difference_m\n");
        for p in &self.bland_altman.points {
            let _ = writeln!(out, "{},{}", p.agreement / 100.0, p.difference / 100.0);
        }
        out
    }
}

/// Pooled predictions as CSV, one row per held-out stride.
pub fn predictions_csv(records: &[PredictionRecord]) -> String {
    let mut out = String::from("patient_id,definition,fold,predicted_cm,reference_cm\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.patient_id, r.definition, r.fold, r.predicted_cm, r.reference_cm
        );
    }
    out
}

/// Fold assignments as CSV, one row per (fold, patient): `role` is `train`
/// or `test`.
pub fn folds_csv(folds: &[FoldSplit]) -> String {
    let mut out = String::from("fold,role,patient_id\n");
    for f in folds {
        for p in &f.train_patients {
            let _ = writeln!(out, "{},train,{}", f.fold, p);
        }
        for p in &f.test_patients {
            let _ = writeln!(out, "{},test,{}", f.fold, p);
        }
    }
    out
}

/// Runs a trained network over strides and pairs each prediction with its
/// reference, tagged with `fold` (use 0 for a single-split evaluation).
pub fn predict_records(
    params: &NetworkParams,
    strides: &[PreprocessedStride],
    fold: usize,
) -> Result<Vec<PredictionRecord>> {
    strides
        .iter()
        .map(|s| {
            Ok(PredictionRecord {
                patient_id: s.patient_id.clone(),
                definition: s.definition,
                predicted_cm: predict(params, &s.signal)?,
                reference_cm: s.reference_length_cm,
                fold,
            })
        })
        .collect()
}

/// Writes a report's full artifact set into `dir`: pooled statistics,
/// per-patient table, raw predictions, agreement points (meters) and the
/// rendered agreement scatter.
pub fn write_report(
    dir: &Path,
    report: &EvaluationReport,
    records: &[PredictionRecord],
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_atomic(&dir.join("stats.csv"), report.stats_csv().as_bytes())?;
    write_atomic(&dir.join("per_patient.csv"), report.per_patient_csv().as_bytes())?;
    write_atomic(&dir.join("predictions.csv"), predictions_csv(records).as_bytes())?;
    write_atomic(&dir.join("bland_altman_points.csv"), report.points_csv().as_bytes())?;
    write_atomic(&dir.join("bland_altman.svg"), plot::bland_altman_svg(report).as_bytes())?;
    Ok(())
}

/// Everything cross-validation produces: the pooled report, the raw
/// per-stride predictions, the fold assignments and each fold's training
/// curve.
#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub report: EvaluationReport,
    pub records: Vec<PredictionRecord>,
    pub folds: Vec<FoldSplit>,
    pub fold_logs: Vec<TrainLog>,
}

/// Patient-wise k-fold cross-validation: trains one network per fold on that
/// fold's training patients, predicts its held-out strides, and pools all
/// predictions into one report.
///
/// The fold shuffle and each fold's training run draw seeds derived from
/// `train_cfg.seed`, so the whole procedure is reproducible from one number.
pub fn cross_validate(
    dataset: &[PreprocessedStride],
    definition: StrideDefinition,
    net_config: NetworkConfig,
    train_cfg: &TrainConfig,
    k: usize,
) -> Result<CrossValidation> {
    let strides: Vec<&PreprocessedStride> =
        dataset.iter().filter(|s| s.definition == definition).collect();
    if strides.is_empty() {
        return Err(invalid(format!("dataset holds no {definition} strides")));
    }
    let patients: Vec<String> = strides
        .iter()
        .map(|s| s.patient_id.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let master = SeededRng::new(train_cfg.seed);
    let mut shuffle_rng = master.derive(0);
    let folds = patientwise_kfold(&patients, k, &mut shuffle_rng)?;

    let mut records = Vec::with_capacity(strides.len());
    let mut fold_logs = Vec::with_capacity(k);
    for split in &folds {
        let train_ids: BTreeSet<&str> =
            split.train_patients.iter().map(String::as_str).collect();
        let test_ids: BTreeSet<&str> =
            split.test_patients.iter().map(String::as_str).collect();
        let train_set: Vec<&PreprocessedStride> = strides
            .iter()
            .copied()
            .filter(|s| train_ids.contains(s.patient_id.as_str()))
            .collect();
        let test_set: Vec<&PreprocessedStride> = strides
            .iter()
            .copied()
            .filter(|s| test_ids.contains(s.patient_id.as_str()))
            .collect();
        if test_set.is_empty() {
            return Err(degenerate(format!("fold {} holds no test strides", split.fold)));
        }

        let fold_cfg =
            TrainConfig { seed: master.derive(1 + split.fold as u64).seed(), ..*train_cfg };
        let (params, log) = train_refs(&train_set, net_config, &fold_cfg)?;
        fold_logs.push(log);

        for s in &test_set {
            assert!(
                !train_ids.contains(s.patient_id.as_str()),
                "patient {} leaked into the training set of fold {}",
                s.patient_id,
                split.fold
            );
            records.push(PredictionRecord {
                patient_id: s.patient_id.clone(),
                definition,
                predicted_cm: predict(&params, &s.signal)?,
                reference_cm: s.reference_length_cm,
                fold: split.fold,
            });
        }
    }

    let report = evaluate(&records)?;
    Ok(CrossValidation { report, records, folds, fold_logs })
}
