//! Patient-wise cross-validation end to end: no patient's strides appear in
//! both the training and the test side of any fold, and every stride is
//! predicted exactly once by a network that never saw its patient.
//!
//! Produces the pooled statistics report and the Bland-Altman agreement
//! artifacts (points CSV in meters plus a rendered SVG scatter).
//!
//! ```bash
//! cargo run --release --example cross_validation
//! ```

use std::path::PathBuf;

use stridenet::dataset::{generate_synthetic, SynthConfig};
use stridenet::evaluation::{cross_validate, write_report};
use stridenet::network::NetworkConfig;
use stridenet::pipeline::preprocess_table;
use stridenet::preprocess::{EventConfig, StrideDefinition};
use stridenet::tensor::SeededRng;
use stridenet::training::TrainConfig;

fn main() -> stridenet::Result<()> {
    let synth = SynthConfig { patients: 9, strides_per_patient: 6, ..SynthConfig::default() };
    let raw = generate_synthetic(&synth, &mut SeededRng::new(8))?;
    let table =
        preprocess_table(&raw, None, StrideDefinition::MsDtw, &EventConfig::default(), 256)?;

    let cfg = TrainConfig {
        iterations: 600,
        batch_size: 40,
        log_every: 150,
        seed: 4,
        ..TrainConfig::default()
    };
    let folds = 3;
    println!(
        "{}-fold cross-validation over {} strides from {} patients ({} iterations per fold)",
        folds,
        table.strides.len(),
        synth.patients,
        cfg.iterations
    );
    let cv = cross_validate(&table.strides, table.definition, NetworkConfig::compact(), &cfg, folds)?;

    for split in &cv.folds {
        println!(
            "  fold {}: train patients {:?}, test patients {:?}",
            split.fold, split.train_patients, split.test_patients
        );
    }

    let r = &cv.report;
    println!("\npooled over {} held-out predictions:", r.strides);
    println!("  accuracy (mean error)          {:>8.2} cm", r.accuracy_cm);
    println!("  precision (error std)          {:>8.2} cm", r.precision_cm);
    println!("  relative precision             {:>8.2} %", 100.0 * r.relative_precision);
    println!("  |error| mean +- std            {:>8.2} +- {:.2} cm", r.abs_accuracy_cm, r.abs_precision_cm);
    println!("  Spearman rank correlation      {:>8.3}", r.spearman);
    println!(
        "  agreement limits               [{:.2}, {:.2}] cm around {:.2} cm",
        r.bland_altman.lower_limit, r.bland_altman.upper_limit, r.bland_altman.mean_difference
    );
    println!(
        "  error vs agreement regression  slope {:.4}, intercept {:.2} cm",
        r.regression_slope, r.regression_intercept_cm
    );

    let out = PathBuf::from("target/example-artifacts/cross_validation");
    write_report(&out, &cv.report, &cv.records)?;
    println!("\nreport artifacts written to {}:", out.display());
    for f in ["stats.csv", "per_patient.csv", "predictions.csv", "bland_altman_points.csv", "bland_altman.svg"] {
        println!("  {f}");
    }
    Ok(())
}
