//! Train the network on synthetic strides whose true length is a known
//! functional of the gyroscope signal, and watch the training curve drop
//! toward the label noise floor.
//!
//! ```bash
//! cargo run --release --example synthetic_training
//! ```

use std::path::PathBuf;

use stridenet::dataset::{generate_synthetic, SynthConfig};
use stridenet::network::NetworkConfig;
use stridenet::pipeline::preprocess_table;
use stridenet::preprocess::{EventConfig, StrideDefinition};
use stridenet::tensor::SeededRng;
use stridenet::training::{train, TrainConfig};

fn main() -> stridenet::Result<()> {
    // 96 strides with 1 cm Gaussian label noise.
    let synth = SynthConfig { patients: 12, strides_per_patient: 8, ..SynthConfig::default() };
    let raw = generate_synthetic(&synth, &mut SeededRng::new(33))?;
    let table =
        preprocess_table(&raw, None, StrideDefinition::MsDtw, &EventConfig::default(), 256)?;
    println!(
        "training on {} preprocessed strides, label noise {} cm",
        table.strides.len(),
        synth.noise_cm
    );

    // The compact architecture keeps this a coffee-break-free run; the
    // full-size one trains the same way, just slower.
    let net = NetworkConfig::compact();
    let cfg = TrainConfig {
        iterations: 800,
        batch_size: 50,
        log_every: 100,
        seed: 1,
        ..TrainConfig::default()
    };
    let (params, log) = train(&table.strides, net, &cfg)?;

    println!("\n{:>9} {:>12} {:>13}", "iteration", "loss", "precision cm");
    for e in &log.entries {
        println!("{:>9} {:>12.5} {:>13.2}", e.iteration, e.loss, e.precision_cm);
    }

    let out = PathBuf::from("target/example-artifacts/synthetic_training");
    params.save(&out.join("params.net"))?;
    log.save_csv(&out.join("train_log.csv"))?;
    println!("\nparameters and curve written to {}", out.display());
    println!(
        "(loss is the relative-RMS objective; precision is the sample standard \
         deviation of the signed error over the training set)"
    );
    Ok(())
}
