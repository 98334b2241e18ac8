//! Thin command-line front end: every subcommand is a few calls into the
//! library plus artifact writing. Exit codes: 0 success, 1 pipeline error,
//! 2 usage error (clap's default for bad invocations).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stridenet::dataset::{
    generate_synthetic, table_kind, LengthDistribution, PreprocessedTable, RawTable, SynthConfig,
    TableKind, MANIFEST_FILE,
};
use stridenet::evaluation::{
    cross_validate, evaluate, folds_csv, predict_records, write_report,
};
use stridenet::ioutil::write_atomic;
use stridenet::network::{
    check_gradients, gradcheck_csv, GradCheckConfig, NetworkConfig, NetworkParams,
};
use stridenet::pipeline::{preprocess_table, Manifest, DEFAULT_PADDED_LENGTH};
use stridenet::preprocess::{CalibrationProfile, EventConfig, StrideDefinition};
use stridenet::training::{train, TrainConfig};
use stridenet::{Error, Result};

#[derive(Parser)]
#[command(
    name = "stridenet",
    version,
    about = "Stride length estimation from foot-worn inertial sensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic raw table whose labels follow a known functional
    /// of the signals.
    Synth {
        /// Output table directory.
        #[arg(long)]
        out: PathBuf,
        /// Master seed (runs never seed from the clock).
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        patients: usize,
        #[arg(long, default_value_t = 12)]
        strides_per_patient: usize,
        /// Gaussian label noise, cm.
        #[arg(long, default_value_t = 1.0)]
        noise_cm: f64,
        /// Length spread: uniform or clustered.
        #[arg(long, default_value = "uniform", value_parser = parse_distribution)]
        distribution: LengthDistribution,
    },
    /// Calibrate a raw table, re-anchor stride borders on gait events and
    /// normalize/zero-pad for the network.
    Preprocess {
        /// Input raw table directory.
        #[arg(long)]
        input: PathBuf,
        /// Output table directory.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        prep: PrepArgs,
    },
    /// Train one network on every stride of a preprocessed table.
    Train {
        /// Input preprocessed table directory.
        #[arg(long)]
        input: PathBuf,
        /// Output directory (parameters, training curve, manifest).
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Evaluate saved parameters against a preprocessed table's references.
    Evaluate {
        /// Parameter file written by `train`.
        #[arg(long)]
        params: PathBuf,
        /// Input preprocessed table directory.
        #[arg(long)]
        input: PathBuf,
        /// Output report directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Patient-wise k-fold cross-validation: preprocesses if needed, trains
    /// one network per fold and pools held-out predictions into one report.
    Crossval {
        /// Input table directory (raw or already preprocessed).
        #[arg(long)]
        input: PathBuf,
        /// Output report directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[command(flatten)]
        prep: PrepArgs,
        #[command(flatten)]
        train: TrainArgs,
    },
    /// Verify the analytic gradients against central finite differences.
    Gradcheck {
        /// Master seed for parameter init, probe batch and coordinate draws.
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        coordinates: usize,
        /// Central-difference step.
        #[arg(long, default_value_t = 1e-6)]
        step: f64,
        /// Pass threshold on the relative error.
        #[arg(long, default_value_t = 1e-5)]
        tolerance: f64,
        /// Architecture preset: reduced, compact or full.
        #[arg(long, default_value = "reduced", value_parser = parse_network)]
        network: NetworkConfig,
        /// Optional directory for the per-coordinate CSV and manifest.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Preprocessing knobs shared by `preprocess` and `crossval`.
#[derive(Args)]
struct PrepArgs {
    /// Stride border definition: msdtw, hs-hs or ms-ms.
    #[arg(long, value_parser = parse_definition)]
    definition: StrideDefinition,
    /// Calibration profile; required when the input table holds raw sensor
    /// counts, rejected when it is already calibrated.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Network input length; shorter strides are zero-padded to this.
    #[arg(long, default_value_t = DEFAULT_PADDED_LENGTH)]
    padded_length: usize,
    /// Sliding-window width (samples) of the mid-stance detector.
    #[arg(long, default_value_t = EventConfig::default().midstance_window)]
    midstance_window: usize,
    /// Fraction of the stride where the heel-strike search begins.
    #[arg(long, default_value_t = EventConfig::default().heelstrike_search_from)]
    heelstrike_search_from: f64,
}

impl PrepArgs {
    fn events(&self) -> EventConfig {
        EventConfig {
            midstance_window: self.midstance_window,
            heelstrike_search_from: self.heelstrike_search_from,
        }
    }

    fn profile(&self) -> Result<Option<CalibrationProfile>> {
        self.profile.as_deref().map(CalibrationProfile::load).transpose()
    }

    fn push_manifest(&self, m: &mut Manifest) {
        m.push("definition", self.definition).push("padded_length", self.padded_length);
        m.push_events(&self.events());
        if let Some(p) = &self.profile {
            m.push("profile_path", p.display());
        }
    }
}

/// Training knobs shared by `train` and `crossval`.
#[derive(Args)]
struct TrainArgs {
    /// Master seed; every random draw derives from it (runs never seed from
    /// the clock).
    #[arg(long)]
    seed: u64,
    /// Adam iterations.
    #[arg(long, default_value_t = TrainConfig::default().iterations)]
    iterations: usize,
    /// Strides per batch, drawn with replacement.
    #[arg(long, default_value_t = TrainConfig::default().batch_size)]
    batch_size: usize,
    /// Adam step size.
    #[arg(long, default_value_t = TrainConfig::default().learning_rate)]
    learning_rate: f64,
    /// Training-curve sampling interval (iterations).
    #[arg(long, default_value_t = TrainConfig::default().log_every)]
    log_every: usize,
    /// Architecture preset: full, compact or reduced.
    #[arg(long, default_value = "full", value_parser = parse_network)]
    network: NetworkConfig,
}

impl TrainArgs {
    fn config(&self) -> TrainConfig {
        TrainConfig {
            iterations: self.iterations,
            batch_size: self.batch_size,
            learning_rate: self.learning_rate,
            log_every: self.log_every,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }

    fn push_manifest(&self, m: &mut Manifest) {
        m.push("seed", self.seed);
        m.push_train(&self.config());
        m.push_network(&self.network);
    }
}

fn parse_definition(s: &str) -> std::result::Result<StrideDefinition, String> {
    StrideDefinition::parse(s).map_err(|e| e.to_string())
}

fn parse_distribution(s: &str) -> std::result::Result<LengthDistribution, String> {
    LengthDistribution::parse(s).map_err(|e| e.to_string())
}

fn parse_network(s: &str) -> std::result::Result<NetworkConfig, String> {
    match s {
        "full" => Ok(NetworkConfig::default()),
        "compact" => Ok(NetworkConfig::compact()),
        "reduced" => Ok(NetworkConfig::reduced()),
        other => {
            Err(format!("unknown network preset {other:?} (expected full, compact or reduced)"))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Synth { out, seed, patients, strides_per_patient, noise_cm, distribution } => {
            let cfg = SynthConfig { patients, strides_per_patient, noise_cm, distribution };
            let table = generate_synthetic(&cfg, &mut stridenet::tensor::SeededRng::new(seed))?;
            table.save(&out)?;
            let mut m = Manifest::new("synth");
            m.push("seed", seed)
                .push("patients", patients)
                .push("strides_per_patient", strides_per_patient)
                .push("noise_cm", noise_cm)
                .push("distribution", distribution);
            m.push_meta(&table.meta);
            m.push_dataset("output", &out)?;
            m.write(&out.join(MANIFEST_FILE))?;
            println!(
                "wrote {} strides from {} patients to {}",
                table.strides.len(),
                patients,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Preprocess { input, out, prep } => {
            let (raw, stats) = RawTable::load(&input)?;
            if stats.skipped_missing_reference > 0 {
                eprintln!(
                    "warning: skipped {} strides with missing reference length",
                    stats.skipped_missing_reference
                );
            }
            let profile = prep.profile()?;
            let table = preprocess_table(
                &raw,
                profile.as_ref(),
                prep.definition,
                &prep.events(),
                prep.padded_length,
            )?;
            table.save(&out)?;
            let mut m = Manifest::new("preprocess");
            prep.push_manifest(&mut m);
            m.push_meta(&table.meta);
            m.push_dataset("input", &input)?;
            m.push_dataset("output", &out)?;
            m.write(&out.join(MANIFEST_FILE))?;
            println!(
                "preprocessed {} strides ({}) to {}",
                table.strides.len(),
                prep.definition,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Train { input, out, train: args } => {
            let table = load_preprocessed(&input, args.network.input_length)?;
            let (params, log) = train(&table.strides, args.network, &args.config())?;
            std::fs::create_dir_all(&out)?;
            params.save(&out.join("params.net"))?;
            log.save_csv(&out.join("train_log.csv"))?;
            let mut m = Manifest::new("train");
            args.push_manifest(&mut m);
            m.push("definition", table.definition);
            m.push_dataset("input", &input)?;
            m.write(&out.join(MANIFEST_FILE))?;
            let last = log.entries.last().expect("training always logs");
            println!(
                "trained {} iterations on {} strides; final loss {:.6}, precision {:.3} cm",
                args.iterations,
                table.strides.len(),
                last.loss,
                last.precision_cm
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Evaluate { params, input, out } => {
            let net = NetworkParams::load(&params)?;
            let table = load_preprocessed(&input, net.config.input_length)?;
            let records = predict_records(&net, &table.strides, 0)?;
            let report = evaluate(&records)?;
            write_report(&out, &report, &records)?;
            let mut m = Manifest::new("evaluate");
            m.push("params_path", params.display());
            m.push("definition", table.definition);
            m.push_dataset("input", &input)?;
            m.write(&out.join(MANIFEST_FILE))?;
            println!(
                "{} strides: accuracy {:.3} cm, precision {:.3} cm",
                report.strides, report.accuracy_cm, report.precision_cm
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Crossval { input, out, folds, prep, train: args } => {
            let table = match table_kind(&input)? {
                TableKind::Raw => {
                    let (raw, stats) = RawTable::load(&input)?;
                    if stats.skipped_missing_reference > 0 {
                        eprintln!(
                            "warning: skipped {} strides with missing reference length",
                            stats.skipped_missing_reference
                        );
                    }
                    let profile = prep.profile()?;
                    preprocess_table(
                        &raw,
                        profile.as_ref(),
                        prep.definition,
                        &prep.events(),
                        prep.padded_length,
                    )?
                }
                TableKind::Preprocessed => {
                    let table = PreprocessedTable::load(&input)?;
                    if table.definition != prep.definition {
                        return Err(Error::InvalidInput(format!(
                            "table at {} holds {} strides, not {}",
                            input.display(),
                            table.definition,
                            prep.definition
                        )));
                    }
                    table
                }
            };
            if table.padded_length != args.network.input_length {
                return Err(Error::InvalidInput(format!(
                    "table is padded to {}, network expects {}",
                    table.padded_length, args.network.input_length
                )));
            }
            let cv =
                cross_validate(&table.strides, prep.definition, args.network, &args.config(), folds)?;
            write_report(&out, &cv.report, &cv.records)?;
            write_atomic(&out.join("folds.csv"), folds_csv(&cv.folds).as_bytes())?;
            for (i, log) in cv.fold_logs.iter().enumerate() {
                log.save_csv(&out.join(format!("fold_{i:02}_log.csv")))?;
            }
            let mut m = Manifest::new("crossval");
            m.push("folds", folds);
            prep.push_manifest(&mut m);
            args.push_manifest(&mut m);
            m.push_dataset("input", &input)?;
            m.write(&out.join(MANIFEST_FILE))?;
            println!(
                "{}-fold cross-validation over {} strides ({}): accuracy {:.3} cm, precision {:.3} cm",
                folds,
                cv.report.strides,
                prep.definition,
                cv.report.accuracy_cm,
                cv.report.precision_cm
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Gradcheck { seed, coordinates, step, tolerance, network, out } => {
            let cfg = GradCheckConfig {
                coordinates,
                step,
                tolerance,
                ..GradCheckConfig::default()
            };
            let report = check_gradients(
                &network,
                &cfg,
                &mut stridenet::tensor::SeededRng::new(seed),
            )?;
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
                write_atomic(&dir.join("gradcheck.csv"), gradcheck_csv(&report).as_bytes())?;
                let mut m = Manifest::new("gradcheck");
                m.push("seed", seed)
                    .push("coordinates", coordinates)
                    .push("step", step)
                    .push("tolerance", tolerance)
                    .push("worst_relative_error", report.worst());
                m.push_network(&network);
                m.write(&dir.join(MANIFEST_FILE))?;
            }
            println!(
                "{} coordinates checked, worst relative error {:.3e} (tolerance {:.0e})",
                report.checks.len(),
                report.worst(),
                tolerance
            );
            if report.passed() {
                println!("gradient check passed");
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("error: gradient check failed");
                Ok(ExitCode::from(1))
            }
        }
    }
}

/// Loads a preprocessed table and checks it fits the network input length.
fn load_preprocessed(input: &Path, input_length: usize) -> Result<PreprocessedTable> {
    if table_kind(input)? == TableKind::Raw {
        return Err(Error::InvalidInput(format!(
            "table at {} is raw; run `preprocess` first",
            input.display()
        )));
    }
    let table = PreprocessedTable::load(input)?;
    if table.padded_length != input_length {
        return Err(Error::InvalidInput(format!(
            "table is padded to {}, network expects {}",
            table.padded_length, input_length
        )));
    }
    Ok(table)
}
