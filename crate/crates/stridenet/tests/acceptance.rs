//! Acceptance suite: one test per release criterion, named so the harness
//! output reads as a checklist. Every expected value is either computed by an
//! independent in-test oracle or stated with its tolerance next to the
//! assertion.
//!
//! Criterion 8 (full-benchmark reproduction) is conditional on a real dataset
//! and reports a skip notice when none is configured; criteria 1-7 then
//! constitute acceptance. Criterion 6 trains 10 folds for 4000 iterations and
//! dominates the suite's runtime.

use std::time::Instant;

use stridenet::dataset::{generate_synthetic, LengthDistribution, SynthConfig};
use stridenet::evaluation::{cross_validate, patientwise_kfold, stats};
use stridenet::network::{backward, forward, Dropout, NetworkConfig, NetworkParams};
use stridenet::pipeline::preprocess_table;
use stridenet::preprocess::{EventConfig, Foot, PreprocessedStride, StrideDefinition};
use stridenet::tensor::{SeededRng, Signal};
use stridenet::training::{
    adam_step, loss, loss_gradient, relative_errors, train, AdamState, TrainConfig,
};

fn report(criterion: u32, what: &str) {
    // Visible with --nocapture; the test name itself carries the pass/fail
    // verdict in normal runs.
    println!("criterion {criterion}: PASS - {what}");
}

// ---------------------------------------------------------------------------
// Criterion 1: analytic gradients match central finite differences of the
// batch loss (h = 1e-6) on >= 100 random parameter coordinates, relative
// error < 1e-5, in under a minute. The finite-difference loop below is
// written out in full here, independent of the library's own checker.
// ---------------------------------------------------------------------------
#[test]
fn criterion_1_gradients_match_finite_differences() {
    let started = Instant::now();
    let cfg = NetworkConfig::reduced();
    let mut rng = SeededRng::new(1001);
    let mut params = NetworkParams::init(cfg, &mut rng).unwrap();

    // A fixed probe batch with O(1) references.
    let batch = 4;
    let inputs: Vec<Signal> = (0..batch)
        .map(|_| {
            let v = (0..cfg.input_channels * cfg.input_length)
                .map(|_| rng.uniform_in(-1.0, 1.0))
                .collect();
            Signal::new(cfg.input_channels, cfg.input_length, v).unwrap()
        })
        .collect();
    let refs: Vec<f64> = (0..batch).map(|_| rng.uniform_in(0.5, 1.5)).collect();

    let batch_loss = |p: &NetworkParams| -> f64 {
        let y: Vec<f64> =
            inputs.iter().map(|x| forward(p, x, Dropout::Off).unwrap().output).collect();
        loss(&relative_errors(&y, &refs).unwrap()).unwrap()
    };

    // Analytic batch gradient: per-sample reverse passes chained with the
    // loss gradient, summed.
    let mut analytic = NetworkParams::zeros(cfg).unwrap();
    let caches: Vec<_> =
        inputs.iter().map(|x| forward(&params, x, Dropout::Off).unwrap()).collect();
    let y: Vec<f64> = caches.iter().map(|c| c.output).collect();
    let dl_dy = loss_gradient(&y, &refs).unwrap();
    for (cache, dy) in caches.iter().zip(dl_dy) {
        let g = backward(&params, cache, dy).unwrap();
        for (acc, part) in analytic.tensors_mut().into_iter().zip(g.tensors()) {
            for (a, &p) in acc.iter_mut().zip(part) {
                *a += p;
            }
        }
    }

    let sizes: Vec<usize> = params.tensors().iter().map(|t| t.len()).collect();
    let total: usize = sizes.iter().sum();
    let h = 1e-6;
    let mut worst = 0.0f64;
    let coords = 120;
    for _ in 0..coords {
        let mut flat = rng.index(total);
        let mut tensor = 0;
        while flat >= sizes[tensor] {
            flat -= sizes[tensor];
            tensor += 1;
        }
        let a = analytic.tensors()[tensor][flat];
        let original = params.tensors()[tensor][flat];
        params.tensors_mut()[tensor][flat] = original + h;
        let up = batch_loss(&params);
        params.tensors_mut()[tensor][flat] = original - h;
        let down = batch_loss(&params);
        params.tensors_mut()[tensor][flat] = original;
        let numeric = (up - down) / (2.0 * h);
        // Denominator floored at 1e-3: below that scale the comparison is
        // absolute, keeping cancellation noise (~1e-10) far from the bound
        // while real derivation errors remain orders of magnitude above it.
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-3);
        assert!(
            rel < 1e-5,
            "coordinate {flat} of tensor {}: analytic {a} vs numeric {numeric} (rel {rel})",
            NetworkParams::tensor_names()[tensor]
        );
        worst = worst.max(rel);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}, budget is one minute");
    report(1, &format!("{coords} coordinates, worst relative error {worst:.2e}, {elapsed:?}"));
}

// ---------------------------------------------------------------------------
// Criterion 2: the full-size architecture produces exactly the documented
// shape chain 32x256 -> 32x128 -> 64x128 -> 64x64 -> 4096 -> 1024 -> 1, and
// the parameter count equals the closed-form total 4,232,929.
// ---------------------------------------------------------------------------
#[test]
fn criterion_2_architecture_shapes_and_parameter_count() {
    let cfg = NetworkConfig::default();
    let params = NetworkParams::init(cfg, &mut SeededRng::new(2)).unwrap();
    let mut rng = SeededRng::new(3);
    let v = (0..cfg.input_channels * cfg.input_length).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    let input = Signal::new(cfg.input_channels, cfg.input_length, v).unwrap();
    let cache = forward(&params, &input, Dropout::Off).unwrap();

    let shapes = [
        (cache.conv1_out.channels(), cache.conv1_out.length()),
        (cache.pooled1.channels(), cache.pooled1.length()),
        (cache.conv2_out.channels(), cache.conv2_out.length()),
        (cache.pooled2.channels(), cache.pooled2.length()),
    ];
    assert_eq!(shapes, [(32, 256), (32, 128), (64, 128), (64, 64)]);
    assert_eq!(cache.flat.len(), 4096);
    assert_eq!(cache.hidden.len(), 1024);
    assert!(cache.output.is_finite(), "scalar readout");

    // Closed-form count recomputed from the hyperparameters, not from the
    // tensors: conv kernels + biases, dense, readout.
    let conv1 = cfg.conv1_kernels * cfg.input_channels * cfg.conv1_kernel_len + cfg.conv1_kernels;
    let conv2 = cfg.conv2_kernels * cfg.conv1_kernels * cfg.conv2_kernel_len + cfg.conv2_kernels;
    let flat = cfg.conv2_kernels * cfg.input_length / (cfg.pool_width * cfg.pool_width);
    let dense = flat * cfg.hidden_units + cfg.hidden_units;
    let readout = cfg.hidden_units + 1;
    let expected = conv1 + conv2 + dense + readout;
    assert_eq!(expected, 4_232_929);
    assert_eq!(params.param_count(), expected);
    report(2, "shape chain 32x256 -> 32x128 -> 64x128 -> 64x64 -> 4096 -> 1024 -> 1, 4232929 parameters");
}

// ---------------------------------------------------------------------------
// Criterion 3: Adam on a single coordinate with gradient sequence
// g_t = sin(t) matches the textbook recurrence to 1e-12 over 100 steps, and
// the first step with a large gradient moves by almost exactly the step size.
// ---------------------------------------------------------------------------
#[test]
fn criterion_3_adam_matches_the_reference_recurrence() {
    let cfg = NetworkConfig::reduced();
    let train_cfg = TrainConfig::default();
    let mut params = NetworkParams::zeros(cfg).unwrap();
    let mut grads = NetworkParams::zeros(cfg).unwrap();
    let mut state = AdamState::new(cfg).unwrap();

    // Reference recurrence computed with plain scalars.
    let (mut m, mut v, mut theta) = (0.0f64, 0.0f64, 0.0f64);
    let (b1, b2) = (train_cfg.beta1, train_cfg.beta2);
    for t in 1..=100u32 {
        let g = f64::from(t).sin();
        grads.readout_bias = g;
        adam_step(&mut params, &grads, &mut state, &train_cfg).unwrap();

        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        let m_hat = m / (1.0 - b1.powi(t as i32));
        let v_hat = v / (1.0 - b2.powi(t as i32));
        theta -= train_cfg.learning_rate * m_hat / (v_hat.sqrt() + train_cfg.epsilon);
        assert!(
            (params.readout_bias - theta).abs() < 1e-12,
            "step {t}: {} vs reference {theta}",
            params.readout_bias
        );
    }
    // Every other coordinate saw zero gradients and must be untouched.
    assert!(params.tensors()[..7].iter().all(|t| t.iter().all(|&x| x == 0.0)));

    // First-step magnitude ~ learning rate for a large gradient.
    let mut params = NetworkParams::zeros(cfg).unwrap();
    let mut state = AdamState::new(cfg).unwrap();
    grads.readout_bias = 1e6;
    adam_step(&mut params, &grads, &mut state, &train_cfg).unwrap();
    let step = params.readout_bias.abs();
    assert!(
        (step - train_cfg.learning_rate).abs() < 1e-8,
        "first step {step} vs alpha {}",
        train_cfg.learning_rate
    );
    report(3, "100 sin(t) steps within 1e-12 of the scalar recurrence; first step = alpha");
}

// ---------------------------------------------------------------------------
// Criterion 4: the statistics battery agrees with naive brute-force
// reimplementations to 1e-12 over 1000 random instances, including tied
// ranks for Spearman.
// ---------------------------------------------------------------------------
#[test]
fn criterion_4_statistics_match_brute_force_oracles() {
    fn naive_mean(xs: &[f64]) -> f64 {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        s / xs.len() as f64
    }
    fn naive_std(xs: &[f64]) -> f64 {
        if xs.len() < 2 {
            return 0.0;
        }
        let m = naive_mean(xs);
        let mut ss = 0.0;
        for &x in xs {
            ss += (x - m) * (x - m);
        }
        (ss / (xs.len() - 1) as f64).sqrt()
    }
    // O(n^2) average ranks: 1 + (#smaller) + (#equal - 1)/2.
    fn naive_ranks(xs: &[f64]) -> Vec<f64> {
        xs.iter()
            .map(|&x| {
                let smaller = xs.iter().filter(|&&o| o < x).count() as f64;
                let equal = xs.iter().filter(|&&o| o == x).count() as f64;
                1.0 + smaller + (equal - 1.0) / 2.0
            })
            .collect()
    }
    fn naive_pearson(x: &[f64], y: &[f64]) -> f64 {
        let (mx, my) = (naive_mean(x), naive_mean(y));
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (&a, &b) in x.iter().zip(y) {
            sxy += (a - mx) * (b - my);
            sxx += (a - mx) * (a - mx);
            syy += (b - my) * (b - my);
        }
        sxy / (sxx * syy).sqrt()
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);

    let mut rng = SeededRng::new(4004);
    let mut tied_instances = 0;
    for instance in 0..1000 {
        let n = 3 + rng.index(38);
        // Quantized references make rank ties common; O(1) scale keeps
        // different summation orders well inside the tolerance.
        let y_ref: Vec<f64> =
            (0..n).map(|_| (rng.uniform_in(0.5, 9.5) * 4.0).round() / 4.0).collect();
        let y: Vec<f64> = y_ref.iter().map(|&r| r + rng.normal(0.3)).collect();
        let errors: Vec<f64> = y.iter().zip(&y_ref).map(|(a, b)| a - b).collect();
        let abs_errors: Vec<f64> = errors.iter().map(|e| e.abs()).collect();

        let (acc, prec) = stats::signed_error_stats(&y, &y_ref).unwrap();
        assert!(close(acc, naive_mean(&errors)), "instance {instance}: accuracy");
        assert!(close(prec, naive_std(&errors)), "instance {instance}: precision");

        let (abs_acc, abs_prec) = stats::abs_error_stats(&y, &y_ref).unwrap();
        assert!(close(abs_acc, naive_mean(&abs_errors)), "instance {instance}: |e| mean");
        assert!(close(abs_prec, naive_std(&abs_errors)), "instance {instance}: |e| std");

        let rel = stats::relative_precision(&y, &y_ref).unwrap();
        assert!(
            close(rel, naive_std(&errors) / naive_mean(&y_ref)),
            "instance {instance}: relative precision"
        );

        let rank_y = naive_ranks(&y);
        let rank_r = naive_ranks(&y_ref);
        if naive_std(&rank_y) > 0.0 && naive_std(&rank_r) > 0.0 {
            let rho = stats::spearman_cc(&y, &y_ref).unwrap();
            assert!(
                close(rho, naive_pearson(&rank_y, &rank_r)),
                "instance {instance}: spearman"
            );
        }
        if rank_r.iter().any(|&r| r.fract() != 0.0) {
            tied_instances += 1;
        }

        let ba = stats::bland_altman(&y, &y_ref).unwrap();
        let agreements: Vec<f64> =
            y.iter().zip(&y_ref).map(|(&a, &b)| (a + b) / 2.0).collect();
        let md = naive_mean(&errors);
        let sd = naive_std(&errors);
        assert!(close(ba.mean_difference, md), "instance {instance}: BA mean");
        assert!(close(ba.lower_limit, md - 1.96 * sd), "instance {instance}: BA lower");
        assert!(close(ba.upper_limit, md + 1.96 * sd), "instance {instance}: BA upper");

        let denom: f64 = {
            let ma = naive_mean(&agreements);
            agreements.iter().map(|a| (a - ma) * (a - ma)).sum()
        };
        if denom > 0.0 {
            let (slope, intercept) = stats::error_regression(&y, &y_ref).unwrap();
            let ma = naive_mean(&agreements);
            let mut sad = 0.0;
            for (&a, &e) in agreements.iter().zip(&errors) {
                sad += (a - ma) * (e - md);
            }
            let naive_slope = sad / denom;
            assert!(close(slope, naive_slope), "instance {instance}: slope");
            assert!(
                close(intercept, md - naive_slope * ma),
                "instance {instance}: intercept"
            );
        }
    }
    assert!(tied_instances > 500, "tie coverage: only {tied_instances} instances had ties");
    report(4, &format!("1000 instances within 1e-12, {tied_instances} with rank ties"));
}

// ---------------------------------------------------------------------------
// Criterion 5: fold-partition invariants over 100 random (n, k)
// configurations, plus real cross-validation runs whose leakage assertion
// must stay silent.
// ---------------------------------------------------------------------------
#[test]
fn criterion_5_cross_validation_partitions_and_leakage() {
    let mut rng = SeededRng::new(55);
    for case in 0..100 {
        let n = 2 + rng.index(119);
        let k = 2 + rng.index(n.min(15) - 1);
        let patients: Vec<String> = (0..n).map(|i| format!("p{i:03}")).collect();
        let folds = patientwise_kfold(&patients, k, &mut rng).unwrap();

        assert_eq!(folds.len(), k, "case {case}: fold count");
        let mut seen = std::collections::BTreeSet::new();
        for f in &folds {
            // Test sets are disjoint and sized within one of each other.
            for p in &f.test_patients {
                assert!(seen.insert(p.clone()), "case {case}: {p} tested twice");
            }
            let expected = n / k + usize::from(f.fold < n % k);
            assert_eq!(f.test_patients.len(), expected, "case {case}: fold size");
            // The train side is exactly the complement: no leakage possible.
            assert_eq!(f.train_patients.len() + f.test_patients.len(), n);
            assert!(f.test_patients.iter().all(|p| !f.train_patients.contains(p)));
        }
        assert_eq!(seen.len(), n, "case {case}: every patient is tested once");
    }

    // Drive the in-loop leakage assertion with real (tiny) training runs.
    // Strides always carry six channels, so widen the reduced layout to match.
    let net = NetworkConfig { input_channels: 6, ..NetworkConfig::reduced() };
    let mut rng = SeededRng::new(56);
    for k in [2, 3, 5] {
        let strides: Vec<PreprocessedStride> = (0..12)
            .map(|i| {
                let v = (0..net.input_channels * net.input_length)
                    .map(|_| rng.uniform_in(-1.0, 1.0))
                    .collect();
                PreprocessedStride::new(
                    format!("p{:02}", i / 2),
                    if i % 2 == 0 { Foot::Left } else { Foot::Right },
                    i as u32,
                    StrideDefinition::MsDtw,
                    rng.uniform_in(80.0, 120.0),
                    net.input_length,
                    Signal::new(net.input_channels, net.input_length, v).unwrap(),
                )
                .unwrap()
            })
            .collect();
        let cfg = TrainConfig {
            iterations: 5,
            batch_size: 4,
            log_every: 5,
            seed: k as u64,
            ..TrainConfig::default()
        };
        let cv = cross_validate(&strides, StrideDefinition::MsDtw, net, &cfg, k).unwrap();
        assert_eq!(cv.records.len(), strides.len());
    }
    report(5, "100 random (n, k) partitions hold invariants; leakage assertion silent");
}

// ---------------------------------------------------------------------------
// Criterion 6: desk-scale learning. 50 patients x 12 strides with a 1 cm
// label noise floor; 10-fold cross-validation at 4000 iterations per fold
// (compact architecture) must reach pooled precision <= 3 cm and
// |mean accuracy| <= 0.5 cm, every fold's training curve must decrease, and
// the whole run must fit the ~30 minute budget.
// ---------------------------------------------------------------------------
#[test]
fn criterion_6_desk_scale_cross_validation_learns() {
    let started = Instant::now();
    let synth = SynthConfig {
        patients: 50,
        strides_per_patient: 12,
        noise_cm: 1.0,
        distribution: LengthDistribution::Uniform,
    };
    let raw = generate_synthetic(&synth, &mut SeededRng::new(42)).unwrap();
    let table =
        preprocess_table(&raw, None, StrideDefinition::MsDtw, &EventConfig::default(), 256)
            .unwrap();
    assert_eq!(table.strides.len(), 600);

    let cfg = TrainConfig { iterations: 4000, batch_size: 100, log_every: 100, seed: 9, ..TrainConfig::default() };
    let cv = cross_validate(&table.strides, StrideDefinition::MsDtw, NetworkConfig::compact(), &cfg, 10)
        .unwrap();

    let r = &cv.report;
    assert!(
        r.precision_cm <= 3.0,
        "pooled precision {:.3} cm exceeds 3 cm",
        r.precision_cm
    );
    assert!(
        r.accuracy_cm.abs() <= 0.5,
        "pooled |accuracy| {:.3} cm exceeds 0.5 cm",
        r.accuracy_cm
    );

    fn median(mut xs: Vec<f64>) -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs[xs.len() / 2]
    }
    for (fold, log) in cv.fold_logs.iter().enumerate() {
        let precisions: Vec<f64> = log.entries.iter().map(|e| e.precision_cm).collect();
        let tenth = (precisions.len() / 10).max(1);
        let head = median(precisions[..tenth].to_vec());
        let tail = median(precisions[precisions.len() - tenth..].to_vec());
        assert!(
            tail < head,
            "fold {fold}: training precision did not decrease ({head:.2} -> {tail:.2} cm)"
        );
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 30 * 60, "took {elapsed:?}, budget is ~30 minutes");
    report(
        6,
        &format!(
            "pooled precision {:.2} cm, accuracy {:+.3} cm, curves decrease, {elapsed:?}",
            r.precision_cm, r.accuracy_cm
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: training-set convergence. On a 100-stride synthetic subset
// the training-set precision must drop below 2 cm within 4000 iterations —
// the desk-scale mirror of reaching the reference system's resolution.
// ---------------------------------------------------------------------------
#[test]
fn criterion_7_training_precision_reaches_reference_resolution() {
    let synth = SynthConfig {
        patients: 10,
        strides_per_patient: 10,
        noise_cm: 1.0,
        distribution: LengthDistribution::Uniform,
    };
    let raw = generate_synthetic(&synth, &mut SeededRng::new(42)).unwrap();
    let table =
        preprocess_table(&raw, None, StrideDefinition::MsDtw, &EventConfig::default(), 256)
            .unwrap();
    assert_eq!(table.strides.len(), 100);

    let cfg = TrainConfig { iterations: 4000, batch_size: 100, log_every: 100, seed: 1, ..TrainConfig::default() };
    let (_, log) = train(&table.strides, NetworkConfig::compact(), &cfg).unwrap();

    let best = log
        .entries
        .iter()
        .map(|e| (e.precision_cm, e.iteration))
        .fold((f64::INFINITY, 0), |acc, x| if x.0 < acc.0 { x } else { acc });
    assert!(
        best.0 < 2.0,
        "training precision never dropped below 2 cm (best {:.2} cm at iteration {})",
        best.0,
        best.1
    );
    report(
        7,
        &format!("training precision {:.2} cm at iteration {} (< 2 cm)", best.0, best.1),
    );
}

// ---------------------------------------------------------------------------
// Supporting check: on synthetic data whose labels carry a known noise floor,
// a model trained on a shuffled 80% of the strides reaches a held-out
// precision within twice that floor — the generator is learnable and the
// pipeline does not leak the noise into systematic error.
// ---------------------------------------------------------------------------
#[test]
fn holdout_precision_tracks_the_synthetic_noise_floor() {
    let noise_cm = 2.0;
    let synth = SynthConfig {
        patients: 10,
        strides_per_patient: 10,
        noise_cm,
        distribution: LengthDistribution::Uniform,
    };
    let raw = generate_synthetic(&synth, &mut SeededRng::new(7)).unwrap();
    let table =
        preprocess_table(&raw, None, StrideDefinition::MsDtw, &EventConfig::default(), 256)
            .unwrap();

    let mut order: Vec<usize> = (0..table.strides.len()).collect();
    SeededRng::new(70).shuffle(&mut order);
    let cut = order.len() * 8 / 10;
    let pick = |ix: &[usize]| -> Vec<_> { ix.iter().map(|&i| table.strides[i].clone()).collect() };
    let train_set: Vec<_> = pick(&order[..cut]);
    let test_set: Vec<_> = pick(&order[cut..]);

    let cfg = TrainConfig { iterations: 2000, batch_size: 100, log_every: 200, seed: 7, ..TrainConfig::default() };
    let (params, _) = train(&train_set, NetworkConfig::compact(), &cfg).unwrap();

    let y: Vec<f64> = test_set
        .iter()
        .map(|s| stridenet::network::predict(&params, &s.signal).unwrap())
        .collect();
    let y_ref: Vec<f64> = test_set.iter().map(|s| s.reference_length_cm).collect();
    let (_, precision) = stats::signed_error_stats(&y, &y_ref).unwrap();
    assert!(
        precision <= 2.0 * noise_cm,
        "held-out precision {precision:.2} cm exceeds twice the {noise_cm} cm noise floor"
    );
    println!(
        "holdout: precision {precision:.2} cm on {} unseen strides (noise floor {noise_cm} cm)",
        test_set.len()
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: full-benchmark reproduction, conditional on a real dataset.
// Point STRIDENET_BENCHMARK_DIR at a raw table of the public benchmark to
// run it; without one this reports a skip and criteria 1-7 constitute
// acceptance.
// ---------------------------------------------------------------------------
#[test]
fn criterion_8_full_dataset_reproduction_conditional() {
    let Some(dir) = std::env::var_os("STRIDENET_BENCHMARK_DIR") else {
        println!(
            "criterion 8: SKIPPED - no benchmark dataset configured \
             (set STRIDENET_BENCHMARK_DIR to a raw table directory); \
             criteria 1-7 constitute acceptance"
        );
        return;
    };
    let (raw, load_stats) = stridenet::dataset::RawTable::load(std::path::Path::new(&dir)).unwrap();
    println!(
        "criterion 8: loaded {} strides ({} skipped for missing references)",
        raw.strides.len(),
        load_stats.skipped_missing_reference
    );
    let table =
        preprocess_table(&raw, None, StrideDefinition::MsToMs, &EventConfig::default(), 256)
            .unwrap();
    let cfg = TrainConfig { iterations: 4000, batch_size: 100, log_every: 400, seed: 8, ..TrainConfig::default() };
    let cv = cross_validate(&table.strides, StrideDefinition::MsToMs, NetworkConfig::default(), &cfg, 10)
        .unwrap();
    let r = &cv.report;
    assert!(
        (r.accuracy_cm - 0.01).abs() <= 0.5,
        "mean accuracy {:.3} cm not within 0.5 cm of 0.01 cm",
        r.accuracy_cm
    );
    assert!(
        (r.precision_cm - 5.37).abs() <= 1.5,
        "precision {:.3} cm not within 1.5 cm of 5.37 cm",
        r.precision_cm
    );
    report(8, &format!("accuracy {:+.3} cm, precision {:.2} cm", r.accuracy_cm, r.precision_cm));
}

// ---------------------------------------------------------------------------
// Criterion 9: determinism. Re-running the CLI cross-validation pipeline
// with the same seed and inputs produces byte-identical artifacts.
// ---------------------------------------------------------------------------
#[test]
fn criterion_9_cli_reruns_are_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_stridenet");
    let root = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| {
        let out = std::process::Command::new(bin).args(args).output().unwrap();
        assert!(
            out.status.success(),
            "stridenet {args:?} failed:\n{}",
            String::from_utf8_lossy(&out.stderr)
        );
    };

    let raw = root.path().join("raw");
    let raw_s = raw.to_str().unwrap();
    run(&[
        "synth", "--out", raw_s, "--seed", "7", "--patients", "6", "--strides-per-patient", "4",
    ]);

    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let dir = root.path().join(name);
        run(&[
            "crossval",
            "--input",
            raw_s,
            "--out",
            dir.to_str().unwrap(),
            "--definition",
            "ms-ms",
            "--seed",
            "7",
            "--folds",
            "3",
            "--iterations",
            "40",
            "--batch-size",
            "8",
            "--network",
            "compact",
        ]);
        outputs.push(dir);
    }

    // The manifest records the input path and hash, identical across runs,
    // so every artifact including it must match byte for byte.
    let mut compared = 0;
    for entry in std::fs::read_dir(&outputs[0]).unwrap() {
        let name = entry.unwrap().file_name();
        let a = std::fs::read(outputs[0].join(&name)).unwrap();
        let b = std::fs::read(outputs[1].join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs between identical runs");
        compared += 1;
    }
    assert!(compared >= 9, "expected the full artifact set, saw {compared} files");
    report(9, &format!("{compared} crossval artifacts byte-identical across re-runs"));
}
