//! Stochastic optimization of the network against the relative-RMS loss:
//! Adam with bias correction, uniform mini-batch sampling, and a training
//! curve logged on the full training set.

use crate::error::{invalid, shape, Error, Result};
use crate::evaluation::stats::sample_std;
use crate::ioutil::write_atomic;
use crate::network::{backward, forward, predict, Dropout, NetworkConfig, NetworkParams};
use crate::preprocess::PreprocessedStride;
use crate::tensor::SeededRng;

/// Optimizer and schedule settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub iterations: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Log the training-set loss/precision every this many iterations.
    pub log_every: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            iterations: 4000,
            batch_size: 100,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            log_every: 50,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.batch_size == 0 || self.log_every == 0 {
            return Err(invalid("iterations, batch size and log cadence must be ≥ 1"));
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0 && self.beta2 > 0.0 && self.beta2 < 1.0) {
            return Err(invalid(format!(
                "moment decays must lie in (0, 1), got β1={} β2={}",
                self.beta1, self.beta2
            )));
        }
        if !(self.learning_rate > 0.0 && self.epsilon > 0.0) {
            return Err(invalid("learning rate and epsilon must be positive"));
        }
        Ok(())
    }
}

/// Adam accumulators: first/second moments per parameter tensor plus the
/// step counter and running decay powers.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub step: u64,
    first_moment: NetworkParams,
    second_moment: NetworkParams,
    // β^t maintained by multiplication: bit-deterministic on every platform.
    beta1_pow: f64,
    beta2_pow: f64,
}

impl AdamState {
    pub fn new(config: NetworkConfig) -> Result<Self> {
        Ok(Self {
            step: 0,
            first_moment: NetworkParams::zeros(config)?,
            second_moment: NetworkParams::zeros(config)?,
            beta1_pow: 1.0,
            beta2_pow: 1.0,
        })
    }
}

/// One bias-corrected Adam update over every parameter tensor.
pub fn adam_step(
    params: &mut NetworkParams,
    grads: &NetworkParams,
    state: &mut AdamState,
    cfg: &TrainConfig,
) -> Result<()> {
    cfg.validate()?;
    if grads.config != params.config || state.first_moment.config != params.config {
        return Err(shape("optimizer state, gradients and parameters disagree on the config"));
    }
    for (name, tensor) in NetworkParams::tensor_names().into_iter().zip(grads.tensors()) {
        if tensor.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "gradient tensor {name} contains NaN/Inf at step {}",
                state.step + 1
            )));
        }
    }

    state.step += 1;
    state.beta1_pow *= cfg.beta1;
    state.beta2_pow *= cfg.beta2;
    let c1 = 1.0 - state.beta1_pow;
    let c2 = 1.0 - state.beta2_pow;

    let thetas = params.tensors_mut();
    let ms = state.first_moment.tensors_mut();
    let vs = state.second_moment.tensors_mut();
    for (((theta, g), m), v) in
        thetas.into_iter().zip(grads.tensors()).zip(ms).zip(vs)
    {
        for i in 0..theta.len() {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            theta[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
    Ok(())
}

/// Relative errors ε_i = (y_i − y_ref,i) / y_ref,i.
pub fn relative_errors(y: &[f64], y_ref: &[f64]) -> Result<Vec<f64>> {
    if y.len() != y_ref.len() {
        return Err(invalid(format!(
            "prediction/reference length mismatch: {} vs {}",
            y.len(),
            y_ref.len()
        )));
    }
    y.iter()
        .zip(y_ref)
        .map(|(&yi, &ri)| {
            if !(ri.is_finite() && ri > 0.0) {
                return Err(invalid(format!("reference length {ri} must be positive")));
            }
            if !yi.is_finite() {
                return Err(Error::NonFinite(format!("prediction {yi}")));
            }
            Ok((yi - ri) / ri)
        })
        .collect()
}

/// Root-mean-square of the relative errors.
pub fn loss(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(invalid("loss needs a non-empty batch"));
    }
    let ss: f64 = errors.iter().map(|e| e * e).sum();
    Ok((ss / errors.len() as f64).sqrt())
}

/// Analytic gradient of [`loss`] composed with [`relative_errors`]:
/// dL/dy_i = ε_i / (N · E · y_ref,i). At E = 0 (exact fit) the loss is not
/// differentiable; the zero vector is returned as the subgradient.
pub fn loss_gradient(y: &[f64], y_ref: &[f64]) -> Result<Vec<f64>> {
    let eps = relative_errors(y, y_ref)?;
    let e = loss(&eps)?;
    if e == 0.0 {
        return Ok(vec![0.0; y.len()]);
    }
    let n = y.len() as f64;
    Ok(eps.iter().zip(y_ref).map(|(&ei, &ri)| ei / (n * e * ri)).collect())
}

/// One point on the training curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainLogEntry {
    pub iteration: usize,
    /// Relative-RMS loss over the entire training set, dropout off.
    pub loss: f64,
    /// Sample standard deviation of the signed error (cm) over the training set.
    pub precision_cm: f64,
}

/// The training curve; one entry before the first update, then every
/// `log_every` iterations and at the last one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub entries: Vec<TrainLogEntry>,
}

impl TrainLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,loss,precision_cm\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{}\n", e.iteration, e.loss, e.precision_cm));
        }
        out
    }

    pub fn save_csv(&self, path: &std::path::Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

/// Trains a fresh network on `dataset` and returns the final parameters plus
/// the training curve.
///
/// Every iteration draws `batch_size` strides uniformly with replacement,
/// runs forward passes with per-sample dropout masks, backpropagates the
/// analytic loss gradient and applies one Adam step. Gradients accumulate in
/// a fixed order, so a given seed reproduces the run bit-exactly.
pub fn train(
    dataset: &[PreprocessedStride],
    net_config: NetworkConfig,
    cfg: &TrainConfig,
) -> Result<(NetworkParams, TrainLog)> {
    let refs: Vec<&PreprocessedStride> = dataset.iter().collect();
    train_refs(&refs, net_config, cfg)
}

/// [`train`] over borrowed strides; lets cross-validation hand over fold
/// subsets without copying the signals.
pub(crate) fn train_refs(
    dataset: &[&PreprocessedStride],
    net_config: NetworkConfig,
    cfg: &TrainConfig,
) -> Result<(NetworkParams, TrainLog)> {
    cfg.validate()?;
    net_config.validate()?;
    if dataset.is_empty() {
        return Err(invalid("training needs at least one stride"));
    }
    let definition = dataset[0].definition;
    for s in dataset {
        if s.definition != definition {
            return Err(invalid(format!(
                "training set mixes stride definitions {} and {}",
                definition, s.definition
            )));
        }
        if s.signal.channels() != net_config.input_channels
            || s.signal.length() != net_config.input_length
        {
            return Err(shape(format!(
                "stride {} of patient {} is {}×{}, network expects {}×{}",
                s.stride_id,
                s.patient_id,
                s.signal.channels(),
                s.signal.length(),
                net_config.input_channels,
                net_config.input_length
            )));
        }
    }

    let refs: Vec<f64> = dataset.iter().map(|s| s.reference_length_cm).collect();
    let mut rng = SeededRng::new(cfg.seed);
    let mut params = NetworkParams::init(net_config, &mut rng)?;
    let mut state = AdamState::new(net_config)?;
    let mut log = TrainLog::default();
    log.entries.push(log_entry(0, &params, dataset, &refs)?);

    let n = dataset.len();
    for it in 1..=cfg.iterations {
        let batch: Vec<usize> = (0..cfg.batch_size).map(|_| rng.index(n)).collect();
        let mut caches = Vec::with_capacity(cfg.batch_size);
        for &i in &batch {
            let dropout = if net_config.p_drop > 0.0 {
                Dropout::sample(&mut rng, net_config.hidden_units, net_config.p_drop)?
            } else {
                Dropout::Off
            };
            caches.push(forward(&params, &dataset[i].signal, dropout)?);
        }
        let y: Vec<f64> = caches.iter().map(|c| c.output).collect();
        let y_ref: Vec<f64> = batch.iter().map(|&i| refs[i]).collect();
        // The per-sample factor already carries the 1/N of the batch mean, so
        // summing the per-sample backward passes yields the exact gradient.
        let d_y = loss_gradient(&y, &y_ref)?;
        let mut grads = NetworkParams::zeros(net_config)?;
        for (cache, &g) in caches.iter().zip(&d_y) {
            accumulate(&mut grads, &backward(&params, cache, g)?);
        }
        adam_step(&mut params, &grads, &mut state, cfg)?;

        if it % cfg.log_every == 0 || it == cfg.iterations {
            log.entries.push(log_entry(it, &params, dataset, &refs)?);
        }
    }
    Ok((params, log))
}

fn log_entry(
    iteration: usize,
    params: &NetworkParams,
    dataset: &[&PreprocessedStride],
    refs: &[f64],
) -> Result<TrainLogEntry> {
    let mut y = Vec::with_capacity(dataset.len());
    for s in dataset {
        y.push(predict(params, &s.signal)?);
    }
    let eps = relative_errors(&y, refs)?;
    let signed: Vec<f64> = y.iter().zip(refs).map(|(&a, &b)| a - b).collect();
    Ok(TrainLogEntry { iteration, loss: loss(&eps)?, precision_cm: sample_std(&signed) })
}

fn accumulate(acc: &mut NetworkParams, grads: &NetworkParams) {
    for (a, g) in acc.tensors_mut().into_iter().zip(grads.tensors()) {
        for (x, &y) in a.iter_mut().zip(g) {
            *x += y;
        }
    }
}
