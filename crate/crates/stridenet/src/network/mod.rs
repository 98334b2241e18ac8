//! The four-layer regression network: two conv/ReLU/max-pool stages, a dense
//! ReLU layer with inverted dropout, and an affine readout — forward pass and
//! hand-derived reverse-mode gradients.

mod gradcheck;
mod serialize;

pub use gradcheck::{
    check_gradients, gradcheck_csv, CoordinateCheck, GradCheckConfig, GradCheckReport,
};

use crate::error::{invalid, shape, Result};
use crate::tensor::{
    conv1d_same, conv1d_same_backward, maxpool1d, maxpool1d_backward, relu, relu_slice,
    ConvKernels, Matrix, SeededRng, Signal,
};

/// Architecture hyperparameters.
///
/// The default is the full-size network; [`NetworkConfig::compact`] is a
/// scaled-down variant for CPU-bound experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// Input length in samples (padded stride length).
    pub input_length: usize,
    /// Input channels (3 accel + 3 gyro).
    pub input_channels: usize,
    /// First conv stage: kernel count and kernel length.
    pub conv1_kernels: usize,
    pub conv1_kernel_len: usize,
    /// Second conv stage: kernel count and kernel length.
    pub conv2_kernels: usize,
    pub conv2_kernel_len: usize,
    /// Max-pool window width, applied after each conv stage.
    pub pool_width: usize,
    /// Hidden units in the dense layer.
    pub hidden_units: usize,
    /// Dropout probability on the dense layer during training.
    pub p_drop: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            input_length: 256,
            input_channels: 6,
            conv1_kernels: 32,
            conv1_kernel_len: 30,
            conv2_kernels: 64,
            conv2_kernel_len: 15,
            pool_width: 2,
            hidden_units: 1024,
            p_drop: 0.5,
        }
    }
}

impl NetworkConfig {
    /// A small configuration with the same topology, sized so that training
    /// runs in minutes on one CPU core instead of hours.
    ///
    /// Dropout is scaled down with the layer width: under the squared
    /// relative-error loss, dropout noise on the prediction shrinks the
    /// learned outputs by roughly `(p/(1-p))/hidden_units`. At 1024 units and
    /// p = 0.5 that is a negligible −0.1%, but at 128 units it would bias
    /// predictions a full −1%, so the compact network keeps p small.
    pub fn compact() -> Self {
        Self {
            input_length: 256,
            input_channels: 6,
            conv1_kernels: 4,
            conv1_kernel_len: 8,
            conv2_kernels: 8,
            conv2_kernel_len: 4,
            pool_width: 2,
            hidden_units: 128,
            p_drop: 0.1,
        }
    }

    /// A configuration small enough for exhaustive finite-difference
    /// verification of the gradients (sub-second per probe batch).
    pub fn reduced() -> Self {
        Self {
            input_length: 16,
            input_channels: 2,
            conv1_kernels: 3,
            conv1_kernel_len: 4,
            conv2_kernels: 4,
            conv2_kernel_len: 2,
            pool_width: 2,
            hidden_units: 8,
            p_drop: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            self.input_length,
            self.input_channels,
            self.conv1_kernels,
            self.conv1_kernel_len,
            self.conv2_kernels,
            self.conv2_kernel_len,
            self.pool_width,
            self.hidden_units,
        ];
        if counts.contains(&0) {
            return Err(invalid("all architecture counts must be at least 1"));
        }
        let r2 = self.pool_width * self.pool_width;
        if !self.input_length.is_multiple_of(r2) {
            return Err(invalid(format!(
                "input length {} is not divisible by pool width squared {}",
                self.input_length, r2
            )));
        }
        if self.conv1_kernel_len != self.pool_width * self.conv2_kernel_len {
            return Err(invalid(format!(
                "kernel lengths must keep the receptive field constant across \
                 stages: conv1 len {} != pool width {} × conv2 len {}",
                self.conv1_kernel_len, self.pool_width, self.conv2_kernel_len
            )));
        }
        if self.conv1_kernel_len > self.input_length
            || self.conv2_kernel_len > self.input_length / self.pool_width
        {
            return Err(invalid("kernel longer than the signal it convolves"));
        }
        if !(0.0..1.0).contains(&self.p_drop) {
            return Err(invalid(format!("dropout probability {} outside [0, 1)", self.p_drop)));
        }
        Ok(())
    }

    /// Signal length after the first pool stage.
    pub fn pooled1_length(&self) -> usize {
        self.input_length / self.pool_width
    }

    /// Signal length after the second pool stage.
    pub fn pooled2_length(&self) -> usize {
        self.input_length / (self.pool_width * self.pool_width)
    }

    /// Width of the flattened vector feeding the dense layer.
    pub fn flat_length(&self) -> usize {
        self.conv2_kernels * self.pooled2_length()
    }
}

/// All learnable parameters. Also reused as the container for gradients,
/// which share every shape.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub config: NetworkConfig,
    pub conv1_kernels: ConvKernels,
    pub conv1_biases: Vec<f64>,
    pub conv2_kernels: ConvKernels,
    pub conv2_biases: Vec<f64>,
    /// Dense weights, `flat_length × hidden_units`; `hidden[j] += W[i][j] · flat[i]`.
    pub fc_weights: Matrix,
    pub fc_biases: Vec<f64>,
    /// Readout weights, one per hidden unit.
    pub readout_weights: Vec<f64>,
    pub readout_bias: f64,
}

impl NetworkParams {
    /// Weights sampled from a truncated normal (σ = 0.1, cut at ±2σ), biases
    /// set to 0.1.
    pub fn init(config: NetworkConfig, rng: &mut SeededRng) -> Result<Self> {
        config.validate()?;
        const WEIGHT_STDDEV: f64 = 0.1;
        const BIAS_INIT: f64 = 0.1;
        let k1 = config.conv1_kernel_len * config.input_channels * config.conv1_kernels;
        let k2 = config.conv2_kernel_len * config.conv1_kernels * config.conv2_kernels;
        Ok(Self {
            config,
            conv1_kernels: ConvKernels::new(
                config.conv1_kernel_len,
                config.input_channels,
                config.conv1_kernels,
                rng.truncated_normal_vec(k1, WEIGHT_STDDEV),
            )?,
            conv1_biases: vec![BIAS_INIT; config.conv1_kernels],
            conv2_kernels: ConvKernels::new(
                config.conv2_kernel_len,
                config.conv1_kernels,
                config.conv2_kernels,
                rng.truncated_normal_vec(k2, WEIGHT_STDDEV),
            )?,
            conv2_biases: vec![BIAS_INIT; config.conv2_kernels],
            fc_weights: Matrix::new(
                config.flat_length(),
                config.hidden_units,
                rng.truncated_normal_vec(config.flat_length() * config.hidden_units, WEIGHT_STDDEV),
            )?,
            fc_biases: vec![BIAS_INIT; config.hidden_units],
            readout_weights: rng.truncated_normal_vec(config.hidden_units, WEIGHT_STDDEV),
            readout_bias: BIAS_INIT,
        })
    }

    /// All-zero parameters of the same shapes; the gradient accumulator.
    pub fn zeros(config: NetworkConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            conv1_kernels: ConvKernels::zeros(
                config.conv1_kernel_len,
                config.input_channels,
                config.conv1_kernels,
            ),
            conv1_biases: vec![0.0; config.conv1_kernels],
            conv2_kernels: ConvKernels::zeros(
                config.conv2_kernel_len,
                config.conv1_kernels,
                config.conv2_kernels,
            ),
            conv2_biases: vec![0.0; config.conv2_kernels],
            fc_weights: Matrix::zeros(config.flat_length(), config.hidden_units),
            fc_biases: vec![0.0; config.hidden_units],
            readout_weights: vec![0.0; config.hidden_units],
            readout_bias: 0.0,
        })
    }

    /// Stable names of the eight parameter tensors, in storage order.
    pub fn tensor_names() -> [&'static str; 8] {
        [
            "conv1.kernels",
            "conv1.biases",
            "conv2.kernels",
            "conv2.biases",
            "fc.weights",
            "fc.biases",
            "readout.weights",
            "readout.bias",
        ]
    }

    /// Flat views of the eight parameter tensors, in the order of
    /// [`tensor_names`].
    ///
    /// [`tensor_names`]: NetworkParams::tensor_names
    pub fn tensors(&self) -> [&[f64]; 8] {
        [
            self.conv1_kernels.values(),
            &self.conv1_biases,
            self.conv2_kernels.values(),
            &self.conv2_biases,
            self.fc_weights.values(),
            &self.fc_biases,
            &self.readout_weights,
            std::slice::from_ref(&self.readout_bias),
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 8] {
        [
            self.conv1_kernels.values_mut(),
            &mut self.conv1_biases,
            self.conv2_kernels.values_mut(),
            &mut self.conv2_biases,
            self.fc_weights.values_mut(),
            &mut self.fc_biases,
            &mut self.readout_weights,
            std::slice::from_mut(&mut self.readout_bias),
        ]
    }

    /// Total number of scalar parameters.
    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }
}

/// Dropout behavior for one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub enum Dropout {
    /// Full architecture, no units dropped (inference).
    Off,
    /// Inverted dropout with an explicit binary mask: surviving units are
    /// scaled by `1/(1 − p_drop)` so inference needs no rescaling.
    Mask { mask: Vec<f64>, p_drop: f64 },
}

impl Dropout {
    /// Draws a fresh binary keep-mask of `n` units, each dropped with
    /// probability `p_drop`.
    pub fn sample(rng: &mut SeededRng, n: usize, p_drop: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p_drop) {
            return Err(invalid(format!("dropout probability {p_drop} outside [0, 1)")));
        }
        let mask = (0..n).map(|_| if rng.uniform() < p_drop { 0.0 } else { 1.0 }).collect();
        Ok(Dropout::Mask { mask, p_drop })
    }
}

/// Per-layer activations retained for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// The network input, 6 × input_length.
    pub input: Signal,
    /// First conv stage pre-activation.
    pub conv1_out: Signal,
    /// First pool stage output (after ReLU) and its argmax routing.
    pub pooled1: Signal,
    pub pool1_indices: Vec<usize>,
    /// Second conv stage pre-activation.
    pub conv2_out: Signal,
    /// Second pool stage output (after ReLU) and its argmax routing.
    pub pooled2: Signal,
    pub pool2_indices: Vec<usize>,
    /// `pooled2` flattened channel-major (channel index varies slowest).
    pub flat: Vec<f64>,
    /// Dense layer output after ReLU, before dropout.
    pub hidden: Vec<f64>,
    /// Dense layer output after dropout scaling (equals `hidden` when off).
    pub hidden_dropped: Vec<f64>,
    /// The dropout mask and rate used, if any.
    pub dropout: Option<(Vec<f64>, f64)>,
    /// Network output (stride length estimate, cm).
    pub output: f64,
}

/// Runs the network on one input and retains every intermediate needed by
/// [`backward`].
pub fn forward(params: &NetworkParams, input: &Signal, dropout: Dropout) -> Result<ForwardCache> {
    let cfg = &params.config;
    if input.channels() != cfg.input_channels || input.length() != cfg.input_length {
        return Err(shape(format!(
            "input is {}×{}, network expects {}×{}",
            input.channels(),
            input.length(),
            cfg.input_channels,
            cfg.input_length
        )));
    }

    let conv1_out = conv1d_same(input, &params.conv1_kernels, &params.conv1_biases)?;
    let (pooled1, pool1_indices) = maxpool1d(&relu(&conv1_out), cfg.pool_width)?;
    let conv2_out = conv1d_same(&pooled1, &params.conv2_kernels, &params.conv2_biases)?;
    let (pooled2, pool2_indices) = maxpool1d(&relu(&conv2_out), cfg.pool_width)?;

    // Row-major storage is already channel-major, so the flattened view is a
    // plain copy.
    let flat = pooled2.values().to_vec();

    let mut pre_fc = params.fc_biases.clone();
    for (i, &x) in flat.iter().enumerate() {
        if x == 0.0 {
            continue; // ReLU output is sparse; skip zero rows.
        }
        let w_row = params.fc_weights.row(i);
        for (h, &w) in pre_fc.iter_mut().zip(w_row) {
            *h += w * x;
        }
    }
    let hidden = relu_slice(&pre_fc);

    let (hidden_dropped, dropout_used) = match dropout {
        Dropout::Off => (hidden.clone(), None),
        Dropout::Mask { mask, p_drop } => {
            if mask.len() != cfg.hidden_units {
                return Err(shape(format!(
                    "dropout mask has {} entries, expected {}",
                    mask.len(),
                    cfg.hidden_units
                )));
            }
            if mask.iter().any(|&m| m != 0.0 && m != 1.0) {
                return Err(invalid("dropout mask must be binary"));
            }
            if !(0.0..1.0).contains(&p_drop) {
                return Err(invalid(format!("dropout probability {p_drop} outside [0, 1)")));
            }
            let keep_scale = 1.0 / (1.0 - p_drop);
            let dropped =
                hidden.iter().zip(&mask).map(|(&h, &m)| h * m * keep_scale).collect();
            (dropped, Some((mask, p_drop)))
        }
    };

    let output = params
        .readout_weights
        .iter()
        .zip(&hidden_dropped)
        .map(|(&w, &h)| w * h)
        .sum::<f64>()
        + params.readout_bias;

    Ok(ForwardCache {
        input: input.clone(),
        conv1_out,
        pooled1,
        pool1_indices,
        conv2_out,
        pooled2,
        pool2_indices,
        flat,
        hidden,
        hidden_dropped,
        dropout: dropout_used,
        output,
    })
}

/// Exact reverse-mode gradients of the output w.r.t. every parameter,
/// chained with `output_grad` (dL/dy). Returns gradients in a
/// [`NetworkParams`]-shaped container.
pub fn backward(
    params: &NetworkParams,
    cache: &ForwardCache,
    output_grad: f64,
) -> Result<NetworkParams> {
    let cfg = &params.config;
    if cache.hidden.len() != cfg.hidden_units
        || cache.flat.len() != cfg.flat_length()
        || cache.input.channels() != cfg.input_channels
        || cache.input.length() != cfg.input_length
    {
        return Err(shape("forward cache does not match the network config"));
    }
    if !output_grad.is_finite() {
        return Err(invalid(format!("non-finite output gradient {output_grad}")));
    }

    let mut grads = NetworkParams::zeros(*cfg)?;

    // Affine readout: y = Σ_j w_j · hd_j + b.
    grads.readout_bias = output_grad;
    for (g, &h) in grads.readout_weights.iter_mut().zip(&cache.hidden_dropped) {
        *g = output_grad * h;
    }
    let mut d_hidden: Vec<f64> =
        params.readout_weights.iter().map(|&w| output_grad * w).collect();

    // Dropout: hd_j = h_j · m_j / (1 − p).
    if let Some((mask, p_drop)) = &cache.dropout {
        let keep_scale = 1.0 / (1.0 - p_drop);
        for (d, &m) in d_hidden.iter_mut().zip(mask) {
            *d *= m * keep_scale;
        }
    }

    // Dense ReLU: gate on the post-activation sign (h > 0 ⇔ pre-activation > 0).
    for (d, &h) in d_hidden.iter_mut().zip(&cache.hidden) {
        if h <= 0.0 {
            *d = 0.0;
        }
    }
    grads.fc_biases.copy_from_slice(&d_hidden);
    let mut d_flat = vec![0.0; cfg.flat_length()];
    for (i, &x) in cache.flat.iter().enumerate() {
        let w_row = params.fc_weights.row(i);
        let g_row = grads.fc_weights.row_mut(i);
        let mut acc = 0.0;
        for ((g, &w), &d) in g_row.iter_mut().zip(w_row).zip(&d_hidden) {
            *g = d * x;
            acc += w * d;
        }
        d_flat[i] = acc;
    }

    // Un-flatten, route through pool 2, gate by conv2's pre-activation sign.
    let d_pooled2 = Signal::new(cfg.conv2_kernels, cfg.pooled2_length(), d_flat)?;
    let mut d_act2 = maxpool1d_backward(&d_pooled2, &cache.pool2_indices, cfg.pooled1_length())?;
    gate_by_sign(&mut d_act2, &cache.conv2_out);
    let (k2_grad, b2_grad, d_pooled1) =
        conv1d_same_backward(&cache.pooled1, &params.conv2_kernels, &d_act2)?;
    grads.conv2_kernels = k2_grad;
    grads.conv2_biases = b2_grad;

    // Pool 1 and conv 1, same pattern.
    let mut d_act1 = maxpool1d_backward(&d_pooled1, &cache.pool1_indices, cfg.input_length)?;
    gate_by_sign(&mut d_act1, &cache.conv1_out);
    let (k1_grad, b1_grad, _d_input) =
        conv1d_same_backward(&cache.input, &params.conv1_kernels, &d_act1)?;
    grads.conv1_kernels = k1_grad;
    grads.conv1_biases = b1_grad;

    Ok(grads)
}

/// Zeroes gradient entries where the pre-activation was not positive.
fn gate_by_sign(grad: &mut Signal, pre_activation: &Signal) {
    for (g, &z) in grad.values_mut().iter_mut().zip(pre_activation.values()) {
        if z <= 0.0 {
            *g = 0.0;
        }
    }
}

/// Inference: full architecture, no dropout, no cache retained.
pub fn predict(params: &NetworkParams, input: &Signal) -> Result<f64> {
    Ok(forward(params, input, Dropout::Off)?.output)
}

/// Inference over a batch, order-preserving.
pub fn predict_batch(params: &NetworkParams, inputs: &[Signal]) -> Result<Vec<f64>> {
    inputs.iter().map(|x| predict(params, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A reduced configuration small enough for finite differences.
    pub(crate) fn tiny_config() -> NetworkConfig {
        NetworkConfig {
            input_length: 16,
            input_channels: 2,
            conv1_kernels: 3,
            conv1_kernel_len: 4,
            conv2_kernels: 4,
            conv2_kernel_len: 2,
            pool_width: 2,
            hidden_units: 8,
            p_drop: 0.5,
        }
    }

    fn random_input(cfg: &NetworkConfig, rng: &mut SeededRng) -> Signal {
        let mut x = Signal::zeros(cfg.input_channels, cfg.input_length);
        for v in x.values_mut() {
            *v = rng.uniform_in(-1.0, 1.0);
        }
        x
    }

    #[test]
    fn config_validation_catches_bad_shapes() {
        assert!(NetworkConfig::default().validate().is_ok());
        assert!(NetworkConfig::compact().validate().is_ok());
        assert!(tiny_config().validate().is_ok());
        let bad = [
            NetworkConfig { input_length: 254, ..Default::default() }, // not divisible by r² = 4
            NetworkConfig { conv2_kernel_len: 14, ..Default::default() }, // breaks conv1_len = r · conv2_len
            NetworkConfig { p_drop: 1.0, ..Default::default() },
            NetworkConfig { hidden_units: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?} should be rejected");
        }
    }

    #[test]
    fn full_size_config_matches_published_dimensions() {
        let cfg = NetworkConfig::default();
        assert_eq!(cfg.pooled1_length(), 128);
        assert_eq!(cfg.pooled2_length(), 64);
        assert_eq!(cfg.flat_length(), 4096);
        // Closed-form parameter count:
        //   conv1 30·6·32 + 32, conv2 15·32·64 + 64,
        //   fc 4096·1024 + 1024, readout 1024 + 1.
        let expected = 30 * 6 * 32 + 32 + 15 * 32 * 64 + 64 + 4096 * 1024 + 1024 + 1024 + 1;
        assert_eq!(expected, 4_232_929);
        let params = NetworkParams::zeros(cfg).unwrap();
        assert_eq!(params.param_count(), 4_232_929);
    }

    #[test]
    fn init_biases_are_point_one_and_weights_truncated() {
        let mut rng = SeededRng::new(7);
        let params = NetworkParams::init(tiny_config(), &mut rng).unwrap();
        assert!(params.conv1_biases.iter().all(|&b| b == 0.1));
        assert!(params.conv2_biases.iter().all(|&b| b == 0.1));
        assert!(params.fc_biases.iter().all(|&b| b == 0.1));
        assert_eq!(params.readout_bias, 0.1);
        for tensor in [
            params.conv1_kernels.values(),
            params.conv2_kernels.values(),
            params.fc_weights.values(),
            &params.readout_weights[..],
        ] {
            assert!(tensor.iter().all(|&w| w.abs() <= 0.2));
            assert!(tensor.iter().any(|&w| w != 0.0));
        }
    }

    #[test]
    fn init_is_deterministic() {
        let a = NetworkParams::init(tiny_config(), &mut SeededRng::new(42)).unwrap();
        let b = NetworkParams::init(tiny_config(), &mut SeededRng::new(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn forward_shape_chain_holds() {
        let cfg = tiny_config();
        let mut rng = SeededRng::new(3);
        let params = NetworkParams::init(cfg, &mut rng).unwrap();
        let input = random_input(&cfg, &mut rng);
        let cache = forward(&params, &input, Dropout::Off).unwrap();
        assert_eq!((cache.conv1_out.channels(), cache.conv1_out.length()), (3, 16));
        assert_eq!((cache.pooled1.channels(), cache.pooled1.length()), (3, 8));
        assert_eq!((cache.conv2_out.channels(), cache.conv2_out.length()), (4, 8));
        assert_eq!((cache.pooled2.channels(), cache.pooled2.length()), (4, 4));
        assert_eq!(cache.flat.len(), 16);
        assert_eq!(cache.hidden.len(), 8);
        assert!(cache.output.is_finite());
    }

    #[test]
    fn zero_weights_pass_only_biases() {
        // With all weights zero and biases 0.1 the readout sees nothing:
        // y = Σ 0 · ReLU(0.1) + 0.1 = 0.1, for any input.
        let cfg = tiny_config();
        let mut params = NetworkParams::zeros(cfg).unwrap();
        for t in params.tensors_mut() {
            for v in t.iter_mut() {
                *v = 0.0;
            }
        }
        params.conv1_biases.iter_mut().for_each(|b| *b = 0.1);
        params.conv2_biases.iter_mut().for_each(|b| *b = 0.1);
        params.fc_biases.iter_mut().for_each(|b| *b = 0.1);
        params.readout_bias = 0.1;
        let input = Signal::zeros(cfg.input_channels, cfg.input_length);
        let y = predict(&params, &input).unwrap();
        assert_eq!(y, 0.1);
        let mut rng = SeededRng::new(4);
        let y2 = predict(&params, &random_input(&cfg, &mut rng)).unwrap();
        assert_eq!(y2, 0.1);
    }

    #[test]
    fn dropout_off_equals_all_ones_mask_at_zero_rate() {
        let cfg = NetworkConfig { p_drop: 0.0, ..tiny_config() };
        let mut rng = SeededRng::new(9);
        let params = NetworkParams::init(cfg, &mut rng).unwrap();
        let input = random_input(&cfg, &mut rng);
        let off = forward(&params, &input, Dropout::Off).unwrap();
        let ones = forward(
            &params,
            &input,
            Dropout::Mask { mask: vec![1.0; cfg.hidden_units], p_drop: 0.0 },
        )
        .unwrap();
        assert_eq!(off.output, ones.output);
    }

    #[test]
    fn dropout_mask_is_validated() {
        let cfg = tiny_config();
        let mut rng = SeededRng::new(10);
        let params = NetworkParams::init(cfg, &mut rng).unwrap();
        let input = random_input(&cfg, &mut rng);
        let bad_len = Dropout::Mask { mask: vec![1.0; 3], p_drop: 0.5 };
        assert!(forward(&params, &input, bad_len).is_err());
        let not_binary = Dropout::Mask { mask: vec![0.5; cfg.hidden_units], p_drop: 0.5 };
        assert!(forward(&params, &input, not_binary).is_err());
        let bad_rate = Dropout::Mask { mask: vec![1.0; cfg.hidden_units], p_drop: 1.0 };
        assert!(forward(&params, &input, bad_rate).is_err());
    }

    #[test]
    fn inverted_dropout_is_unbiased_in_expectation() {
        // Monte-Carlo over masks: E[h · m / (1 − p)] = h for each unit.
        let cfg = tiny_config();
        let mut rng = SeededRng::new(11);
        let params = NetworkParams::init(cfg, &mut rng).unwrap();
        let input = random_input(&cfg, &mut rng);
        let reference = forward(&params, &input, Dropout::Off).unwrap().hidden;
        let mut sums = vec![0.0; cfg.hidden_units];
        let trials = 10_000;
        for _ in 0..trials {
            let mask = Dropout::sample(&mut rng, cfg.hidden_units, cfg.p_drop).unwrap();
            let cache = forward(&params, &input, mask).unwrap();
            for (s, &h) in sums.iter_mut().zip(&cache.hidden_dropped) {
                *s += h;
            }
        }
        let means: Vec<f64> = sums.iter().map(|s| s / trials as f64).collect();
        // Aggregate deviation: 1% is ≈2.8σ of the Monte-Carlo error here.
        let total_ref: f64 = reference.iter().sum();
        let total_mc: f64 = means.iter().sum();
        let rel = (total_mc - total_ref).abs() / total_ref;
        assert!(rel < 0.01, "aggregate MC mean {total_mc} vs {total_ref}, rel {rel}");
        // Per-unit noise is larger (σ = h/√trials · 1/(1−p) ≈ 1% of h); allow 4σ.
        for (j, (&mean, &h)) in means.iter().zip(&reference).enumerate() {
            if h.abs() > 1e-12 {
                let rel = (mean - h).abs() / h.abs();
                assert!(rel < 0.04, "unit {j}: MC mean {mean} vs {h}, rel {rel}");
            } else {
                assert!(mean.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        // Central differences over ≥100 coordinates spread across all eight
        // tensors of the reduced config.
        let cfg = tiny_config();
        let mut rng = SeededRng::new(12);
        let params = NetworkParams::init(cfg, &mut rng).unwrap();
        let input = random_input(&cfg, &mut rng);
        let cache = forward(&params, &input, Dropout::Off).unwrap();
        let analytic = backward(&params, &cache, 1.0).unwrap();

        let h = 1e-6;
        let mut checked = 0;
        let mut pick_rng = SeededRng::new(13);
        for tensor_idx in 0..8 {
            let len = params.tensors()[tensor_idx].len();
            // Every coordinate of the small tensors, a sample of the big ones.
            let coords: Vec<usize> = if len <= 32 {
                (0..len).collect()
            } else {
                let mut all: Vec<usize> = (0..len).collect();
                pick_rng.shuffle(&mut all);
                all.truncate(32);
                all
            };
            for &c in &coords {
                let mut plus = params.clone();
                plus.tensors_mut()[tensor_idx][c] += h;
                let mut minus = params.clone();
                minus.tensors_mut()[tensor_idx][c] -= h;
                let numeric = (predict(&plus, &input).unwrap()
                    - predict(&minus, &input).unwrap())
                    / (2.0 * h);
                let exact = analytic.tensors()[tensor_idx][c];
                let scale = exact.abs().max(numeric.abs()).max(1e-8);
                assert!(
                    (exact - numeric).abs() / scale < 1e-5,
                    "tensor {} coord {c}: analytic {exact} vs numeric {numeric}",
                    NetworkParams::tensor_names()[tensor_idx]
                );
                checked += 1;
            }
        }
        assert!(checked >= 100, "only {checked} coordinates checked");
    }

    #[test]
    fn gradients_respect_dropout_mask() {
        // Dropped units must contribute no gradient anywhere upstream.
        let cfg = tiny_config();
        let mut rng = SeededRng::new(14);
        let params = NetworkParams::init(cfg, &mut rng).unwrap();
        let input = random_input(&cfg, &mut rng);
        let mut mask = vec![1.0; cfg.hidden_units];
        mask[0] = 0.0;
        mask[3] = 0.0;
        let dropout = Dropout::Mask { mask: mask.clone(), p_drop: cfg.p_drop };
        let cache = forward(&params, &input, dropout.clone()).unwrap();
        let grads = backward(&params, &cache, 1.0).unwrap();
        assert_eq!(grads.fc_biases[0], 0.0);
        assert_eq!(grads.fc_biases[3], 0.0);
        // Finite differences through the *same* mask agree on a few coords.
        let h = 1e-6;
        for c in [0usize, 5, 11] {
            let mut plus = params.clone();
            plus.tensors_mut()[4][c] += h; // fc.weights
            let mut minus = params.clone();
            minus.tensors_mut()[4][c] -= h;
            let yp = forward(&plus, &input, dropout.clone()).unwrap().output;
            let ym = forward(&minus, &input, dropout.clone()).unwrap().output;
            let numeric = (yp - ym) / (2.0 * h);
            let exact = grads.tensors()[4][c];
            let scale = exact.abs().max(numeric.abs()).max(1e-8);
            assert!((exact - numeric).abs() / scale < 1e-5);
        }
    }

    #[test]
    fn zero_output_grad_gives_zero_gradients() {
        let cfg = tiny_config();
        let mut rng = SeededRng::new(15);
        let params = NetworkParams::init(cfg, &mut rng).unwrap();
        let input = random_input(&cfg, &mut rng);
        let cache = forward(&params, &input, Dropout::Off).unwrap();
        let grads = backward(&params, &cache, 0.0).unwrap();
        for t in grads.tensors() {
            assert!(t.iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn readout_bias_gradient_is_the_chained_value() {
        let cfg = tiny_config();
        let mut rng = SeededRng::new(16);
        let params = NetworkParams::init(cfg, &mut rng).unwrap();
        let input = random_input(&cfg, &mut rng);
        let cache = forward(&params, &input, Dropout::Off).unwrap();
        let grads = backward(&params, &cache, 2.5).unwrap();
        assert_eq!(grads.readout_bias, 2.5);
    }

    #[test]
    fn predict_is_deterministic_and_batched() {
        let cfg = tiny_config();
        let mut rng = SeededRng::new(17);
        let params = NetworkParams::init(cfg, &mut rng).unwrap();
        let inputs: Vec<Signal> = (0..4).map(|_| random_input(&cfg, &mut rng)).collect();
        let batch = predict_batch(&params, &inputs).unwrap();
        for (x, &y) in inputs.iter().zip(&batch) {
            assert_eq!(predict(&params, x).unwrap(), y);
            assert_eq!(predict(&params, x).unwrap(), y);
        }
    }

    #[test]
    fn conv1_perturbation_stays_within_the_kernel_footprint() {
        // A single-sample change can only move conv1 outputs inside a window
        // of one kernel length around it.
        let cfg = tiny_config();
        let mut rng = SeededRng::new(18);
        let params = NetworkParams::init(cfg, &mut rng).unwrap();
        let input = random_input(&cfg, &mut rng);
        let mut poked = input.clone();
        let t0 = 9;
        poked.row_mut(1)[t0] += 0.5;
        let a = conv1d_same(&input, &params.conv1_kernels, &params.conv1_biases).unwrap();
        let b = conv1d_same(&poked, &params.conv1_kernels, &params.conv1_biases).unwrap();
        let lk = cfg.conv1_kernel_len;
        for ch in 0..cfg.conv1_kernels {
            for t in 0..cfg.input_length {
                let changed = a.row(ch)[t] != b.row(ch)[t];
                let within = t + lk > t0 && t <= t0 + lk;
                assert!(!changed || within, "channel {ch} sample {t} outside footprint");
            }
        }
    }

    #[test]
    fn forward_rejects_wrong_input_shape() {
        let cfg = tiny_config();
        let mut rng = SeededRng::new(19);
        let params = NetworkParams::init(cfg, &mut rng).unwrap();
        let bad = Signal::zeros(cfg.input_channels, cfg.input_length * 2);
        assert!(forward(&params, &bad, Dropout::Off).is_err());
        let bad_ch = Signal::zeros(cfg.input_channels + 1, cfg.input_length);
        assert!(forward(&params, &bad_ch, Dropout::Off).is_err());
    }
}
