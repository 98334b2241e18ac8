//! Length-preserving 1D cross-correlation, max-pooling and ReLU.

// Channel loops keep explicit indices so the code lines up with the
// summation formulas in the comments.
#![allow(clippy::needless_range_loop)]

use super::{ConvKernels, Signal};
use crate::error::{Error, Result};

/// Zero-padding split for a length-preserving pass with kernel length `len`:
/// total pad is `len - 1`, front-loaded towards the right for even lengths.
/// Returns `(pad_left, pad_right)`.
pub fn same_padding(len: usize) -> (usize, usize) {
    let total = len - 1;
    let left = total / 2;
    (left, total - left)
}

/// Length-preserving multi-channel cross-correlation with zero padding.
///
/// `out[k][t] = bias[k] + sum_j sum_u kernels[u][j][k] * padded_in[j][t + u]`
/// where `padded_in` is the input with `same_padding` zeros on each side.
pub fn conv1d_same(input: &Signal, kernels: &ConvKernels, biases: &[f64]) -> Result<Signal> {
    if kernels.in_channels() != input.channels() {
        return Err(Error::shape(format!(
            "kernel expects {} input channels, signal has {}",
            kernels.in_channels(),
            input.channels()
        )));
    }
    if biases.len() != kernels.out_channels() {
        return Err(Error::shape(format!(
            "{} biases for {} output channels",
            biases.len(),
            kernels.out_channels()
        )));
    }
    if kernels.len() > input.length() {
        return Err(Error::shape(format!(
            "kernel length {} exceeds signal length {}",
            kernels.len(),
            input.length()
        )));
    }

    let length = input.length();
    let (pad_left, pad_right) = same_padding(kernels.len());
    let padded_len = length + pad_left + pad_right;

    // One padded copy per input channel; contiguous rows keep the inner
    // time loop branch-free.
    let mut padded = vec![0.0; input.channels() * padded_len];
    for j in 0..input.channels() {
        padded[j * padded_len + pad_left..j * padded_len + pad_left + length]
            .copy_from_slice(input.row(j));
    }

    let mut out = Signal::zeros(kernels.out_channels(), length);
    for k in 0..kernels.out_channels() {
        let row = out.row_mut(k);
        row.fill(biases[k]);
        for j in 0..input.channels() {
            let padded_row = &padded[j * padded_len..(j + 1) * padded_len];
            for u in 0..kernels.len() {
                let w = kernels.at(u, j, k);
                let shifted = &padded_row[u..u + length];
                for (o, x) in row.iter_mut().zip(shifted) {
                    *o += w * x;
                }
            }
        }
    }
    Ok(out)
}

/// Gradients of [`conv1d_same`] with respect to kernels, biases and input.
///
/// `input` must be the signal the forward pass consumed and `out_grad` the
/// gradient flowing into its output (same shape as the forward output).
pub fn conv1d_same_backward(
    input: &Signal,
    kernels: &ConvKernels,
    out_grad: &Signal,
) -> Result<(ConvKernels, Vec<f64>, Signal)> {
    if kernels.in_channels() != input.channels() {
        return Err(Error::shape(
            "conv backward: kernel/input channel mismatch".to_string(),
        ));
    }
    if out_grad.channels() != kernels.out_channels() || out_grad.length() != input.length() {
        return Err(Error::shape(
            "conv backward: output gradient shape mismatch".to_string(),
        ));
    }

    let length = input.length();
    let (pad_left, pad_right) = same_padding(kernels.len());
    let padded_len = length + pad_left + pad_right;

    let mut padded = vec![0.0; input.channels() * padded_len];
    for j in 0..input.channels() {
        padded[j * padded_len + pad_left..j * padded_len + pad_left + length]
            .copy_from_slice(input.row(j));
    }

    let mut kernel_grad = ConvKernels::zeros(
        kernels.len(),
        kernels.in_channels(),
        kernels.out_channels(),
    );
    let mut bias_grad = vec![0.0; kernels.out_channels()];
    let mut padded_grad = vec![0.0; input.channels() * padded_len];

    for k in 0..kernels.out_channels() {
        let g_row = out_grad.row(k);
        bias_grad[k] = g_row.iter().sum();
        for j in 0..input.channels() {
            let padded_row = &padded[j * padded_len..(j + 1) * padded_len];
            let pg_row = &mut padded_grad[j * padded_len..(j + 1) * padded_len];
            for u in 0..kernels.len() {
                // dW[u][j][k] = sum_t out_grad[k][t] * padded_in[j][t+u]
                let mut acc = 0.0;
                for (g, x) in g_row.iter().zip(&padded_row[u..u + length]) {
                    acc += g * x;
                }
                *kernel_grad.at_mut(u, j, k) += acc;
                // d padded_in[j][t+u] += W[u][j][k] * out_grad[k][t]
                let w = kernels.at(u, j, k);
                for (pg, g) in pg_row[u..u + length].iter_mut().zip(g_row) {
                    *pg += w * g;
                }
            }
        }
    }

    let mut input_grad = Signal::zeros(input.channels(), length);
    for j in 0..input.channels() {
        input_grad.row_mut(j).copy_from_slice(
            &padded_grad[j * padded_len + pad_left..j * padded_len + pad_left + length],
        );
    }
    Ok((kernel_grad, bias_grad, input_grad))
}

/// Non-overlapping max-pooling with window `r`. Returns the pooled signal and,
/// per pooled sample, the absolute input position of the selected maximum
/// (first position on ties).
pub fn maxpool1d(input: &Signal, r: usize) -> Result<(Signal, Vec<usize>)> {
    if r == 0 {
        return Err(Error::invalid("pool width must be >= 1"));
    }
    if !input.length().is_multiple_of(r) {
        return Err(Error::shape(format!(
            "signal length {} not divisible by pool width {r}",
            input.length()
        )));
    }
    let out_len = input.length() / r;
    let mut out = Signal::zeros(input.channels(), out_len);
    let mut indices = vec![0usize; input.channels() * out_len];
    for j in 0..input.channels() {
        let row = input.row(j);
        for t in 0..out_len {
            let window = &row[t * r..(t + 1) * r];
            let mut best = 0usize;
            for (i, v) in window.iter().enumerate() {
                if *v > window[best] {
                    best = i;
                }
            }
            out.set(j, t, window[best]);
            indices[j * out_len + t] = t * r + best;
        }
    }
    Ok((out, indices))
}

/// Routes a pooled-output gradient back to the argmax positions recorded by
/// [`maxpool1d`].
pub fn maxpool1d_backward(
    pooled_grad: &Signal,
    indices: &[usize],
    input_length: usize,
) -> Result<Signal> {
    if indices.len() != pooled_grad.channels() * pooled_grad.length() {
        return Err(Error::shape(
            "pool backward: index/gradient size mismatch".to_string(),
        ));
    }
    let mut input_grad = Signal::zeros(pooled_grad.channels(), input_length);
    for j in 0..pooled_grad.channels() {
        let g_row = pooled_grad.row(j);
        let idx_row = &indices[j * pooled_grad.length()..(j + 1) * pooled_grad.length()];
        let out_row = input_grad.row_mut(j);
        for (g, &i) in g_row.iter().zip(idx_row) {
            out_row[i] += g;
        }
    }
    Ok(input_grad)
}

/// Elementwise `max(0, z)` over a slice.
pub fn relu_slice(values: &[f64]) -> Vec<f64> {
    values.iter().map(|&v| v.max(0.0)).collect()
}

/// Elementwise `max(0, z)` over a signal.
pub fn relu(input: &Signal) -> Signal {
    let mut out = input.clone();
    for v in out.values_mut() {
        *v = v.max(0.0);
    }
    out
}
