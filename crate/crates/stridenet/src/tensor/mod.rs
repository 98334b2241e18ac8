//! Minimal deterministic numeric primitives: multi-channel 1D signals, dense
//! matrices, convolution kernel stacks and a seeded random source.
//!
//! Everything here is plain `f64` on contiguous `Vec`s. All operations are
//! pure functions over immutable inputs; identical inputs give bit-identical
//! outputs.

mod ops;
mod rng;

pub use ops::{
    conv1d_same, conv1d_same_backward, maxpool1d, maxpool1d_backward, relu, relu_slice,
    same_padding,
};
pub use rng::SeededRng;

use crate::error::{Error, Result};

/// A multi-channel 1D signal stored row-major as `[channel][time]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    channels: usize,
    length: usize,
    values: Vec<f64>,
}

impl Signal {
    /// Builds a signal from flat row-major values, validating dimensions and
    /// finiteness.
    pub fn new(channels: usize, length: usize, values: Vec<f64>) -> Result<Self> {
        if channels == 0 || length == 0 {
            return Err(Error::shape(format!(
                "signal must be at least 1x1, got {channels}x{length}"
            )));
        }
        if values.len() != channels * length {
            return Err(Error::shape(format!(
                "signal {channels}x{length} needs {} values, got {}",
                channels * length,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("signal value {v}")));
        }
        Ok(Self {
            channels,
            length,
            values,
        })
    }

    /// All-zero signal of the given shape.
    pub fn zeros(channels: usize, length: usize) -> Self {
        Self {
            channels,
            length,
            values: vec![0.0; channels * length],
        }
    }

    /// Builds a signal from per-channel rows of equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let channels = rows.len();
        let length = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != length) {
            return Err(Error::shape("signal rows have unequal lengths".to_string()));
        }
        Self::new(channels, length, rows.concat())
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// One channel as a contiguous slice.
    pub fn row(&self, channel: usize) -> &[f64] {
        let start = channel * self.length;
        &self.values[start..start + self.length]
    }

    pub fn row_mut(&mut self, channel: usize) -> &mut [f64] {
        let start = channel * self.length;
        &mut self.values[start..start + self.length]
    }

    pub fn get(&self, channel: usize, t: usize) -> f64 {
        self.values[channel * self.length + t]
    }

    pub fn set(&mut self, channel: usize, t: usize, value: f64) {
        self.values[channel * self.length + t] = value;
    }

    /// Flat row-major view, channel-major then time.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::shape(format!(
                "matrix {rows}x{cols} needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let start = i * self.cols;
        &self.values[start..start + self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let start = i * self.cols;
        &mut self.values[start..start + self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// A stack of 1D convolution kernels indexed `(tap, in_channel, out_channel)`,
/// i.e. shape `[len x in_channels x out_channels]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvKernels {
    len: usize,
    in_channels: usize,
    out_channels: usize,
    values: Vec<f64>,
}

impl ConvKernels {
    pub fn new(
        len: usize,
        in_channels: usize,
        out_channels: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != len * in_channels * out_channels {
            return Err(Error::shape(format!(
                "kernel stack {len}x{in_channels}x{out_channels} needs {} values, got {}",
                len * in_channels * out_channels,
                values.len()
            )));
        }
        Ok(Self {
            len,
            in_channels,
            out_channels,
            values,
        })
    }

    pub fn zeros(len: usize, in_channels: usize, out_channels: usize) -> Self {
        Self {
            len,
            in_channels,
            out_channels,
            values: vec![0.0; len * in_channels * out_channels],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn in_channels(&self) -> usize {
        self.in_channels
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }

    #[inline]
    pub fn at(&self, tap: usize, in_ch: usize, out_ch: usize) -> f64 {
        self.values[(tap * self.in_channels + in_ch) * self.out_channels + out_ch]
    }

    #[inline]
    pub fn at_mut(&mut self, tap: usize, in_ch: usize, out_ch: usize) -> &mut f64 {
        &mut self.values[(tap * self.in_channels + in_ch) * self.out_channels + out_ch]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}
