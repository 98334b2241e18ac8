//! Stride length regression from foot-worn inertial sensors.
//!
//! The crate turns per-stride 6-channel accelerometer/gyroscope segments into
//! fixed-size normalized inputs, trains a small 1D convolutional network with
//! a relative-RMS loss and Adam, and evaluates predictions with patient-wise
//! k-fold cross-validation, an agreement-statistics battery and Bland-Altman
//! exports.
//!
//! Start with the runnable examples (`cargo run --example ...`) or the thin
//! `stridenet` CLI; the modules below are the library surface they drive.

pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod ioutil;
pub(crate) mod kv;
pub mod network;
pub mod pipeline;
pub mod preprocess;
pub mod tensor;
pub mod training;

pub use error::{Error, Result};
