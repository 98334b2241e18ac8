//! Flat binary container for [`NetworkParams`]: magic, version, config, then
//! one shape-prefixed f64 block per parameter tensor. Little-endian
//! throughout. Loading rejects any shape that disagrees with the stored
//! config.

use std::path::Path;

use crate::error::{shape, Error, Result};
use crate::ioutil::write_atomic;
use crate::network::{NetworkConfig, NetworkParams};

const MAGIC: &[u8; 8] = b"STRIDEN\0";
const VERSION: u32 = 1;

impl NetworkParams {
    /// Serializes the parameters into the flat binary container.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        let cfg = &self.config;
        for dim in [
            cfg.input_length,
            cfg.input_channels,
            cfg.conv1_kernels,
            cfg.conv1_kernel_len,
            cfg.conv2_kernels,
            cfg.conv2_kernel_len,
            cfg.pool_width,
            cfg.hidden_units,
        ] {
            out.extend_from_slice(&(dim as u64).to_le_bytes());
        }
        out.extend_from_slice(&cfg.p_drop.to_le_bytes());
        for tensor in self.tensors() {
            out.extend_from_slice(&(tensor.len() as u64).to_le_bytes());
            for v in tensor {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let magic = r.take(MAGIC.len())?;
        if magic != MAGIC {
            return Err(shape("not a network parameter file (bad magic)"));
        }
        let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        if version != VERSION {
            return Err(shape(format!("unsupported parameter file version {version}")));
        }
        let mut dims = [0usize; 8];
        for d in &mut dims {
            *d = r.u64()? as usize;
        }
        let p_drop = r.f64()?;
        let config = NetworkConfig {
            input_length: dims[0],
            input_channels: dims[1],
            conv1_kernels: dims[2],
            conv1_kernel_len: dims[3],
            conv2_kernels: dims[4],
            conv2_kernel_len: dims[5],
            pool_width: dims[6],
            hidden_units: dims[7],
            p_drop,
        };
        config.validate()?;
        let mut params = NetworkParams::zeros(config)?;
        for (name, tensor) in
            NetworkParams::tensor_names().into_iter().zip(params.tensors_mut())
        {
            let stored = r.u64()? as usize;
            if stored != tensor.len() {
                return Err(shape(format!(
                    "tensor {name} has {stored} values on disk, config implies {}",
                    tensor.len()
                )));
            }
            for v in tensor.iter_mut() {
                *v = r.f64()?;
            }
        }
        if r.pos != bytes.len() {
            return Err(shape(format!(
                "{} trailing bytes after the last tensor",
                bytes.len() - r.pos
            )));
        }
        if !params.is_finite() {
            return Err(Error::NonFinite("parameter file contains NaN/Inf".into()));
        }
        Ok(params)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(shape("parameter file truncated"));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
