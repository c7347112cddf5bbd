//! Binary tensor files.
//!
//! Layout: four ASCII header lines followed by the raw payload.
//!
//! ```text
//! ACTR-TENSOR v1
//! dtype f32
//! ndim 3
//! dims 512 7 7
//! <product(dims) little-endian f32 values, row-major>
//! ```
//!
//! An optional sidecar `<file>.meta` holds `role = "..."` and `slice = n`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_bytes, read_text, write_atomic};
use crate::diffmap::{FeatureMap, Grid};
use crate::error::{Error, Result};

pub const TENSOR_MAGIC: &str = "ACTR-TENSOR v1";

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    values: Vec<f32>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, values: Vec<f32>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "tensor dims {dims:?} must be nonempty and positive"
            )));
        }
        let count: usize = dims.iter().product();
        if count != values.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for tensor dims {dims:?}",
                values.len()
            )));
        }
        Ok(Self { dims, values })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    /// Interprets a `(C, H, W)` tensor as encoder features.
    pub fn to_feature_map(&self) -> Result<FeatureMap> {
        let [c, h, w] = self.dims[..] else {
            return Err(Error::ShapeMismatch(format!(
                "feature tensor must be 3-D (C, H, W), got dims {:?}",
                self.dims
            )));
        };
        FeatureMap::new(c, h, w, self.values.iter().map(|&v| f64::from(v)).collect())
    }

    /// Interprets a `(H, W)` or `(1, H, W)` tensor as a binary mask
    /// (nonzero = foreground).
    pub fn to_mask(&self) -> Result<Grid<bool>> {
        let (h, w) = match self.dims[..] {
            [h, w] | [1, h, w] => (h, w),
            _ => {
                return Err(Error::ShapeMismatch(format!(
                    "mask tensor must be (H, W) or (1, H, W), got dims {:?}",
                    self.dims
                )))
            }
        };
        Grid::from_vec(h, w, self.values.iter().map(|&v| v != 0.0).collect())
    }

    /// Interprets a `(M, H, W)` tensor as one binary grid per slice.
    pub fn to_slice_masks(&self) -> Result<Vec<Grid<bool>>> {
        let [m, h, w] = self.dims[..] else {
            return Err(Error::ShapeMismatch(format!(
                "occupancy tensor must be 3-D (M, H, W), got dims {:?}",
                self.dims
            )));
        };
        (0..m)
            .map(|i| {
                let slab = &self.values[i * h * w..(i + 1) * h * w];
                Grid::from_vec(h, w, slab.iter().map(|&v| v != 0.0).collect())
            })
            .collect()
    }
}

pub fn encode_tensor(t: &Tensor) -> Vec<u8> {
    let dims: Vec<String> = t.dims.iter().map(|d| d.to_string()).collect();
    let header = format!(
        "{TENSOR_MAGIC}\ndtype f32\nndim {}\ndims {}\n",
        t.dims.len(),
        dims.join(" ")
    );
    let mut out = Vec::with_capacity(header.len() + 4 * t.values.len());
    out.extend_from_slice(header.as_bytes());
    for v in &t.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses tensor bytes; `path` is only used in error messages.
pub fn decode_tensor(bytes: &[u8], path: &Path) -> Result<Tensor> {
    let bad = |reason: String| Error::malformed(path, reason);
    let mut rest = bytes;
    let mut lines = Vec::with_capacity(4);
    for _ in 0..4 {
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| bad("truncated tensor header".into()))?;
        let line = std::str::from_utf8(&rest[..end])
            .map_err(|_| bad("tensor header is not ASCII".into()))?;
        lines.push(line);
        rest = &rest[end + 1..];
    }
    if lines[0] != TENSOR_MAGIC {
        return Err(bad(format!("expected magic {TENSOR_MAGIC:?}, found {:?}", lines[0])));
    }
    if lines[1] != "dtype f32" {
        return Err(bad(format!("unsupported dtype line {:?}", lines[1])));
    }
    let ndim: usize = lines[2]
        .strip_prefix("ndim ")
        .and_then(|n| n.trim().parse().ok())
        .ok_or_else(|| bad(format!("bad ndim line {:?}", lines[2])))?;
    let dims: Vec<usize> = lines[3]
        .strip_prefix("dims ")
        .ok_or_else(|| bad(format!("bad dims line {:?}", lines[3])))?
        .split_whitespace()
        .map(|d| d.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad(format!("bad dims line {:?}", lines[3])))?;
    if dims.len() != ndim || ndim == 0 || dims.contains(&0) {
        return Err(bad(format!("ndim {ndim} inconsistent with dims {dims:?}")));
    }
    let count = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| bad("element count overflows".into()))?;
    if rest.len() != count * 4 {
        return Err(bad(format!(
            "payload is {} bytes, dims {dims:?} need {}",
            rest.len(),
            count * 4
        )));
    }
    let values: Vec<f32> = rest
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad("tensor contains NaN or infinite values".into()));
    }
    Ok(Tensor { dims, values })
}

pub fn read_tensor(path: &Path) -> Result<Tensor> {
    decode_tensor(&read_bytes(path)?, path)
}

pub fn write_tensor(path: &Path, tensor: &Tensor, meta: Option<&TensorMeta>) -> Result<()> {
    write_atomic(path, &encode_tensor(tensor))?;
    if let Some(meta) = meta {
        let text = toml::to_string(meta).expect("metadata serializes");
        write_atomic(&meta_path(path), text.as_bytes())?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TensorRole {
    InputFeatures,
    SliceFeatures,
    Mask,
    Occupancy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorMeta {
    pub role: TensorRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<usize>,
}

fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Reads the sidecar if one exists.
pub fn read_tensor_meta(path: &Path) -> Result<Option<TensorMeta>> {
    let sidecar = meta_path(path);
    if !sidecar.exists() {
        return Ok(None);
    }
    let text = read_text(&sidecar)?;
    toml::from_str(&text)
        .map(Some)
        .map_err(|e| Error::malformed(&sidecar, e.message().to_string()))
}
