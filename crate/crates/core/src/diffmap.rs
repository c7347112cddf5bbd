//! Per-cell semantic difference between the input view and each slice image.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major 2D grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }
}

impl<T> Grid<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} values do not fill a {rows}x{cols} grid",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let data = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.cols + col]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

/// Encoder activations of one image, stored channel-major (`c`, `row`, `col`).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    channels: usize,
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl FeatureMap {
    pub fn new(channels: usize, height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::ShapeMismatch(format!(
                "feature map dims must be positive, got {channels}x{height}x{width}"
            )));
        }
        if values.len() != channels * height * width {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {channels}x{height}x{width} feature map",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "feature map contains NaN or infinite values".into(),
            ));
        }
        Ok(Self {
            channels,
            height,
            width,
            values,
        })
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn at(&self, c: usize, row: usize, col: usize) -> f64 {
        self.values[(c * self.height + row) * self.width + col]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..*self
        }
    }
}

/// Cosine similarity of the channel vectors at every spatial position.
///
/// A position where either vector has zero norm gets similarity 0.
pub fn cosine_cell_similarity(a: &FeatureMap, b: &FeatureMap) -> Result<Grid<f64>> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "feature maps {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let (channels, h, w) = a.shape();
    Ok(Grid::from_fn(h, w, |row, col| {
        let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
        for c in 0..channels {
            let (x, y) = (a.at(c, row, col), b.at(c, row, col));
            dot += x * y;
            na += x * x;
            nb += y * y;
        }
        if na == 0.0 || nb == 0.0 {
            0.0
        } else {
            (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
        }
    }))
}

/// How cosine similarity is turned into a block weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DifferenceMode {
    /// `(1 - cos) / 2`: identical features give 0, opposite features give 1.
    #[default]
    Difference,
    /// The similarity itself clamped to `[0, 1]`; kept for ablations.
    RawCosine,
}

/// Per-cell weights in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceMap {
    values: Grid<f64>,
}

impl DifferenceMap {
    pub fn new(values: Grid<f64>) -> Result<Self> {
        if values.as_slice().iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidParameter(
                "difference values must lie in [0, 1]".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &Grid<f64> {
        &self.values
    }
}

pub fn difference_map(a: &FeatureMap, b: &FeatureMap) -> Result<DifferenceMap> {
    difference_map_with(a, b, DifferenceMode::Difference)
}

pub fn difference_map_with(
    a: &FeatureMap,
    b: &FeatureMap,
    mode: DifferenceMode,
) -> Result<DifferenceMap> {
    let sim = cosine_cell_similarity(a, b)?;
    let values = match mode {
        DifferenceMode::Difference => unit_gap(a, b, &sim),
        DifferenceMode::RawCosine => Grid::from_fn(sim.rows(), sim.cols(), |r, c| {
            sim.get(r, c).clamp(0.0, 1.0)
        }),
    };
    Ok(DifferenceMap { values })
}

/// `(1 - cos) / 2` evaluated as `|a/|a| - b/|b||^2 / 4`, which is exactly 0
/// for equal cells instead of a rounding residue.
fn unit_gap(a: &FeatureMap, b: &FeatureMap, sim: &Grid<f64>) -> Grid<f64> {
    let (channels, _, _) = a.shape();
    Grid::from_fn(sim.rows(), sim.cols(), |row, col| {
        let norm = |m: &FeatureMap| {
            (0..channels)
                .map(|c| m.at(c, row, col).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let (na, nb) = (norm(a), norm(b));
        if na == 0.0 || nb == 0.0 {
            return ((1.0 - sim.get(row, col)) / 2.0).clamp(0.0, 1.0);
        }
        let gap: f64 = (0..channels)
            .map(|c| (a.at(c, row, col) / na - b.at(c, row, col) / nb).powi(2))
            .sum();
        (gap / 4.0).clamp(0.0, 1.0)
    })
}

/// Foreground cells of the input view at difference-map resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectMask {
    cells: Grid<bool>,
}

impl ObjectMask {
    pub fn new(cells: Grid<bool>) -> Result<Self> {
        if !cells.as_slice().iter().any(|&c| c) {
            return Err(Error::EmptyMask);
        }
        Ok(Self { cells })
    }

    pub fn cells(&self) -> &Grid<bool> {
        &self.cells
    }

    /// Tight `(row0, col0, rows, cols)` rectangle around the foreground.
    pub fn bounding_rect(&self) -> (usize, usize, usize, usize) {
        let (mut r0, mut c0, mut r1, mut c1) = (usize::MAX, usize::MAX, 0, 0);
        for r in 0..self.cells.rows() {
            for c in 0..self.cells.cols() {
                if *self.cells.get(r, c) {
                    r0 = r0.min(r);
                    c0 = c0.min(c);
                    r1 = r1.max(r);
                    c1 = c1.max(c);
                }
            }
        }
        (r0, c0, r1 - r0 + 1, c1 - c0 + 1)
    }
}

/// Difference map cropped to the mask's bounding rectangle.
///
/// Cells inside the rectangle but outside the mask keep their values and are
/// flagged in `in_mask`.
#[derive(Debug, Clone, PartialEq)]
pub struct CroppedDifferenceMap {
    pub values: Grid<f64>,
    pub in_mask: Grid<bool>,
    pub offset: (usize, usize),
}

impl CroppedDifferenceMap {
    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }
}

/// Crops any grid to `(row0, col0, rows, cols)`.
pub fn crop_grid<T: Clone>(grid: &Grid<T>, rect: (usize, usize, usize, usize)) -> Grid<T> {
    let (r0, c0, rows, cols) = rect;
    Grid::from_fn(rows, cols, |r, c| grid.get(r0 + r, c0 + c).clone())
}

pub fn crop_to_mask(d: &DifferenceMap, mask: &ObjectMask) -> Result<CroppedDifferenceMap> {
    if d.values.shape() != mask.cells.shape() {
        return Err(Error::ShapeMismatch(format!(
            "difference map {:?} vs mask {:?}",
            d.values.shape(),
            mask.cells.shape()
        )));
    }
    let rect = mask.bounding_rect();
    Ok(CroppedDifferenceMap {
        values: crop_grid(&d.values, rect),
        in_mask: crop_grid(&mask.cells, rect),
        offset: (rect.0, rect.1),
    })
}
