//! End-to-end planning: features and masks in, winning orbit out.

use crate::blocks::{build_block_grid, BlockGrid, BoundingBoxEstimate, SliceOccupancy};
use crate::diffmap::{
    crop_grid, crop_to_mask, difference_map_with, DifferenceMode, FeatureMap, Grid, ObjectMask,
};
use crate::error::{Error, Result};
use crate::geometry::CameraModel;
use crate::planner::{
    default_step_set, enumerate_candidates, preference, score_candidates, OrbitSpec,
    ScoredTrajectory, ScoringMode,
};

/// Reduces a binary grid to `rows x cols`: an output cell is set when any
/// source cell it covers is set. Source cells are split as evenly as
/// possible; when sizes do not divide, boundary cells belong to both
/// neighbours.
pub fn downsample_any(src: &Grid<bool>, rows: usize, cols: usize) -> Result<Grid<bool>> {
    let (h, w) = src.shape();
    if rows == 0 || cols == 0 || h < rows || w < cols {
        return Err(Error::ShapeMismatch(format!(
            "cannot downsample {:?} to {:?}",
            (h, w),
            (rows, cols)
        )));
    }
    let span = |i: usize, n: usize, big: usize| (i * big / n, ((i + 1) * big).div_ceil(n));
    Ok(Grid::from_fn(rows, cols, |r, c| {
        let (r0, r1) = span(r, rows, h);
        let (c0, c1) = span(c, cols, w);
        (r0..r1).any(|y| (c0..c1).any(|x| *src.get(y, x)))
    }))
}

#[derive(Debug, Clone)]
pub struct PlanInputs {
    pub input_features: FeatureMap,
    /// One feature map per slice, front to rear.
    pub slice_features: Vec<FeatureMap>,
    /// Foreground of the input view, at feature resolution or finer.
    pub mask: Grid<bool>,
    /// Non-empty regions of each slice, at feature resolution or finer.
    pub occupancy: Vec<Grid<bool>>,
    pub bbox: BoundingBoxEstimate,
    pub orbit: OrbitSpec,
    pub camera: CameraModel,
    pub step_set: Vec<f64>,
    pub scoring: ScoringMode,
    pub difference: DifferenceMode,
}

impl PlanInputs {
    /// Inputs with default camera, step set and modes.
    pub fn new(
        input_features: FeatureMap,
        slice_features: Vec<FeatureMap>,
        mask: Grid<bool>,
        occupancy: Vec<Grid<bool>>,
        bbox: BoundingBoxEstimate,
        orbit: OrbitSpec,
    ) -> Self {
        Self {
            input_features,
            slice_features,
            mask,
            occupancy,
            bbox,
            orbit,
            camera: CameraModel::default(),
            step_set: default_step_set(),
            scoring: ScoringMode::default(),
            difference: DifferenceMode::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub grid: BlockGrid,
    /// Every candidate, in enumeration order.
    pub scored: Vec<ScoredTrajectory>,
    pub best: ScoredTrajectory,
}

/// Builds the weighted block grid from features, mask and occupancy.
pub fn block_grid_from_features(inputs: &PlanInputs) -> Result<BlockGrid> {
    let m = inputs.slice_features.len();
    if m == 0 {
        return Err(Error::ShapeMismatch("no slice feature maps".into()));
    }
    if inputs.occupancy.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "{} occupancy slices for {m} slice feature maps",
            inputs.occupancy.len()
        )));
    }
    let (_, h, w) = inputs.input_features.shape();
    let mask = ObjectMask::new(downsample_any(&inputs.mask, h, w)?)?;
    let rect = mask.bounding_rect();
    let mut diffs = Vec::with_capacity(m);
    for (i, slice) in inputs.slice_features.iter().enumerate() {
        let d = difference_map_with(&inputs.input_features, slice, inputs.difference).map_err(
            |e| match e {
                Error::ShapeMismatch(msg) => Error::ShapeMismatch(format!("slice {i}: {msg}")),
                other => other,
            },
        )?;
        diffs.push(crop_to_mask(&d, &mask)?);
    }
    let (_, _, rows, cols) = rect;
    let mut cells = Vec::with_capacity(m * rows * cols);
    for occ in &inputs.occupancy {
        let cropped = crop_grid(&downsample_any(occ, h, w)?, rect);
        cells.extend_from_slice(cropped.as_slice());
    }
    let occupancy = SliceOccupancy::new((m, rows, cols), cells)?;
    build_block_grid(&diffs, &occupancy, inputs.bbox, inputs.orbit.initial_elevation_deg)
}

/// Scores the whole candidate family and picks the preferred orbit.
pub fn plan(inputs: &PlanInputs) -> Result<PlanOutcome> {
    let grid = block_grid_from_features(inputs)?;
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let candidates = enumerate_candidates(&inputs.orbit, &inputs.step_set)?;
    let scored = score_candidates(&candidates, &grid, &inputs.camera, inputs.scoring);
    let best = scored
        .iter()
        .min_by(|a, b| preference(a, b))
        .cloned()
        .ok_or(Error::EmptyCandidates)?;
    Ok(PlanOutcome { grid, scored, best })
}
