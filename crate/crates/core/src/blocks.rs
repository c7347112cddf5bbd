//! Weighted 3D block grid built from the cropped difference maps.
//!
//! Blocks live in the *view frame*: the axes of the input camera (x right,
//! y down, z away from the camera) with the origin at the object center.
//! Slice `i` is the `i`-th slab in depth from the front, row `j` and column `k`
//! follow the image layout.

use serde::{Deserialize, Serialize};

use crate::diffmap::CroppedDifferenceMap;
use crate::error::{Error, Result};
use crate::geometry::{pose_to_transform, Aabb, SphericalPose, Vec3};
use nalgebra::Matrix3;

/// Tolerance when checking serialized boxes against the partition.
const PARTITION_TOLERANCE: f64 = 1e-9;

/// Estimated object box: edge lengths along view-frame x, y and depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBoxEstimate {
    pub width: f64,
    pub height: f64,
    pub length: f64,
    /// Offset of the box center from the object center, in view-frame axes.
    #[serde(default = "zero3")]
    pub center: [f64; 3],
}

fn zero3() -> [f64; 3] {
    [0.0; 3]
}

impl BoundingBoxEstimate {
    pub fn new(width: f64, height: f64, length: f64) -> Result<Self> {
        Self::with_center(width, height, length, Vec3::zeros())
    }

    pub fn with_center(width: f64, height: f64, length: f64, center: Vec3) -> Result<Self> {
        if [width, height, length]
            .iter()
            .any(|e| !(e.is_finite() && *e > 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "bounding box edges must be positive, got {width}, {height}, {length}"
            )));
        }
        Ok(Self {
            width,
            height,
            length,
            center: center.into(),
        })
    }

    pub fn edges(&self) -> Vec3 {
        Vec3::new(self.width, self.height, self.length)
    }

    pub fn aabb(&self) -> Aabb {
        let c = Vec3::from(self.center);
        let half = self.edges() * 0.5;
        Aabb::new(c - half, c + half).expect("positive edges")
    }

    pub fn diagonal(&self) -> f64 {
        self.edges().norm()
    }
}

/// Zero-based `(slice, row, col)` position in the partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockIndex {
    pub slice: usize,
    pub row: usize,
    pub col: usize,
}

impl BlockIndex {
    pub fn new(slice: usize, row: usize, col: usize) -> Self {
        Self { slice, row, col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemanticBlock {
    pub index: BlockIndex,
    pub aabb: Aabb,
    pub weight: f64,
}

/// `M x H' x W'` grid of slice-emptiness flags.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceOccupancy {
    dims: (usize, usize, usize),
    cells: Vec<bool>,
}

impl SliceOccupancy {
    pub fn new(dims: (usize, usize, usize), cells: Vec<bool>) -> Result<Self> {
        if cells.len() != dims.0 * dims.1 * dims.2 {
            return Err(Error::ShapeMismatch(format!(
                "{} occupancy flags for dims {dims:?}",
                cells.len()
            )));
        }
        Ok(Self { dims, cells })
    }

    pub fn filled(dims: (usize, usize, usize), value: bool) -> Self {
        Self {
            dims,
            cells: vec![value; dims.0 * dims.1 * dims.2],
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.cells[(i * self.dims.1 + j) * self.dims.2 + k]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

/// Immutable weighted block set plus the input-view orientation it was built in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockGrid {
    dims: (usize, usize, usize),
    bbox: BoundingBoxEstimate,
    input_elevation_deg: f64,
    blocks: Vec<SemanticBlock>,
}

impl BlockGrid {
    /// Builds a grid from explicit `(index, weight)` entries.
    pub fn from_weights(
        dims: (usize, usize, usize),
        bbox: BoundingBoxEstimate,
        input_elevation_deg: f64,
        entries: impl IntoIterator<Item = (BlockIndex, f64)>,
    ) -> Result<Self> {
        if dims.0 == 0 || dims.1 == 0 || dims.2 == 0 {
            return Err(Error::ShapeMismatch(format!("grid dims {dims:?} must be positive")));
        }
        if !(-90.0..=90.0).contains(&input_elevation_deg) {
            return Err(Error::InvalidParameter(format!(
                "input elevation {input_elevation_deg} outside [-90, 90]"
            )));
        }
        let mut blocks: Vec<SemanticBlock> = Vec::new();
        for (index, weight) in entries {
            if index.slice >= dims.0 || index.row >= dims.1 || index.col >= dims.2 {
                return Err(Error::ShapeMismatch(format!(
                    "block index {index:?} outside grid dims {dims:?}"
                )));
            }
            if !(0.0..=1.0).contains(&weight) {
                return Err(Error::InvalidParameter(format!(
                    "block weight {weight} outside [0, 1]"
                )));
            }
            blocks.push(SemanticBlock {
                index,
                aabb: cell_box(&bbox, dims, index),
                weight,
            });
        }
        blocks.sort_by_key(|b| b.index);
        if blocks.windows(2).any(|w| w[0].index == w[1].index) {
            return Err(Error::InvalidParameter("duplicate block index".into()));
        }
        Ok(Self {
            dims,
            bbox,
            input_elevation_deg,
            blocks,
        })
    }

    /// Re-checks a deserialized grid: indices, weights and boxes must agree
    /// with the partition of its bounding box.
    pub fn validated(self) -> Result<Self> {
        let rebuilt = Self::from_weights(
            self.dims,
            self.bbox,
            self.input_elevation_deg,
            self.blocks.iter().map(|b| (b.index, b.weight)),
        )?;
        for (stored, expected) in self.blocks.iter().zip(&rebuilt.blocks) {
            let off = (stored.aabb.min() - expected.aabb.min())
                .abs()
                .max()
                .max((stored.aabb.max() - expected.aabb.max()).abs().max());
            if off > PARTITION_TOLERANCE {
                return Err(Error::ShapeMismatch(format!(
                    "block {:?} box does not match the {:?} partition of the bounding box",
                    stored.index, self.dims
                )));
            }
        }
        Ok(rebuilt)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn bbox(&self) -> &BoundingBoxEstimate {
        &self.bbox
    }

    pub fn input_elevation_deg(&self) -> f64 {
        self.input_elevation_deg
    }

    pub fn blocks(&self) -> &[SemanticBlock] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Rotation taking world vectors into the view frame.
    pub fn world_to_view(&self) -> Matrix3<f64> {
        // radius does not affect the rotation
        let input = SphericalPose::new(0.0, self.input_elevation_deg, 1.0)
            .expect("validated elevation");
        pose_to_transform(&input).rotation
    }

    /// Camera center of `pose` expressed in the view frame.
    pub fn camera_in_view(&self, pose: &SphericalPose) -> Vec3 {
        self.world_to_view() * pose.position()
    }

    pub fn total_weight(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight).sum()
    }
}

fn cell_box(bbox: &BoundingBoxEstimate, dims: (usize, usize, usize), idx: BlockIndex) -> Aabb {
    let outer = bbox.aabb();
    let lo = outer.min();
    let hi = outer.max();
    // x <- col (W'), y <- row (H'), z <- slice (M)
    let edge = |axis: usize, n: usize, i: usize| {
        let t0 = i as f64 / n as f64;
        let t1 = (i + 1) as f64 / n as f64;
        (
            lo[axis] + (hi[axis] - lo[axis]) * t0,
            lo[axis] + (hi[axis] - lo[axis]) * t1,
        )
    };
    let (x0, x1) = edge(0, dims.2, idx.col);
    let (y0, y1) = edge(1, dims.1, idx.row);
    let (z0, z1) = edge(2, dims.0, idx.slice);
    Aabb::new(Vec3::new(x0, y0, z0), Vec3::new(x1, y1, z1)).expect("ordered cell corners")
}

/// Partitions the bounding box into `M x H' x W'` cells and keeps every cell
/// whose slice region is occupied, weighted by its cropped difference value.
pub fn build_block_grid(
    diffs: &[CroppedDifferenceMap],
    occupancy: &SliceOccupancy,
    bbox: BoundingBoxEstimate,
    input_elevation_deg: f64,
) -> Result<BlockGrid> {
    let m = diffs.len();
    if m == 0 {
        return Err(Error::ShapeMismatch("no slice difference maps".into()));
    }
    let (h, w) = diffs[0].shape();
    if let Some(bad) = diffs.iter().position(|d| d.shape() != (h, w)) {
        return Err(Error::ShapeMismatch(format!(
            "slice {bad} crop is {:?}, slice 0 is {:?}",
            diffs[bad].shape(),
            (h, w)
        )));
    }
    if occupancy.dims() != (m, h, w) {
        return Err(Error::ShapeMismatch(format!(
            "occupancy dims {:?} do not match {:?}",
            occupancy.dims(),
            (m, h, w)
        )));
    }
    let entries = (0..m).flat_map(|i| {
        (0..h).flat_map(move |j| (0..w).map(move |k| (i, j, k)))
    });
    let entries = entries
        .filter(|&(i, j, k)| occupancy.get(i, j, k))
        .map(|(i, j, k)| (BlockIndex::new(i, j, k), *diffs[i].values.get(j, k)));
    BlockGrid::from_weights((m, h, w), bbox, input_elevation_deg, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffmap::Grid;

    fn cropped(h: usize, w: usize, f: impl Fn(usize, usize) -> f64) -> CroppedDifferenceMap {
        CroppedDifferenceMap {
            values: Grid::from_fn(h, w, f),
            in_mask: Grid::filled(h, w, true),
            offset: (0, 0),
        }
    }

    #[test]
    fn uniform_fill_of_unit_cube() {
        let diffs: Vec<_> = (0..4).map(|_| cropped(2, 2, |_, _| 0.5)).collect();
        let occ = SliceOccupancy::filled((4, 2, 2), true);
        let bbox = BoundingBoxEstimate::new(1.0, 1.0, 1.0).unwrap();
        let grid = build_block_grid(&diffs, &occ, bbox, 0.0).unwrap();
        assert_eq!(grid.len(), 16);
        for b in grid.blocks() {
            let e = b.aabb.extent();
            assert!((e - Vec3::new(0.5, 0.5, 0.25)).norm() < 1e-12);
            assert_eq!(b.weight, 0.5);
        }
    }

    #[test]
    fn empty_occupancy_gives_empty_grid() {
        let diffs: Vec<_> = (0..4).map(|_| cropped(2, 2, |_, _| 0.5)).collect();
        let occ = SliceOccupancy::filled((4, 2, 2), false);
        let bbox = BoundingBoxEstimate::new(1.0, 1.0, 1.0).unwrap();
        assert!(build_block_grid(&diffs, &occ, bbox, 0.0).unwrap().is_empty());
    }

    #[test]
    fn hand_built_two_by_two_by_two() {
        // weights 0.1 .. 0.8 in (slice, row, col) order; cells (0,1,0) and (1,0,1) empty
        let diffs = vec![
            cropped(2, 2, |r, c| [[0.1, 0.2], [0.3, 0.4]][r][c]),
            cropped(2, 2, |r, c| [[0.5, 0.6], [0.7, 0.8]][r][c]),
        ];
        let mut flags = vec![true; 8];
        flags[2] = false; // (0,1,0)
        flags[5] = false; // (1,0,1)
        let occ = SliceOccupancy::new((2, 2, 2), flags).unwrap();
        // box 2 wide (x), 4 high (y), 6 long (z), centered at origin
        let bbox = BoundingBoxEstimate::new(2.0, 4.0, 6.0).unwrap();
        let grid = build_block_grid(&diffs, &occ, bbox, 0.0).unwrap();
        // centers by hand: x in {-0.5, 0.5}, y in {-1, 1}, z in {-1.5, 1.5}
        let expected = [
            ((0, 0, 0), [-0.5, -1.0, -1.5], 0.1),
            ((0, 0, 1), [0.5, -1.0, -1.5], 0.2),
            ((0, 1, 1), [0.5, 1.0, -1.5], 0.4),
            ((1, 0, 0), [-0.5, -1.0, 1.5], 0.5),
            ((1, 1, 0), [-0.5, 1.0, 1.5], 0.7),
            ((1, 1, 1), [0.5, 1.0, 1.5], 0.8),
        ];
        assert_eq!(grid.len(), expected.len());
        for (b, (idx, center, w)) in grid.blocks().iter().zip(expected) {
            assert_eq!(b.index, BlockIndex::new(idx.0, idx.1, idx.2));
            assert!((b.aabb.center() - Vec3::from(center)).norm() < 1e-12);
            assert_eq!(b.weight, w);
        }
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let diffs = vec![cropped(2, 2, |_, _| 0.1), cropped(2, 3, |_, _| 0.1)];
        let occ = SliceOccupancy::filled((2, 2, 2), true);
        let bbox = BoundingBoxEstimate::new(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            build_block_grid(&diffs, &occ, bbox, 0.0),
            Err(Error::ShapeMismatch(_))
        ));
        let diffs = vec![cropped(2, 2, |_, _| 0.1)];
        assert!(matches!(
            build_block_grid(&diffs, &occ, bbox, 0.0),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn view_frame_of_equatorial_input() {
        let bbox = BoundingBoxEstimate::new(1.0, 1.0, 1.0).unwrap();
        let grid = BlockGrid::from_weights((1, 1, 1), bbox, 0.0, []).unwrap();
        // the input camera sits in front of the object, on the -z side
        let cam = grid.camera_in_view(&SphericalPose::new(0.0, 0.0, 3.0).unwrap());
        assert!((cam - Vec3::new(0.0, 0.0, -3.0)).norm() < 1e-12);
        // a camera overhead looks down from -y (up)
        let top = grid.camera_in_view(&SphericalPose::new(0.0, 90.0, 3.0).unwrap());
        assert!((top - Vec3::new(0.0, -3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn serialized_grid_round_trips_and_validates() {
        let bbox = BoundingBoxEstimate::new(1.0, 2.0, 3.0).unwrap();
        let grid = BlockGrid::from_weights(
            (2, 2, 2),
            bbox,
            15.0,
            [(BlockIndex::new(0, 1, 1), 0.3), (BlockIndex::new(1, 0, 0), 0.9)],
        )
        .unwrap();
        let text = serde_json::to_string(&grid).unwrap();
        let back: BlockGrid = serde_json::from_str(&text).unwrap();
        assert_eq!(back.validated().unwrap(), grid);

        let mut tampered = grid.clone();
        tampered.dims = (2, 2, 3);
        assert!(matches!(tampered.validated(), Err(Error::ShapeMismatch(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn grid_case() -> impl Strategy<Value = ((usize, usize, usize), Vec<bool>, Vec<f64>, [f64; 3])> {
            (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|dims| {
                let n = dims.0 * dims.1 * dims.2;
                (
                    Just(dims),
                    proptest::collection::vec(any::<bool>(), n),
                    proptest::collection::vec(0.0..=1.0f64, n),
                    [0.2..3.0f64, 0.2..3.0f64, 0.2..3.0f64],
                )
            })
        }

        fn build(dims: (usize, usize, usize), occ: &[bool], w: &[f64], edges: [f64; 3]) -> BlockGrid {
            let diffs: Vec<_> = (0..dims.0)
                .map(|i| cropped(dims.1, dims.2, |r, c| w[(i * dims.1 + r) * dims.2 + c]))
                .collect();
            let occ = SliceOccupancy::new(dims, occ.to_vec()).unwrap();
            let bbox = BoundingBoxEstimate::new(edges[0], edges[1], edges[2]).unwrap();
            build_block_grid(&diffs, &occ, bbox, 0.0).unwrap()
        }

        proptest! {
            #[test]
            fn blocks_tile_the_box((dims, occ, w, edges) in grid_case()) {
                let grid = build(dims, &occ, &w, edges);
                prop_assert_eq!(grid.len(), occ.iter().filter(|&&o| o).count());
                let outer = grid.bbox().aabb().inflated(1e-12);
                for (n, a) in grid.blocks().iter().enumerate() {
                    prop_assert!(outer.contains(&a.aabb.min()) && outer.contains(&a.aabb.max()));
                    for b in &grid.blocks()[n + 1..] {
                        // interiors disjoint: overlap along at least one axis is <= 0
                        let overlap = (0..3).map(|ax| {
                            a.aabb.max()[ax].min(b.aabb.max()[ax]) - a.aabb.min()[ax].max(b.aabb.min()[ax])
                        }).fold(f64::INFINITY, f64::min);
                        prop_assert!(overlap <= 1e-12);
                    }
                }
            }

            #[test]
            fn doubling_the_box_scales_blocks((dims, occ, w, edges) in grid_case()) {
                let g1 = build(dims, &occ, &w, edges);
                let g2 = build(dims, &occ, &w, [edges[0] * 2.0, edges[1] * 2.0, edges[2] * 2.0]);
                for (a, b) in g1.blocks().iter().zip(g2.blocks()) {
                    prop_assert!((a.aabb.extent() * 2.0 - b.aabb.extent()).norm() < 1e-9);
                    prop_assert!((a.aabb.center() * 2.0 - b.aabb.center()).norm() < 1e-9);
                    prop_assert_eq!(a.weight, b.weight);
                }
            }
        }
    }
}
