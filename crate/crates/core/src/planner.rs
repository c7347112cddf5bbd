//! Closed-orbit candidate family, per-pose visibility and trajectory scoring.
//!
//! An orbit of `4L + 1` frames advances azimuth by a fixed step and splits the
//! `4L` elevation increments into four segments of `L` steps. Only the first
//! two segments are free; the last two replay them mirrored and negated, so
//! the elevation profile is a palindrome and the orbit closes exactly.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blocks::{BlockGrid, BlockIndex};
use crate::error::{Error, Result};
use crate::geometry::{off_axis_angle_deg, ray_aabb_intersect, CameraModel, SphericalPose, Vec3};

pub const DEFAULT_FRAMES: usize = 21;
pub const DEFAULT_AZIMUTH_STEP_DEG: f64 = 18.0;
/// Largest per-frame elevation change allowed for any trajectory.
pub const MAX_ELEVATION_STEP_DEG: f64 = 5.0;

/// Integer steps `-5..=5` degrees.
pub fn default_step_set() -> Vec<f64> {
    (-5..=5).map(f64::from).collect()
}

/// Orbit parameters shared by every trajectory in a planning run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub initial_elevation_deg: f64,
    pub radius: f64,
    pub frames: usize,
    pub azimuth_step_deg: f64,
}

impl OrbitSpec {
    pub fn new(initial_elevation_deg: f64, radius: f64) -> Self {
        Self {
            initial_elevation_deg,
            radius,
            frames: DEFAULT_FRAMES,
            azimuth_step_deg: DEFAULT_AZIMUTH_STEP_DEG,
        }
    }

    pub fn with_frames(mut self, frames: usize) -> Self {
        self.frames = frames;
        self
    }

    pub fn with_azimuth_step(mut self, step_deg: f64) -> Self {
        self.azimuth_step_deg = step_deg;
        self
    }

    /// Steps per segment.
    pub fn segment_len(&self) -> Result<usize> {
        if self.frames < 5 || !(self.frames - 1).is_multiple_of(4) {
            return Err(Error::InvalidFrameCount {
                frames: self.frames,
            });
        }
        Ok((self.frames - 1) / 4)
    }

    fn validate(&self) -> Result<usize> {
        let len = self.segment_len()?;
        SphericalPose::new(0.0, self.initial_elevation_deg, self.radius)?;
        let last_azimuth = self.azimuth_step_deg * (self.frames - 1) as f64;
        if !(self.azimuth_step_deg > 0.0 && last_azimuth <= 360.0 + 1e-9) {
            return Err(Error::InvalidParameter(format!(
                "azimuth step {} over {} frames leaves [0, 360]",
                self.azimuth_step_deg, self.frames
            )));
        }
        Ok(len)
    }

    /// Builds the orbit from the `2L` free increments.
    fn trajectory(&self, first_half: &[f64], kind: TrajectoryKind) -> Result<Trajectory> {
        let len = self.validate()?;
        debug_assert_eq!(first_half.len(), 2 * len);
        let mut elevations = Vec::with_capacity(self.frames);
        let mut e = self.initial_elevation_deg;
        elevations.push(e);
        for step in first_half {
            e += step;
            elevations.push(e.clamp(-90.0, 90.0));
        }
        // mirror: frame 2L + m repeats frame 2L - m
        for m in 1..=2 * len {
            elevations.push(elevations[2 * len - m]);
        }
        let poses = elevations
            .iter()
            .enumerate()
            .map(|(t, &el)| {
                let az = (self.azimuth_step_deg * t as f64).min(360.0);
                SphericalPose::new(az, el, self.radius)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { poses, kind })
    }
}

/// Where a trajectory came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TrajectoryKind {
    /// Member of the candidate family with per-segment steps `(delta1, delta2)`.
    Candidate { delta1: f64, delta2: f64 },
    Static,
    Random { seed: u64 },
}

impl TrajectoryKind {
    /// `static`, `random` or `adaptive`.
    pub fn tag(&self) -> &'static str {
        match self {
            TrajectoryKind::Candidate { .. } => "adaptive",
            TrajectoryKind::Static => "static",
            TrajectoryKind::Random { .. } => "random",
        }
    }

    /// Per-segment steps, when the trajectory has constant-rate segments.
    pub fn deltas(&self) -> Option<(f64, f64)> {
        match *self {
            TrajectoryKind::Candidate { delta1, delta2 } => Some((delta1, delta2)),
            TrajectoryKind::Static => Some((0.0, 0.0)),
            TrajectoryKind::Random { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    poses: Vec<SphericalPose>,
    kind: TrajectoryKind,
}

impl Trajectory {
    /// Wraps an arbitrary pose list, e.g. one read back from disk.
    pub fn from_poses(poses: Vec<SphericalPose>, kind: TrajectoryKind) -> Self {
        Self { poses, kind }
    }

    pub fn poses(&self) -> &[SphericalPose] {
        &self.poses
    }

    pub fn kind(&self) -> TrajectoryKind {
        self.kind
    }

    pub fn elevations(&self) -> Vec<f64> {
        self.poses.iter().map(|p| p.elevation_deg()).collect()
    }

    pub fn is_closed(&self) -> bool {
        match (self.poses.first(), self.poses.last()) {
            (Some(a), Some(b)) => a.elevation_deg() == b.elevation_deg(),
            _ => false,
        }
    }

    pub fn max_elevation_step(&self) -> f64 {
        self.poses
            .windows(2)
            .map(|w| (w[1].elevation_deg() - w[0].elevation_deg()).abs())
            .fold(0.0, f64::max)
    }

    /// Structural checks: nonempty, closed within `tol`, bounded steps and a
    /// constant azimuth advance. Returns a list of human-readable problems.
    pub fn check(&self, tol: f64) -> Vec<String> {
        let mut problems = Vec::new();
        let (Some(first), Some(last)) = (self.poses.first(), self.poses.last()) else {
            problems.push("trajectory has no frames".to_string());
            return problems;
        };
        if (first.elevation_deg() - last.elevation_deg()).abs() > tol {
            problems.push(format!(
                "not closed: first elevation {} != last elevation {}",
                first.elevation_deg(),
                last.elevation_deg()
            ));
        }
        let step = self.max_elevation_step();
        if step > MAX_ELEVATION_STEP_DEG + tol {
            problems.push(format!("elevation step {step} exceeds {MAX_ELEVATION_STEP_DEG}"));
        }
        if self.poses.len() > 2 {
            let d0 = self.poses[1].azimuth_deg() - self.poses[0].azimuth_deg();
            if self.poses.windows(2).any(|w| {
                ((w[1].azimuth_deg() - w[0].azimuth_deg()) - d0).abs() > tol
            }) {
                problems.push("azimuth does not advance by a constant step".to_string());
            }
        }
        problems
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    trajectories: Vec<Trajectory>,
}

impl CandidateSet {
    pub fn from_trajectories(trajectories: Vec<Trajectory>) -> Self {
        Self { trajectories }
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }
}

/// One trajectory per `(delta1, delta2)` in `step_set x step_set`: segment
/// increments `delta1, delta2, -delta2, -delta1`.
///
/// Elevations that would leave `[-90, 90]` are clamped at the pole.
pub fn enumerate_candidates(orbit: &OrbitSpec, step_set: &[f64]) -> Result<CandidateSet> {
    let len = orbit.validate()?;
    if let Some(bad) = step_set
        .iter()
        .find(|s| !(s.abs() <= MAX_ELEVATION_STEP_DEG))
    {
        return Err(Error::InvalidParameter(format!(
            "elevation step {bad} exceeds {MAX_ELEVATION_STEP_DEG}"
        )));
    }
    let mut trajectories = Vec::with_capacity(step_set.len() * step_set.len());
    for &delta1 in step_set {
        for &delta2 in step_set {
            let steps: Vec<f64> = std::iter::repeat_n(delta1, len)
                .chain(std::iter::repeat_n(delta2, len))
                .collect();
            trajectories.push(orbit.trajectory(&steps, TrajectoryKind::Candidate { delta1, delta2 })?);
        }
    }
    Ok(CandidateSet { trajectories })
}

/// Fixed-elevation orbit at the input elevation.
pub fn static_trajectory(orbit: &OrbitSpec) -> Result<Trajectory> {
    let len = orbit.validate()?;
    orbit.trajectory(&vec![0.0; 2 * len], TrajectoryKind::Static)
}

/// Closed orbit whose first-half increments are drawn uniformly from
/// `[-5, 5]` degrees by a ChaCha8 generator seeded with `seed`.
pub fn random_trajectory(orbit: &OrbitSpec, seed: u64) -> Result<Trajectory> {
    let len = orbit.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps: Vec<f64> = (0..2 * len)
        .map(|_| rng.random_range(-MAX_ELEVATION_STEP_DEG..=MAX_ELEVATION_STEP_DEG))
        .collect();
    orbit.trajectory(&steps, TrajectoryKind::Random { seed })
}

/// Visible blocks for each pose of a trajectory.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VisibilitySet {
    pub per_pose: Vec<Vec<BlockIndex>>,
}

/// How cumulative visibility counts repeated sightings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoringMode {
    /// A block counts once for every frame that sees it.
    #[default]
    PerFrame,
    /// A block counts once if any frame sees it.
    UniqueCount,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTrajectory {
    pub trajectory: Trajectory,
    pub score: f64,
    pub visibility: VisibilitySet,
}

/// Positions (into `grid.blocks()`) of blocks seen from `eye`, a camera
/// center in the view frame looking at the object center.
fn visible_from(eye: &Vec3, grid: &BlockGrid, camera: &CameraModel) -> Vec<usize> {
    let forward = -eye;
    let limit = camera.acceptance_angle_deg();
    let blocks = grid.blocks();
    (0..blocks.len())
        .filter(|&target| {
            let center = blocks[target].aabb.center();
            if off_axis_angle_deg(eye, &forward, &center) > limit {
                return false;
            }
            !blocks
                .iter()
                .enumerate()
                .any(|(other, b)| other != target && ray_aabb_intersect(eye, &center, &b.aabb))
        })
        .collect()
}

/// Blocks passing both the field-of-view check and the occlusion check.
pub fn visible_set(pose: &SphericalPose, grid: &BlockGrid, camera: &CameraModel) -> Vec<BlockIndex> {
    let eye = grid.camera_in_view(pose);
    visible_from(&eye, grid, camera)
        .into_iter()
        .map(|i| grid.blocks()[i].index)
        .collect()
}

fn pose_key(pose: &SphericalPose) -> (u64, u64, u64) {
    (
        pose.azimuth_deg().to_bits(),
        pose.elevation_deg().to_bits(),
        pose.radius().to_bits(),
    )
}

/// Memoized per-pose visibility for one grid and camera.
struct VisibilityCache<'a> {
    grid: &'a BlockGrid,
    sets: HashMap<(u64, u64, u64), Vec<usize>>,
}

impl<'a> VisibilityCache<'a> {
    fn build<'t>(
        grid: &'a BlockGrid,
        camera: &CameraModel,
        trajectories: impl IntoIterator<Item = &'t Trajectory>,
    ) -> Self {
        let mut distinct: Vec<SphericalPose> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for t in trajectories {
            for p in t.poses() {
                if seen.insert(pose_key(p)) {
                    distinct.push(*p);
                }
            }
        }
        let rotation = grid.world_to_view();
        let sets = distinct
            .par_iter()
            .map(|p| (pose_key(p), visible_from(&(rotation * p.position()), grid, camera)))
            .collect();
        Self { grid, sets }
    }

    fn score(&self, trajectory: &Trajectory, mode: ScoringMode) -> ScoredTrajectory {
        let blocks = self.grid.blocks();
        let per_pose: Vec<&Vec<usize>> = trajectory
            .poses()
            .iter()
            .map(|p| &self.sets[&pose_key(p)])
            .collect();
        let score: f64 = match mode {
            ScoringMode::PerFrame => per_pose
                .iter()
                .map(|set| set.iter().map(|&i| blocks[i].weight).sum::<f64>())
                .sum(),
            ScoringMode::UniqueCount => {
                let mut seen = vec![false; blocks.len()];
                per_pose.iter().flat_map(|s| s.iter()).for_each(|&i| seen[i] = true);
                seen.iter()
                    .zip(blocks)
                    .filter(|(s, _)| **s)
                    .map(|(_, b)| b.weight)
                    .sum()
            }
        };
        ScoredTrajectory {
            trajectory: trajectory.clone(),
            // float sums start from -0.0; an empty sum should read as 0
            score: score + 0.0,
            visibility: VisibilitySet {
                per_pose: per_pose
                    .iter()
                    .map(|set| set.iter().map(|&i| blocks[i].index).collect())
                    .collect(),
            },
        }
    }
}

/// Cumulative visible weight over all poses.
pub fn score_trajectory(
    trajectory: &Trajectory,
    grid: &BlockGrid,
    camera: &CameraModel,
) -> ScoredTrajectory {
    score_trajectory_with(trajectory, grid, camera, ScoringMode::PerFrame)
}

pub fn score_trajectory_with(
    trajectory: &Trajectory,
    grid: &BlockGrid,
    camera: &CameraModel,
    mode: ScoringMode,
) -> ScoredTrajectory {
    VisibilityCache::build(grid, camera, [trajectory]).score(trajectory, mode)
}

/// Scores every candidate, in input order.
pub fn score_candidates(
    candidates: &CandidateSet,
    grid: &BlockGrid,
    camera: &CameraModel,
    mode: ScoringMode,
) -> Vec<ScoredTrajectory> {
    let cache = VisibilityCache::build(grid, camera, candidates.trajectories());
    candidates
        .trajectories()
        .par_iter()
        .map(|t| cache.score(t, mode))
        .collect()
}

/// Preference order among scored trajectories: higher score first, then the
/// flattest orbit (smallest `|delta1| + |delta2|`), then smallest `delta1`,
/// then smallest `delta2`. Trajectories without constant-rate segments rank
/// after those with them on ties.
pub fn preference(a: &ScoredTrajectory, b: &ScoredTrajectory) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| {
        match (a.trajectory.kind().deltas(), b.trajectory.kind().deltas()) {
            (Some((a1, a2)), Some((b1, b2))) => (a1.abs() + a2.abs())
                .total_cmp(&(b1.abs() + b2.abs()))
                .then(a1.total_cmp(&b1))
                .then(a2.total_cmp(&b2)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        }
    })
}

pub fn select_best(
    candidates: &CandidateSet,
    grid: &BlockGrid,
    camera: &CameraModel,
) -> Result<ScoredTrajectory> {
    select_best_with(candidates, grid, camera, ScoringMode::PerFrame)
}

pub fn select_best_with(
    candidates: &CandidateSet,
    grid: &BlockGrid,
    camera: &CameraModel,
    mode: ScoringMode,
) -> Result<ScoredTrajectory> {
    score_candidates(candidates, grid, camera, mode)
        .into_iter()
        .min_by(preference)
        .ok_or(Error::EmptyCandidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::BoundingBoxEstimate;

    fn orbit() -> OrbitSpec {
        OrbitSpec::new(10.0, 3.0)
    }

    #[test]
    fn default_family_has_121_members() {
        let set = enumerate_candidates(&orbit(), &default_step_set()).unwrap();
        assert_eq!(set.len(), 121);
        for t in set.trajectories() {
            assert_eq!(t.poses().len(), 21);
            assert!(t.is_closed());
            assert!(t.max_elevation_step() <= 5.0);
        }
    }

    #[test]
    fn zero_steps_equal_static_orbit() {
        let set = enumerate_candidates(&orbit(), &default_step_set()).unwrap();
        let flat = set
            .trajectories()
            .iter()
            .find(|t| t.kind().deltas() == Some((0.0, 0.0)))
            .unwrap();
        let stat = static_trajectory(&orbit()).unwrap();
        assert_eq!(flat.poses(), stat.poses());
    }

    #[test]
    fn five_minus_three_profile_matches_prefix_sums() {
        let set = enumerate_candidates(&orbit(), &[5.0, -3.0]).unwrap();
        let t = set
            .trajectories()
            .iter()
            .find(|t| t.kind().deltas() == Some((5.0, -3.0)))
            .unwrap();
        // by hand: +5 x5, -3 x5, +3 x5, -5 x5 starting from 10
        let mut want = vec![10.0];
        for step in [5.0, -3.0, 3.0, -5.0] {
            for _ in 0..5 {
                let last = *want.last().unwrap();
                want.push(last + step);
            }
        }
        assert_eq!(
            want,
            vec![
                10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 32.0, 29.0, 26.0, 23.0, 20.0, 23.0, 26.0,
                29.0, 32.0, 35.0, 30.0, 25.0, 20.0, 15.0, 10.0
            ]
        );
        assert_eq!(t.elevations(), want);
        let az: Vec<f64> = t.poses().iter().map(|p| p.azimuth_deg()).collect();
        assert_eq!(az, (0..21).map(|i| 18.0 * i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn invalid_frame_counts_are_rejected() {
        for frames in [0, 4, 20, 22] {
            assert!(matches!(
                enumerate_candidates(&orbit().with_frames(frames), &default_step_set()),
                Err(Error::InvalidFrameCount { .. })
            ));
        }
        let nine = orbit().with_frames(9).with_azimuth_step(45.0);
        assert_eq!(enumerate_candidates(&nine, &[1.0]).unwrap().len(), 1);
    }

    #[test]
    fn extreme_input_elevation_is_clamped() {
        let set = enumerate_candidates(&OrbitSpec::new(80.0, 2.0), &default_step_set()).unwrap();
        for t in set.trajectories() {
            assert!(t.elevations().iter().all(|e| (-90.0..=90.0).contains(e)));
            assert!(t.is_closed());
        }
    }

    #[test]
    fn static_orbit_examples() {
        let t = static_trajectory(&OrbitSpec::new(30.0, 2.0)).unwrap();
        assert!(t.elevations().iter().all(|&e| e == 30.0));
        assert_eq!(t.poses().last().unwrap().azimuth_deg(), 360.0);
        let t0 = static_trajectory(&OrbitSpec::new(0.0, 2.0)).unwrap();
        assert!(t0.elevations().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn random_orbits_are_deterministic_and_closed() {
        let a = random_trajectory(&orbit(), 42).unwrap();
        let b = random_trajectory(&orbit(), 42).unwrap();
        assert_eq!(a, b);
        assert!(a.is_closed());
        assert!(a.max_elevation_step() <= 5.0);
        assert_ne!(a, random_trajectory(&orbit(), 43).unwrap());
    }

    #[test]
    fn random_orbit_golden_seed_42() {
        let t = random_trajectory(&OrbitSpec::new(0.0, 2.0), 42).unwrap();
        let got: Vec<String> = t.elevations().iter().map(|e| format!("{e:.6}")).collect();
        assert_eq!(got, GOLDEN_SEED_42);
    }

    // Recorded from the first run of random_trajectory(elevation 0, seed 42).
    const GOLDEN_SEED_42: [&str; 21] = [
        "0.000000",
        "1.818962",
        "6.321716",
        "5.596880",
        "6.870485",
        "4.756424",
        "1.256013",
        "-0.663582",
        "2.375146",
        "5.087634",
        "2.473486",
        "5.087634",
        "2.375146",
        "-0.663582",
        "1.256013",
        "4.756424",
        "6.870485",
        "5.596880",
        "6.321716",
        "1.818962",
        "0.000000",
    ];

    fn unit_grid(entries: &[((usize, usize, usize), f64)], dims: (usize, usize, usize)) -> BlockGrid {
        BlockGrid::from_weights(
            dims,
            BoundingBoxEstimate::new(1.0, 1.0, 1.0).unwrap(),
            0.0,
            entries.iter().map(|&((i, j, k), w)| (BlockIndex::new(i, j, k), w)),
        )
        .unwrap()
    }

    #[test]
    fn lone_block_is_always_visible() {
        let grid = unit_grid(&[((0, 0, 0), 0.7)], (1, 1, 1));
        let cam = CameraModel::default();
        let t = static_trajectory(&OrbitSpec::new(20.0, 5.0)).unwrap();
        for p in t.poses() {
            assert_eq!(visible_set(p, &grid, &cam).len(), 1);
        }
        let scored = score_trajectory(&t, &grid, &cam);
        assert!((scored.score - 14.7).abs() < 1e-12);
    }

    #[test]
    fn nearer_block_hides_farther_one() {
        // two slices along depth; the input camera looks down +z in the view frame
        let grid = unit_grid(&[((0, 0, 0), 0.2), ((1, 0, 0), 0.9)], (2, 1, 1));
        let cam = CameraModel::default();
        let front = SphericalPose::new(0.0, 0.0, 5.0).unwrap();
        assert_eq!(visible_set(&front, &grid, &cam), vec![BlockIndex::new(0, 0, 0)]);
        let back = SphericalPose::new(180.0, 0.0, 5.0).unwrap();
        assert_eq!(visible_set(&back, &grid, &cam), vec![BlockIndex::new(1, 0, 0)]);
    }

    #[test]
    fn empty_grid_scores_zero_and_prefers_flat_orbit() {
        let grid = unit_grid(&[], (1, 1, 1));
        let set = enumerate_candidates(&orbit(), &default_step_set()).unwrap();
        let cam = CameraModel::default();
        let all = score_candidates(&set, &grid, &cam, ScoringMode::PerFrame);
        assert!(all.iter().all(|s| s.score == 0.0));
        let best = select_best(&set, &grid, &cam).unwrap();
        assert_eq!(best.trajectory.kind().deltas(), Some((0.0, 0.0)));
    }

    #[test]
    fn singleton_and_empty_candidate_sets() {
        let grid = unit_grid(&[((0, 0, 0), 0.5)], (1, 1, 1));
        let cam = CameraModel::default();
        let one = enumerate_candidates(&orbit(), &[3.0]).unwrap();
        let best = select_best(&one, &grid, &cam).unwrap();
        assert_eq!(best.trajectory, one.trajectories()[0]);
        let none = CandidateSet::from_trajectories(vec![]);
        assert!(matches!(select_best(&none, &grid, &cam), Err(Error::EmptyCandidates)));
    }

    #[test]
    fn unique_count_counts_each_block_once() {
        let grid = unit_grid(&[((0, 0, 0), 0.7)], (1, 1, 1));
        let cam = CameraModel::default();
        let t = static_trajectory(&OrbitSpec::new(0.0, 5.0)).unwrap();
        let s = score_trajectory_with(&t, &grid, &cam, ScoringMode::UniqueCount);
        assert!((s.score - 0.7).abs() < 1e-12);
    }

    #[test]
    fn narrow_fov_rejects_off_axis_blocks() {
        // block offset 1 unit sideways seen from 2 units away is ~26.6 deg off axis
        let grid = BlockGrid::from_weights(
            (1, 1, 3),
            BoundingBoxEstimate::new(3.0, 1.0, 1.0).unwrap(),
            0.0,
            [(BlockIndex::new(0, 0, 2), 1.0)],
        )
        .unwrap();
        let pose = SphericalPose::new(0.0, 0.0, 2.0).unwrap();
        let half = CameraModel::new(40.0).unwrap();
        assert!(visible_set(&pose, &grid, &half).is_empty());
        let full = half.with_fov_check(crate::geometry::FovCheck::Full);
        assert_eq!(visible_set(&pose, &grid, &full).len(), 1);
    }
}
