//! Surface coverage of a trajectory: the fraction of area-uniform surface
//! samples seen from at least one pose.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{off_axis_angle_deg, ray_aabb_intersect, Aabb, CameraModel, SphericalPose, Vec3};
use crate::mesh::{SyntheticShape, TriangleMesh};
use crate::planner::Trajectory;

pub const DEFAULT_SAMPLES: usize = 10_000;

/// The segment end is pulled back toward the camera by this much so a sample
/// does not occlude itself.
pub const SELF_HIT_OFFSET: f64 = 1e-6;

/// Geometry used for self-occlusion tests.
#[derive(Debug, Clone, PartialEq)]
pub enum Occluder {
    Mesh(TriangleMesh),
    Blocks(Vec<Aabb>),
}

impl Occluder {
    fn blocks_segment(&self, from: &Vec3, to: &Vec3) -> bool {
        match self {
            Occluder::Mesh(mesh) => mesh.segment_hits(from, to),
            Occluder::Blocks(boxes) => boxes.iter().any(|b| ray_aabb_intersect(from, to, b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSamples {
    pub points: Vec<Vec3>,
    pub normals: Option<Vec<Vec3>>,
    /// Source triangle of every sample, when drawn from a mesh.
    pub faces: Vec<usize>,
    pub occluder: Occluder,
}

/// Area-weighted uniform samples over the shape's triangles.
pub fn sample_surface(shape: &SyntheticShape, n: usize, seed: u64) -> Result<SurfaceSamples> {
    sample_mesh(&shape.mesh, n, seed)
}

pub fn sample_mesh(mesh: &TriangleMesh, n: usize, seed: u64) -> Result<SurfaceSamples> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let areas: Vec<f64> = (0..mesh.faces().len()).map(|f| mesh.triangle_area(f)).collect();
    if !(areas.iter().sum::<f64>() > 0.0) {
        return Err(Error::DegenerateGeometry("mesh has zero surface area".into()));
    }
    let pick = WeightedIndex::new(&areas)
        .map_err(|e| Error::DegenerateGeometry(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut faces = Vec::with_capacity(n);
    for _ in 0..n {
        let f = pick.sample(&mut rng);
        let [a, b, c] = mesh.triangle(f);
        let (mut u, mut v): (f64, f64) = (rng.random(), rng.random());
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        points.push(a + (b - a) * u + (c - a) * v);
        normals.push((b - a).cross(&(c - a)).normalize());
        faces.push(f);
    }
    Ok(SurfaceSamples {
        points,
        normals: Some(normals),
        faces,
        occluder: Occluder::Mesh(mesh.clone()),
    })
}

/// In the view cone and not hidden by the occluder geometry.
pub fn point_visible(
    pose: &SphericalPose,
    point: &Vec3,
    samples: &SurfaceSamples,
    camera: &CameraModel,
) -> bool {
    let eye = pose.position();
    visible_from(&eye, &pose.forward(), point, &samples.occluder, camera)
}

fn visible_from(eye: &Vec3, forward: &Vec3, point: &Vec3, occluder: &Occluder, camera: &CameraModel) -> bool {
    if off_axis_angle_deg(eye, forward, point) > camera.acceptance_angle_deg() {
        return false;
    }
    let back = eye - point;
    let end = point + back * (SELF_HIT_OFFSET / back.norm());
    !occluder.blocks_segment(eye, &end)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub trajectory_tag: String,
    pub samples: usize,
    pub covered_fraction: f64,
    /// Samples visible from each pose, in trajectory order.
    pub per_pose_counts: Vec<usize>,
}

pub fn coverage(trajectory: &Trajectory, samples: &SurfaceSamples, camera: &CameraModel) -> CoverageReport {
    coverage_of_poses(
        trajectory.kind().tag(),
        trajectory.poses(),
        samples,
        camera,
    )
}

pub fn coverage_of_poses(
    tag: &str,
    poses: &[SphericalPose],
    samples: &SurfaceSamples,
    camera: &CameraModel,
) -> CoverageReport {
    let eyes: Vec<(Vec3, Vec3)> = poses.iter().map(|p| (p.position(), p.forward())).collect();
    let seen: Vec<Vec<bool>> = samples
        .points
        .par_iter()
        .map(|pt| {
            eyes.iter()
                .map(|(eye, fwd)| visible_from(eye, fwd, pt, &samples.occluder, camera))
                .collect()
        })
        .collect();
    let per_pose_counts = (0..poses.len())
        .map(|t| seen.iter().filter(|row| row[t]).count())
        .collect();
    let covered = seen.iter().filter(|row| row.iter().any(|&v| v)).count();
    CoverageReport {
        trajectory_tag: tag.to_string(),
        samples: samples.points.len(),
        covered_fraction: covered as f64 / samples.points.len() as f64,
        per_pose_counts,
    }
}
