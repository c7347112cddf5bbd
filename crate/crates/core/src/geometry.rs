//! Coordinate conventions, the orbit camera model and ray/box tests.
//!
//! World frame: +Z is up, the input view sits on the +X axis at azimuth 0,
//! azimuth grows counterclockwise about +Z and elevation is measured from the
//! XY plane toward +Z. Every camera looks at the world origin.
//!
//! Camera frame: +X right, +Y down, +Z forward (toward the look-at point).

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Default full field of view in degrees.
pub const DEFAULT_FOV_DEG: f64 = 33.8;

/// Slack used by the slab test; boundary contact counts as a hit.
pub const SLAB_EPSILON: f64 = 1e-9;

/// Camera position on a look-at-origin sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalPose {
    azimuth_deg: f64,
    elevation_deg: f64,
    radius: f64,
}

impl SphericalPose {
    pub fn new(azimuth_deg: f64, elevation_deg: f64, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if !(-90.0..=90.0).contains(&elevation_deg) {
            return Err(Error::InvalidParameter(format!(
                "elevation {elevation_deg} outside [-90, 90]"
            )));
        }
        if !(0.0..=360.0).contains(&azimuth_deg) {
            return Err(Error::InvalidParameter(format!(
                "azimuth {azimuth_deg} outside [0, 360]"
            )));
        }
        Ok(Self {
            azimuth_deg,
            elevation_deg,
            radius,
        })
    }

    pub fn azimuth_deg(&self) -> f64 {
        self.azimuth_deg
    }

    pub fn elevation_deg(&self) -> f64 {
        self.elevation_deg
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Camera center in world coordinates.
    pub fn position(&self) -> Vec3 {
        let (sa, ca) = self.azimuth_deg.to_radians().sin_cos();
        let (se, ce) = self.elevation_deg.to_radians().sin_cos();
        Vec3::new(ce * ca, ce * sa, se) * self.radius
    }

    /// Unit vector from the camera toward the world origin.
    pub fn forward(&self) -> Vec3 {
        let (sa, ca) = self.azimuth_deg.to_radians().sin_cos();
        let (se, ce) = self.elevation_deg.to_radians().sin_cos();
        -Vec3::new(ce * ca, ce * sa, se)
    }
}

/// Which half of the field of view bounds the visibility cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FovCheck {
    /// A target passes when its off-axis angle is at most `fov / 2`.
    #[default]
    Half,
    /// A target passes when its off-axis angle is at most `fov`.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    fov_deg: f64,
    fov_check: FovCheck,
}

impl Default for CameraModel {
    fn default() -> Self {
        Self {
            fov_deg: DEFAULT_FOV_DEG,
            fov_check: FovCheck::Half,
        }
    }
}

impl CameraModel {
    pub fn new(fov_deg: f64) -> Result<Self> {
        if !(fov_deg > 0.0 && fov_deg < 180.0) {
            return Err(Error::InvalidParameter(format!(
                "field of view {fov_deg} outside (0, 180)"
            )));
        }
        Ok(Self {
            fov_deg,
            fov_check: FovCheck::Half,
        })
    }

    pub fn with_fov_check(mut self, fov_check: FovCheck) -> Self {
        self.fov_check = fov_check;
        self
    }

    pub fn fov_deg(&self) -> f64 {
        self.fov_deg
    }

    pub fn fov_check(&self) -> FovCheck {
        self.fov_check
    }

    /// Largest off-axis angle, in degrees, that still counts as in view.
    pub fn acceptance_angle_deg(&self) -> f64 {
        match self.fov_check {
            FovCheck::Half => self.fov_deg / 2.0,
            FovCheck::Full => self.fov_deg,
        }
    }
}

/// Rotation followed by translation: `p_cam = rotation * p_world + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vec3,
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vec3) -> Result<Self> {
        let t = Self {
            rotation,
            translation,
        };
        if !t.is_proper_rotation(1e-9) {
            return Err(Error::InvalidParameter(
                "rotation is not orthonormal with determinant +1".into(),
            ));
        }
        Ok(t)
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    pub fn is_proper_rotation(&self, tol: f64) -> bool {
        let r = &self.rotation;
        (r.transpose() * r - Matrix3::identity()).abs().max() < tol
            && (r.determinant() - 1.0).abs() < tol
    }
}

/// World-to-camera transform of an orbit camera looking at the origin.
///
/// The camera's right axis is the azimuthal tangent `(-sin a, cos a, 0)`, which
/// stays well defined at the poles, and down completes a right-handed frame.
pub fn pose_to_transform(pose: &SphericalPose) -> RigidTransform {
    let forward = pose.forward();
    let (sa, ca) = pose.azimuth_deg.to_radians().sin_cos();
    let right = Vec3::new(-sa, ca, 0.0);
    let down = forward.cross(&right);
    let rotation = Matrix3::from_rows(&[right.transpose(), down.transpose(), forward.transpose()]);
    let translation = -(rotation * pose.position());
    RigidTransform {
        rotation,
        translation,
    }
}

/// Closed axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    min: [f64; 3],
    max: [f64; 3],
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Result<Self> {
        if (0..3).any(|a| !(min[a] <= max[a]) || !min[a].is_finite() || !max[a].is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "box corners out of order: min {:?}, max {:?}",
                min.as_slice(),
                max.as_slice()
            )));
        }
        Ok(Self {
            min: min.into(),
            max: max.into(),
        })
    }

    pub fn min(&self) -> Vec3 {
        Vec3::from(self.min)
    }

    pub fn max(&self) -> Vec3 {
        Vec3::from(self.max)
    }

    pub fn center(&self) -> Vec3 {
        (self.min() + self.max()) * 0.5
    }

    pub fn extent(&self) -> Vec3 {
        self.max() - self.min()
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|a| self.min[a] <= p[a] && p[a] <= self.max[a])
    }

    /// Grows (or shrinks, for negative `margin`) every face by `margin`.
    pub fn inflated(&self, margin: f64) -> Self {
        let m = Vec3::repeat(margin);
        let min = self.min() - m;
        let max = (self.max() + m).sup(&min);
        Self {
            min: min.into(),
            max: max.into(),
        }
    }
}

/// Slab test of the segment `origin -> target` against a closed box.
///
/// The parametric range is clamped to `[0, 1]` and contact within
/// [`SLAB_EPSILON`] of the box surface counts as an intersection.
pub fn ray_aabb_intersect(origin: &Vec3, target: &Vec3, aabb: &Aabb) -> bool {
    let dir = target - origin;
    let mut t_enter = 0.0_f64;
    let mut t_exit = 1.0_f64;
    for axis in 0..3 {
        let (lo, hi) = (aabb.min[axis], aabb.max[axis]);
        if dir[axis] == 0.0 {
            if origin[axis] < lo - SLAB_EPSILON || origin[axis] > hi + SLAB_EPSILON {
                return false;
            }
            continue;
        }
        let inv = 1.0 / dir[axis];
        let mut t0 = (lo - origin[axis]) * inv;
        let mut t1 = (hi - origin[axis]) * inv;
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        t_enter = t_enter.max(t0);
        t_exit = t_exit.min(t1);
        if t_enter > t_exit + SLAB_EPSILON {
            return false;
        }
    }
    true
}

/// Angle in degrees between `forward` and the direction from `eye` to `target`.
pub fn off_axis_angle_deg(eye: &Vec3, forward: &Vec3, target: &Vec3) -> f64 {
    let to_target = target - eye;
    let cos = forward.dot(&to_target) / (forward.norm() * to_target.norm());
    cos.clamp(-1.0, 1.0).acos().to_degrees()
}

/// Angle between the camera's view axis and the ray toward `block_center`
/// (world coordinates), in `[0, 180]` degrees.
pub fn angle_to_block(pose: &SphericalPose, block_center: &Vec3) -> f64 {
    off_axis_angle_deg(&pose.position(), &pose.forward(), block_center)
}
