//! Camera-alignment and bounding-box losses used to evaluate pose and box
//! estimates against ground truth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{RigidTransform, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec3>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("point cloud is empty".into()));
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidParameter(
                "point cloud contains NaN or infinite coordinates".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }
}

/// How the `n x 3` residual between the two transformed clouds is reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualNorm {
    /// Square root of the sum of all squared residual entries.
    #[default]
    Frobenius,
    /// Sum of the per-point Euclidean residuals.
    RowSum,
}

/// Discrepancy between the cloud mapped by `predicted` and by `truth`.
///
/// Each point is transformed as a whole (rotation then translation), which is
/// the row-vector product with the homogeneous matrix.
pub fn camera_alignment_loss(
    cloud: &PointCloud,
    predicted: &RigidTransform,
    truth: &RigidTransform,
) -> f64 {
    camera_alignment_loss_with(cloud, predicted, truth, ResidualNorm::Frobenius)
}

pub fn camera_alignment_loss_with(
    cloud: &PointCloud,
    predicted: &RigidTransform,
    truth: &RigidTransform,
    norm: ResidualNorm,
) -> f64 {
    let residuals = cloud
        .points
        .iter()
        .map(|p| predicted.apply(p) - truth.apply(p));
    match norm {
        ResidualNorm::Frobenius => residuals.map(|r| r.norm_squared()).sum::<f64>().sqrt(),
        ResidualNorm::RowSum => residuals.map(|r| r.norm()).sum(),
    }
}

/// Edge lengths `(w, h, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxEdges {
    pub width: f64,
    pub height: f64,
    pub length: f64,
}

impl BoxEdges {
    pub fn new(width: f64, height: f64, length: f64) -> Self {
        Self {
            width,
            height,
            length,
        }
    }
}

/// Sum of absolute per-axis edge differences.
pub fn bbox_loss(predicted: &BoxEdges, truth: &BoxEdges) -> f64 {
    (truth.width - predicted.width).abs()
        + (truth.length - predicted.length).abs()
        + (truth.height - predicted.height).abs()
}

/// `bbox_loss + camera_alignment_loss`.
pub fn total_loss(
    cloud: &PointCloud,
    predicted_pose: &RigidTransform,
    truth_pose: &RigidTransform,
    predicted_box: &BoxEdges,
    truth_box: &BoxEdges,
) -> f64 {
    bbox_loss(predicted_box, truth_box) + camera_alignment_loss(cloud, predicted_pose, truth_pose)
}
