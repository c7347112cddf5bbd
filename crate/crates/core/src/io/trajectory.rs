//! Trajectory documents: a TOML file listing one `(azimuth, elevation)` pair
//! per frame plus the axis convention and where the orbit came from.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::{read_text, write_atomic};
use crate::error::{Error, Result};
use crate::geometry::SphericalPose;
use crate::planner::{OrbitSpec, Trajectory, TrajectoryKind};

pub const TRAJECTORY_FORMAT: &str = "actr-trajectory v1";

/// Angles are printed with this many decimals.
pub const ANGLE_DECIMALS: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDocument {
    pub radius: f64,
    pub initial_elevation_deg: f64,
    pub azimuth_step_deg: f64,
    pub trajectory: Trajectory,
    /// Planner score, when the trajectory was scored.
    pub score: Option<f64>,
}

impl TrajectoryDocument {
    pub fn new(trajectory: Trajectory, orbit: &OrbitSpec, score: Option<f64>) -> Self {
        Self {
            radius: orbit.radius,
            initial_elevation_deg: orbit.initial_elevation_deg,
            azimuth_step_deg: orbit.azimuth_step_deg,
            trajectory,
            score,
        }
    }
}

fn angle(v: f64) -> String {
    // avoid printing "-0.000000"
    let s = format!("{v:.ANGLE_DECIMALS$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

pub fn format_trajectory(doc: &TrajectoryDocument) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "format = \"{TRAJECTORY_FORMAT}\"").unwrap();
    writeln!(w, "radius = {:?}", doc.radius).unwrap();
    writeln!(w, "initial_elevation_deg = {}", angle(doc.initial_elevation_deg)).unwrap();
    writeln!(w, "azimuth_step_deg = {}", angle(doc.azimuth_step_deg)).unwrap();
    writeln!(w, "frames = [").unwrap();
    for (i, p) in doc.trajectory.poses().iter().enumerate() {
        writeln!(
            w,
            "  {{ index = {i}, azimuth_deg = {}, elevation_deg = {} }},",
            angle(p.azimuth_deg()),
            angle(p.elevation_deg())
        )
        .unwrap();
    }
    writeln!(w, "]").unwrap();
    writeln!(w).unwrap();
    writeln!(w, "[convention]").unwrap();
    writeln!(w, "up_axis = \"+z\"").unwrap();
    writeln!(w, "azimuth_zero = \"input view\"").unwrap();
    writeln!(w, "azimuth_direction = \"counterclockwise about +z\"").unwrap();
    writeln!(w, "elevation_zero = \"xy plane, positive toward +z\"").unwrap();
    writeln!(w, "angle_units = \"degrees\"").unwrap();
    writeln!(w).unwrap();
    writeln!(w, "[provenance]").unwrap();
    let kind = doc.trajectory.kind();
    writeln!(w, "kind = \"{}\"", kind.tag()).unwrap();
    match kind {
        TrajectoryKind::Candidate { delta1, delta2 } => {
            writeln!(w, "delta1_deg = {}", angle(delta1)).unwrap();
            writeln!(w, "delta2_deg = {}", angle(delta2)).unwrap();
        }
        TrajectoryKind::Random { seed } => writeln!(w, "seed = {seed}").unwrap(),
        TrajectoryKind::Static => {}
    }
    if let Some(score) = doc.score {
        writeln!(w, "score = {score:?}").unwrap();
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    format: String,
    radius: f64,
    initial_elevation_deg: f64,
    azimuth_step_deg: f64,
    frames: Vec<RawFrame>,
    #[allow(dead_code)]
    convention: toml::Table,
    provenance: RawProvenance,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    index: usize,
    azimuth_deg: f64,
    elevation_deg: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProvenance {
    kind: String,
    delta1_deg: Option<f64>,
    delta2_deg: Option<f64>,
    seed: Option<u64>,
    score: Option<f64>,
}

/// Parses a document; `path` is only used in error messages. Frames must be
/// nonempty and indexed `0, 1, 2, ...` in order.
pub fn parse_trajectory(text: &str, path: &Path) -> Result<TrajectoryDocument> {
    let bad = |reason: String| Error::malformed(path, reason);
    let raw: RawDocument = toml::from_str(text).map_err(|e| bad(e.message().to_string()))?;
    if raw.format != TRAJECTORY_FORMAT {
        return Err(bad(format!("expected format {TRAJECTORY_FORMAT:?}, found {:?}", raw.format)));
    }
    if raw.frames.is_empty() {
        return Err(bad("trajectory has no frames".into()));
    }
    if let Some((pos, f)) = raw.frames.iter().enumerate().find(|(pos, f)| f.index != *pos) {
        return Err(bad(format!("frame {pos} has index {}; frames must be sorted from 0", f.index)));
    }
    let p = &raw.provenance;
    let kind = match (p.kind.as_str(), p.delta1_deg, p.delta2_deg, p.seed) {
        ("adaptive", Some(delta1), Some(delta2), None) => TrajectoryKind::Candidate { delta1, delta2 },
        ("static", None, None, None) => TrajectoryKind::Static,
        ("random", None, None, Some(seed)) => TrajectoryKind::Random { seed },
        _ => return Err(bad(format!("inconsistent provenance for kind {:?}", p.kind))),
    };
    let poses = raw
        .frames
        .iter()
        .map(|f| SphericalPose::new(f.azimuth_deg, f.elevation_deg, raw.radius))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| bad(e.to_string()))?;
    Ok(TrajectoryDocument {
        radius: raw.radius,
        initial_elevation_deg: raw.initial_elevation_deg,
        azimuth_step_deg: raw.azimuth_step_deg,
        trajectory: Trajectory::from_poses(poses, kind),
        score: p.score,
    })
}

pub fn read_trajectory(path: &Path) -> Result<TrajectoryDocument> {
    parse_trajectory(&read_text(path)?, path)
}

pub fn write_trajectory(path: &Path, doc: &TrajectoryDocument) -> Result<()> {
    write_atomic(path, format_trajectory(doc).as_bytes())
}
