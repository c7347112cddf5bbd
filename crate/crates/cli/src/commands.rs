use std::io::Read;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use actr::blocks::BoundingBoxEstimate;
use actr::coverage::{self as cov, sample_mesh};
use actr::diffmap::{DifferenceMode, FeatureMap, Grid};
use actr::geometry::{CameraModel, FovCheck};
use actr::io::{
    format_score_table, read_block_dump, read_mesh, read_tensor, read_tensor_meta,
    read_trajectory, write_block_dump, write_coverage_report, write_mesh, write_score_table,
    write_trajectory, Tensor, TensorRole, TrajectoryDocument, TENSOR_MAGIC,
};
use actr::mesh::{ShapeKind, SyntheticShape};
use actr::pipeline::{plan as run_plan, PlanInputs};
use actr::planner::{
    random_trajectory, score_trajectory_with, static_trajectory, OrbitSpec, ScoringMode,
};
use actr::Error;

use crate::{
    BaselineArgs, BaselineKind, CameraArgs, CoverageArgs, DifferenceArg, FovCheckArg, MeshArgs,
    OrbitArgs, PlanArgs, ScoreArgs, ScoringArg, ShapeArg, ValidateArgs,
};

/// Sizes the global rayon pool from `ACTR_THREADS`; unset or 0 leaves the
/// default of one thread per core.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("ACTR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("ACTR_THREADS must be a non-negative integer, got {raw:?}"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    Ok(())
}

fn camera(args: &CameraArgs) -> Result<CameraModel> {
    let check = match args.fov_check {
        FovCheckArg::Half => FovCheck::Half,
        FovCheckArg::Full => FovCheck::Full,
    };
    Ok(CameraModel::new(args.fov)?.with_fov_check(check))
}

fn scoring(arg: ScoringArg) -> ScoringMode {
    match arg {
        ScoringArg::PerFrame => ScoringMode::PerFrame,
        ScoringArg::UniqueCount => ScoringMode::UniqueCount,
    }
}

fn orbit(args: &OrbitArgs, radius: f64) -> OrbitSpec {
    OrbitSpec::new(args.elevation, radius)
        .with_frames(args.frames)
        .with_azimuth_step(args.azimuth_step)
}

fn shape_error(path: &Path, err: Error) -> anyhow::Error {
    anyhow::Error::new(err).context(format!("in {}", path.display()))
}

/// Reads a tensor and, when a sidecar exists, checks its declared role.
fn load_tensor(path: &Path, role: TensorRole) -> Result<Tensor> {
    let tensor = read_tensor(path)?;
    if let Some(meta) = read_tensor_meta(path)? {
        if meta.role != role {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                reason: format!("sidecar declares role {:?}, expected {:?}", meta.role, role),
            }
            .into());
        }
    }
    Ok(tensor)
}

fn check_at_least(path: &Path, grid: &Grid<bool>, h: usize, w: usize) -> Result<()> {
    if grid.rows() < h || grid.cols() < w {
        return Err(shape_error(
            path,
            Error::ShapeMismatch(format!(
                "grid {:?} is coarser than the {:?} feature grid",
                grid.shape(),
                (h, w)
            )),
        ));
    }
    Ok(())
}

pub fn plan(args: PlanArgs) -> Result<()> {
    let input_features = load_tensor(&args.input_features, TensorRole::InputFeatures)?
        .to_feature_map()
        .map_err(|e| shape_error(&args.input_features, e))?;
    let shape = input_features.shape();
    let mut slice_features: Vec<FeatureMap> = Vec::with_capacity(args.slice_features.len());
    for path in &args.slice_features {
        let f = load_tensor(path, TensorRole::SliceFeatures)?
            .to_feature_map()
            .map_err(|e| shape_error(path, e))?;
        if f.shape() != shape {
            return Err(shape_error(
                path,
                Error::ShapeMismatch(format!(
                    "slice features {:?} differ from input features {shape:?}",
                    f.shape()
                )),
            ));
        }
        slice_features.push(f);
    }
    let (_, h, w) = shape;
    let mask = load_tensor(&args.mask, TensorRole::Mask)?
        .to_mask()
        .map_err(|e| shape_error(&args.mask, e))?;
    check_at_least(&args.mask, &mask, h, w)?;
    let occupancy = load_tensor(&args.occupancy, TensorRole::Occupancy)?
        .to_slice_masks()
        .map_err(|e| shape_error(&args.occupancy, e))?;
    if occupancy.len() != slice_features.len() {
        return Err(shape_error(
            &args.occupancy,
            Error::ShapeMismatch(format!(
                "{} occupancy slices for {} slice feature files",
                occupancy.len(),
                slice_features.len()
            )),
        ));
    }
    check_at_least(&args.occupancy, &occupancy[0], h, w)?;

    let [width, height, length] = args.bbox[..] else {
        bail!("--bbox takes three comma-separated edges, got {:?}", args.bbox);
    };
    let bbox = BoundingBoxEstimate::new(width, height, length)?;
    let radius = args.radius.unwrap_or(2.0 * bbox.diagonal());
    let orbit = orbit(&args.orbit, radius);
    let mut inputs = PlanInputs::new(input_features, slice_features, mask, occupancy, bbox, orbit);
    inputs.camera = camera(&args.camera)?;
    inputs.scoring = scoring(args.scoring);
    inputs.difference = match args.difference {
        DifferenceArg::Difference => DifferenceMode::Difference,
        DifferenceArg::RawCosine => DifferenceMode::RawCosine,
    };

    let outcome = run_plan(&inputs).map_err(|e| match e {
        Error::EmptyMask => shape_error(&args.mask, e),
        Error::EmptyGrid => shape_error(&args.occupancy, e),
        other => other.into(),
    })?;

    let best = &outcome.best;
    let doc = TrajectoryDocument::new(best.trajectory.clone(), &orbit, Some(best.score));
    write_trajectory(&args.out, &doc)?;
    let scores = args.scores.unwrap_or_else(|| sibling(&args.out, ".scores.csv"));
    write_score_table(&scores, &outcome.scored)?;
    if let Some(dump) = &args.blocks_dump {
        write_block_dump(dump, &outcome.grid)?;
    }
    let (d1, d2) = best.trajectory.kind().deltas().unwrap_or((0.0, 0.0));
    println!(
        "selected delta1 {d1} delta2 {d2} score {} over {} blocks; wrote {} and {}",
        best.score,
        outcome.grid.len(),
        args.out.display(),
        scores.display()
    );
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn baseline(args: BaselineArgs) -> Result<()> {
    let orbit = orbit(&args.orbit, args.radius);
    let trajectory = match args.kind {
        BaselineKind::Static => static_trajectory(&orbit)?,
        BaselineKind::Random => random_trajectory(&orbit, args.seed)?,
    };
    write_trajectory(&args.out, &TrajectoryDocument::new(trajectory, &orbit, None))?;
    Ok(())
}

pub fn coverage(args: CoverageArgs) -> Result<()> {
    let mesh = read_mesh(&args.mesh)?;
    let doc = read_trajectory(&args.trajectory)?;
    if !doc.trajectory.is_closed() {
        if !args.allow_open {
            return Err(Error::Malformed {
                path: args.trajectory.clone(),
                reason: "trajectory is not closed (pass --allow-open to evaluate it anyway)"
                    .into(),
            }
            .into());
        }
        eprintln!("warning: {} is not a closed orbit", args.trajectory.display());
    }
    let samples = sample_mesh(&mesh, args.samples, args.seed)
        .with_context(|| format!("sampling {}", args.mesh.display()))?;
    let report = cov::coverage(&doc.trajectory, &samples, &camera(&args.camera)?);
    if let Some(out) = &args.out {
        write_coverage_report(out, &report)?;
    }
    println!(
        "{} coverage {:.6} ({} samples, {} poses)",
        report.trajectory_tag,
        report.covered_fraction,
        report.samples,
        report.per_pose_counts.len()
    );
    Ok(())
}

pub fn score(args: ScoreArgs) -> Result<()> {
    let grid = read_block_dump(&args.blocks_debug_dump)
        .map_err(|e| shape_error(&args.blocks_debug_dump, e))?;
    let cam = camera(&args.camera)?;
    let mode = scoring(args.scoring);
    let rows = args
        .trajectory
        .iter()
        .map(|path| {
            let doc = read_trajectory(path)?;
            Ok(score_trajectory_with(&doc.trajectory, &grid, &cam, mode))
        })
        .collect::<Result<Vec<_>>>()?;
    match &args.out {
        Some(out) => write_score_table(out, &rows)?,
        None => print!("{}", format_score_table(&rows)),
    }
    Ok(())
}

fn starts_with_magic(path: &Path) -> Result<bool> {
    let mut head = vec![0u8; TENSOR_MAGIC.len()];
    let mut f = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let n = f.read(&mut head).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(n == head.len() && head == TENSOR_MAGIC.as_bytes())
}

pub fn validate(args: ValidateArgs) -> Result<()> {
    for path in &args.files {
        if starts_with_magic(path)? {
            let tensor = read_tensor(path)?;
            let role = read_tensor_meta(path)?
                .map(|m| format!(" role {:?}", m.role))
                .unwrap_or_default();
            println!("ok {}: tensor dims {:?}{role}", path.display(), tensor.dims());
            continue;
        }
        let doc = read_trajectory(path)?;
        let traj = &doc.trajectory;
        // printed angles are rounded, so step bounds get one unit of slack
        let mut problems = traj.check(1e-6);
        if !traj.is_closed() && problems.iter().all(|p| !p.starts_with("not closed")) {
            problems.push("first and last elevations differ".into());
        }
        if !problems.is_empty() {
            bail!(Error::Malformed {
                path: path.clone(),
                reason: problems.join("; "),
            });
        }
        println!(
            "ok {}: {} trajectory, {} frames, closed",
            path.display(),
            traj.kind().tag(),
            traj.poses().len()
        );
    }
    Ok(())
}

pub fn mesh(args: MeshArgs) -> Result<()> {
    let shape = match args.shape {
        ShapeArg::Cube => SyntheticShape::unit_cube(),
        ShapeArg::Bowl => SyntheticShape::deep_bowl(),
        ShapeArg::Tube => SyntheticShape::build(ShapeKind::Tube {
            outer_radius: 0.5,
            inner_radius: 0.4,
            height: 1.0,
            segments: 32,
        })?,
        ShapeArg::LShape => SyntheticShape::build(ShapeKind::LShape {
            arm: 1.0,
            thickness: 0.3,
            depth: 0.5,
        })?,
    };
    write_mesh(&args.out, &shape.mesh)?;
    Ok(())
}
