use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Plan, inspect and evaluate closed camera orbits around a single-view object.
#[derive(Parser)]
#[command(name = "actr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select the best orbit from feature maps, a mask and slice occupancy.
    Plan(PlanArgs),
    /// Write a static or random reference orbit.
    Baseline(BaselineArgs),
    /// Measure the surface fraction of a mesh seen along a trajectory.
    Coverage(CoverageArgs),
    /// Rescore trajectory files against a block-grid dump.
    Score(ScoreArgs),
    /// Check tensor and trajectory files.
    Validate(ValidateArgs),
    /// Write one of the built-in test shapes as a mesh file.
    Mesh(MeshArgs),
}

#[derive(Args, Clone)]
struct CameraArgs {
    /// Full field of view in degrees.
    #[arg(long, default_value_t = actr::geometry::DEFAULT_FOV_DEG)]
    fov: f64,
    /// Whether the visibility cone uses half or all of the field of view.
    #[arg(long, value_enum, default_value_t = FovCheckArg::Half)]
    fov_check: FovCheckArg,
}

#[derive(Args, Clone)]
struct OrbitArgs {
    /// Elevation of the input view, in degrees.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    elevation: f64,
    /// Frames per orbit, including the closing frame.
    #[arg(long, default_value_t = actr::planner::DEFAULT_FRAMES)]
    frames: usize,
    /// Azimuth advance per frame, in degrees.
    #[arg(long, default_value_t = actr::planner::DEFAULT_AZIMUTH_STEP_DEG)]
    azimuth_step: f64,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    input_features: PathBuf,
    /// One tensor per slice, front to rear.
    #[arg(long, required = true, num_args = 1..)]
    slice_features: Vec<PathBuf>,
    /// Foreground mask, `(H, W)` or `(1, H, W)`, at feature resolution or finer.
    #[arg(long)]
    mask: PathBuf,
    /// Per-slice occupancy `(M, H, W)`, at feature resolution or finer.
    #[arg(long)]
    occupancy: PathBuf,
    /// Bounding-box edges `width,height,length`.
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    bbox: Vec<f64>,
    #[command(flatten)]
    orbit: OrbitArgs,
    /// Camera distance; defaults to twice the bounding-box diagonal.
    #[arg(long)]
    radius: Option<f64>,
    #[command(flatten)]
    camera: CameraArgs,
    #[arg(long, value_enum, default_value_t = ScoringArg::PerFrame)]
    scoring: ScoringArg,
    #[arg(long, value_enum, default_value_t = DifferenceArg::Difference)]
    difference: DifferenceArg,
    /// Trajectory file to write.
    #[arg(long)]
    out: PathBuf,
    /// Score table path; defaults to `<out>.scores.csv`.
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Also write the block grid as JSON.
    #[arg(long)]
    blocks_dump: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long, value_enum)]
    kind: BaselineKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    orbit: OrbitArgs,
    #[arg(long)]
    radius: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CoverageArgs {
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    trajectory: PathBuf,
    #[arg(long, default_value_t = actr::coverage::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    camera: CameraArgs,
    /// Accept trajectories whose last elevation differs from the first.
    #[arg(long)]
    allow_open: bool,
    /// Report path; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Trajectory files to score.
    #[arg(long, required = true, num_args = 1..)]
    trajectory: Vec<PathBuf>,
    /// Block grid written by `plan --blocks-dump`.
    #[arg(long)]
    blocks_debug_dump: PathBuf,
    #[command(flatten)]
    camera: CameraArgs,
    #[arg(long, value_enum, default_value_t = ScoringArg::PerFrame)]
    scoring: ScoringArg,
    /// Table path; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Tensor or trajectory files; the kind is detected from the contents.
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long, value_enum)]
    shape: ShapeArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FovCheckArg {
    Half,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScoringArg {
    PerFrame,
    UniqueCount,
}

#[derive(Clone, Copy, ValueEnum)]
enum DifferenceArg {
    Difference,
    RawCosine,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineKind {
    Static,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Cube,
    Bowl,
    Tube,
    LShape,
}

/// Process exit status for a failed run.
fn exit_code(err: &anyhow::Error) -> u8 {
    use actr::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::Malformed { .. } | Error::Io { .. }) => 2,
        Some(Error::ShapeMismatch(_)) => 3,
        Some(Error::EmptyMask | Error::EmptyGrid) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = commands::configure_threads().and_then(|()| match cli.command {
        Command::Plan(args) => commands::plan(args),
        Command::Baseline(args) => commands::baseline(args),
        Command::Coverage(args) => commands::coverage(args),
        Command::Score(args) => commands::score(args),
        Command::Validate(args) => commands::validate(args),
        Command::Mesh(args) => commands::mesh(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
