use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use actr::blocks::{BlockGrid, BoundingBoxEstimate};
use actr::io::{read_trajectory, write_block_dump, write_tensor, Tensor};
use actr::planner::TrajectoryKind;

fn actr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_actr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const C: usize = 6;
const H: usize = 7;
const W: usize = 7;
const M: usize = 4;

fn base_features() -> Vec<f32> {
    (0..C * H * W).map(|i| ((i * 37 % 11) as f32) + 1.0).collect()
}

/// Slice features equal to the input except at the `(row, col)` cells
/// listed for that slice, where the channel vector is negated.
fn write_fixture(dir: &Path, flipped: impl Fn(usize, usize, usize) -> bool, occupied: impl Fn(usize, usize, usize) -> bool) -> Vec<String> {
    let base = base_features();
    let input = dir.join("input.tensor");
    write_tensor(&input, &Tensor::new(vec![C, H, W], base.clone()).unwrap(), None).unwrap();
    let mut args = vec!["plan".to_string(), "--input-features".into(), s(&input).into(), "--slice-features".into()];
    for m in 0..M {
        let mut v = base.clone();
        for c in 0..C {
            for r in 0..H {
                for k in 0..W {
                    if flipped(m, r, k) {
                        v[(c * H + r) * W + k] *= -1.0;
                    }
                }
            }
        }
        let p = dir.join(format!("slice{m}.tensor"));
        write_tensor(&p, &Tensor::new(vec![C, H, W], v).unwrap(), None).unwrap();
        args.push(s(&p).into());
    }
    let mask = dir.join("mask.tensor");
    write_tensor(&mask, &Tensor::new(vec![1, H, W], vec![1.0; H * W]).unwrap(), None).unwrap();
    let occ: Vec<f32> = (0..M * H * W)
        .map(|i| if occupied(i / (H * W), (i / W) % H, i % W) { 1.0 } else { 0.0 })
        .collect();
    let occupancy = dir.join("occupancy.tensor");
    write_tensor(&occupancy, &Tensor::new(vec![M, H, W], occ).unwrap(), None).unwrap();
    args.extend([
        "--mask".into(),
        s(&mask).into(),
        "--occupancy".into(),
        s(&occupancy).into(),
        "--bbox".into(),
        "1,1,1".into(),
    ]);
    args
}

fn run_plan(args: &[String], extra: &[&str]) -> Output {
    let mut all: Vec<&str> = args.iter().map(String::as_str).collect();
    all.extend_from_slice(extra);
    actr(&all)
}

#[test]
fn identical_features_plan_the_static_orbit_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let args = write_fixture(dir.path(), |_, _, _| false, |_, _, _| true);
    let a = dir.path().join("a.toml");
    let b = dir.path().join("b.toml");
    assert!(run_plan(&args, &["--out", s(&a)]).status.success());
    assert!(run_plan(&args, &["--out", s(&b)]).status.success());
    let doc = read_trajectory(&a).unwrap();
    assert_eq!(doc.trajectory.kind(), TrajectoryKind::Candidate { delta1: 0.0, delta2: 0.0 });
    assert_eq!(doc.score, Some(0.0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let table_a = std::fs::read_to_string(dir.path().join("a.toml.scores.csv")).unwrap();
    let table_b = std::fs::read_to_string(dir.path().join("b.toml.scores.csv")).unwrap();
    assert_eq!(table_a, table_b);
    assert_eq!(table_a.lines().count(), 122);
}

#[test]
fn top_weighted_fixture_climbs_first() {
    // weight only on top-row blocks of the middle slices, away from the
    // sides: hidden from every equatorial pose, open from above
    let dir = tempfile::tempdir().unwrap();
    let args = write_fixture(
        dir.path(),
        |m, r, k| (1..=2).contains(&m) && r == 0 && (1..W - 1).contains(&k),
        |_, _, _| true,
    );
    let out = dir.path().join("plan.toml");
    let run = run_plan(&args, &["--out", s(&out)]);
    assert!(run.status.success(), "{}", stderr(&run));
    let doc = read_trajectory(&out).unwrap();
    match doc.trajectory.kind() {
        TrajectoryKind::Candidate { delta1, .. } => assert!(delta1 > 0.0, "{delta1}"),
        other => panic!("{other:?}"),
    }
    assert!(doc.score.unwrap() > 0.0);
}

#[test]
fn winning_trajectory_rescores_to_its_recorded_score() {
    let dir = tempfile::tempdir().unwrap();
    let args = write_fixture(
        dir.path(),
        |m, r, k| (m + r + k) % 3 == 0,
        |m, r, _| m != 2 || r > 2,
    );
    let out = dir.path().join("plan.toml");
    let dump = dir.path().join("blocks.json");
    let run = run_plan(&args, &["--elevation", "-8", "--out", s(&out), "--blocks-dump", s(&dump)]);
    assert!(run.status.success(), "{}", stderr(&run));
    let recorded = read_trajectory(&out).unwrap().score.unwrap();
    let scored = actr(&["score", "--trajectory", s(&out), "--blocks-debug-dump", s(&dump)]);
    assert!(scored.status.success(), "{}", stderr(&scored));
    let table = String::from_utf8(scored.stdout).unwrap();
    let row = table.lines().nth(1).unwrap();
    let rescored: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((rescored - recorded).abs() <= 1e-9, "{rescored} vs {recorded}");
}

#[test]
fn static_orbit_on_empty_grid_scores_zero() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("empty.json");
    let grid = BlockGrid::from_weights((2, 2, 2), BoundingBoxEstimate::new(1.0, 1.0, 1.0).unwrap(), 0.0, []).unwrap();
    write_block_dump(&dump, &grid).unwrap();
    let traj = dir.path().join("static.toml");
    assert!(actr(&["baseline", "--kind", "static", "--radius", "3", "--out", s(&traj)]).status.success());
    let out = actr(&["score", "--trajectory", s(&traj), "--blocks-debug-dump", s(&dump)]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "kind,delta1_deg,delta2_deg,seed,score\nstatic,0.0,0.0,,0.0\n");
}

#[test]
fn tampered_block_dump_is_a_shape_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let args = write_fixture(dir.path(), |_, r, _| r == 3, |_, _, _| true);
    let out = dir.path().join("plan.toml");
    let dump = dir.path().join("blocks.json");
    assert!(run_plan(&args, &["--out", s(&out), "--blocks-dump", s(&dump)]).status.success());
    let text = std::fs::read_to_string(&dump).unwrap();
    let tampered = text.replacen("\"dims\": [\n    4,", "\"dims\": [\n    5,", 1);
    assert_ne!(text, tampered);
    std::fs::write(&dump, tampered).unwrap();
    let run = actr(&["score", "--trajectory", s(&out), "--blocks-debug-dump", s(&dump)]);
    assert_eq!(run.status.code(), Some(3), "{}", stderr(&run));
    assert!(stderr(&run).contains("blocks.json"));
}

#[test]
fn baselines_validate_and_random_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let st = dir.path().join("static.toml");
    let out = actr(&["baseline", "--kind", "static", "--elevation", "30", "--radius", "2", "--out", s(&st)]);
    assert!(out.status.success());
    let doc = read_trajectory(&st).unwrap();
    assert_eq!(doc.trajectory.poses().len(), 21);
    assert!(doc.trajectory.elevations().iter().all(|&e| e == 30.0));
    let az: Vec<f64> = doc.trajectory.poses().iter().map(|p| p.azimuth_deg()).collect();
    assert_eq!(az, (0..21).map(|i| 18.0 * i as f64).collect::<Vec<_>>());

    let r1 = dir.path().join("r1.toml");
    let r2 = dir.path().join("r2.toml");
    for p in [&r1, &r2] {
        let out = actr(&["baseline", "--kind", "random", "--seed", "42", "--elevation", "-10", "--radius", "2", "--out", s(p)]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&r1).unwrap(), std::fs::read(&r2).unwrap());
    let v = actr(&["validate", s(&st), s(&r1)]);
    assert!(v.status.success(), "{}", stderr(&v));
    assert_eq!(String::from_utf8(v.stdout).unwrap().lines().count(), 2);
}

#[test]
fn validate_rejects_open_and_truncated_files() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("t.toml");
    assert!(actr(&["baseline", "--kind", "static", "--radius", "2", "--out", s(&traj)]).status.success());
    let text = std::fs::read_to_string(&traj).unwrap();
    let open = text.replace(
        "{ index = 20, azimuth_deg = 360.000000, elevation_deg = 0.000000 }",
        "{ index = 20, azimuth_deg = 360.000000, elevation_deg = 1.000000 }",
    );
    assert_ne!(open, text);
    let open_path = dir.path().join("open.toml");
    std::fs::write(&open_path, open).unwrap();
    let out = actr(&["validate", s(&open_path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("open.toml"));

    let tensor = dir.path().join("x.tensor");
    write_tensor(&tensor, &Tensor::new(vec![2, 2], vec![1.0; 4]).unwrap(), None).unwrap();
    assert!(actr(&["validate", s(&tensor)]).status.success());
    let bytes = std::fs::read(&tensor).unwrap();
    std::fs::write(&tensor, &bytes[..bytes.len() - 2]).unwrap();
    let out = actr(&["validate", s(&tensor)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("x.tensor"));
}

fn mesh(dir: &Path, shape: &str) -> PathBuf {
    let p = dir.join(format!("{shape}.obj"));
    assert!(actr(&["mesh", "--shape", shape, "--out", s(&p)]).status.success());
    p
}

#[test]
fn coverage_command_reports_and_guards_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let cube = mesh(dir.path(), "cube");
    let traj = dir.path().join("static.toml");
    assert!(actr(&["baseline", "--kind", "static", "--elevation", "30", "--radius", "6.9282", "--out", s(&traj)]).status.success());
    let report = dir.path().join("cov.toml");
    let out = actr(&["coverage", "--mesh", s(&cube), "--trajectory", s(&traj), "--samples", "3000", "--out", s(&report)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("trajectory_tag = \"static\""));
    assert!(text.contains("samples = 3000"));

    let empty = dir.path().join("empty.toml");
    std::fs::write(&empty, "").unwrap();
    let out = actr(&["coverage", "--mesh", s(&cube), "--trajectory", s(&empty)]);
    assert_eq!(out.status.code(), Some(2));

    let text = std::fs::read_to_string(&traj).unwrap();
    let open = dir.path().join("open.toml");
    std::fs::write(&open, text.replace("index = 20, azimuth_deg = 360.000000, elevation_deg = 30.000000", "index = 20, azimuth_deg = 360.000000, elevation_deg = 31.000000")).unwrap();
    let out = actr(&["coverage", "--mesh", s(&cube), "--trajectory", s(&open), "--samples", "100"]);
    assert_eq!(out.status.code(), Some(2));
    let out = actr(&["coverage", "--mesh", s(&cube), "--trajectory", s(&open), "--samples", "100", "--allow-open"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning"));

    let out = actr(&["coverage", "--mesh", s(&dir.path().join("missing.obj")), "--trajectory", s(&traj)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plan_error_codes_name_the_offending_file() {
    let dir = tempfile::tempdir().unwrap();
    let args = write_fixture(dir.path(), |_, _, _| false, |_, _, _| true);
    let out_path = dir.path().join("p.toml");
    let out_arg = ["--out", s(&out_path)];

    // malformed: corrupt magic in slice 1
    let slice1 = dir.path().join("slice1.tensor");
    let good = std::fs::read(&slice1).unwrap();
    let mut bad = good.clone();
    bad[0] = b'X';
    std::fs::write(&slice1, &bad).unwrap();
    let out = run_plan(&args, &out_arg);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("slice1.tensor"));

    // shape mismatch: slice 1 has a different channel count
    write_tensor(&slice1, &Tensor::new(vec![C + 1, H, W], vec![1.0; (C + 1) * H * W]).unwrap(), None).unwrap();
    let out = run_plan(&args, &out_arg);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("slice1.tensor"));
    std::fs::write(&slice1, &good).unwrap();

    // empty mask
    let mask = dir.path().join("mask.tensor");
    write_tensor(&mask, &Tensor::new(vec![H, W], vec![0.0; H * W]).unwrap(), None).unwrap();
    let out = run_plan(&args, &out_arg);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("mask.tensor"));
    write_tensor(&mask, &Tensor::new(vec![H, W], vec![1.0; H * W]).unwrap(), None).unwrap();

    // empty grid
    let occ = dir.path().join("occupancy.tensor");
    write_tensor(&occ, &Tensor::new(vec![M, H, W], vec![0.0; M * H * W]).unwrap(), None).unwrap();
    let out = run_plan(&args, &out_arg);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("occupancy.tensor"));

    // missing file
    let mut missing = args.clone();
    missing[2] = s(&dir.path().join("nope.tensor")).to_string();
    let out = run_plan(&missing, &out_arg);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
}

#[test]
fn thread_override_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.toml");
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_actr"))
            .args(["baseline", "--kind", "static", "--radius", "2", "--out", s(&p)])
            .env("ACTR_THREADS", threads)
            .output()
            .unwrap()
    };
    assert!(run("0").status.success());
    assert!(run("2").status.success());
    assert_eq!(run("many").status.code(), Some(1));
}
