//! Coverage reports (TOML), block-grid debug dumps (JSON) and score tables
//! (CSV).

use std::fmt::Write as _;
use std::path::Path;

use super::{read_text, write_atomic};
use crate::blocks::BlockGrid;
use crate::coverage::CoverageReport;
use crate::error::{Error, Result};
use crate::planner::ScoredTrajectory;

pub fn write_coverage_report(path: &Path, report: &CoverageReport) -> Result<()> {
    let text = toml::to_string(report).expect("coverage report serializes");
    write_atomic(path, text.as_bytes())
}

pub fn read_coverage_report(path: &Path) -> Result<CoverageReport> {
    let text = read_text(path)?;
    toml::from_str(&text).map_err(|e| Error::malformed(path, e.message().to_string()))
}

pub fn write_block_dump(path: &Path, grid: &BlockGrid) -> Result<()> {
    let mut text = serde_json::to_string_pretty(grid).expect("block grid serializes");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Reads a dump and checks it against its own bounding-box partition.
pub fn read_block_dump(path: &Path) -> Result<BlockGrid> {
    let text = read_text(path)?;
    let grid: BlockGrid =
        serde_json::from_str(&text).map_err(|e| Error::malformed(path, e.to_string()))?;
    grid.validated()
}

/// One row per trajectory: `kind,delta1_deg,delta2_deg,seed,score`. Fields
/// that do not apply to a kind are left empty; scores use the shortest
/// representation that reads back exactly.
pub fn format_score_table(rows: &[ScoredTrajectory]) -> String {
    let mut out = String::from("kind,delta1_deg,delta2_deg,seed,score\n");
    for row in rows {
        let kind = row.trajectory.kind();
        let (d1, d2) = match kind.deltas() {
            Some((a, b)) => (format!("{a:?}"), format!("{b:?}")),
            None => (String::new(), String::new()),
        };
        let seed = match kind {
            crate::planner::TrajectoryKind::Random { seed } => seed.to_string(),
            _ => String::new(),
        };
        writeln!(out, "{},{d1},{d2},{seed},{:?}", kind.tag(), row.score).unwrap();
    }
    out
}

pub fn write_score_table(path: &Path, rows: &[ScoredTrajectory]) -> Result<()> {
    write_atomic(path, format_score_table(rows).as_bytes())
}
