//! On-disk formats: binary tensors, trajectory documents, ASCII meshes,
//! coverage reports and block-grid dumps.

mod mesh;
mod report;
mod tensor;
mod trajectory;

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub use mesh::{parse_mesh, read_mesh, read_point_cloud, write_mesh};
pub use report::{
    format_score_table, read_block_dump, read_coverage_report, write_block_dump, write_coverage_report,
    write_score_table,
};
pub use tensor::{
    decode_tensor, encode_tensor, read_tensor, read_tensor_meta, write_tensor, Tensor,
    TensorMeta, TensorRole, TENSOR_MAGIC,
};
pub use trajectory::{
    format_trajectory, parse_trajectory, read_trajectory, write_trajectory, TrajectoryDocument,
    ANGLE_DECIMALS, TRAJECTORY_FORMAT,
};

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParameter(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes).map_err(|_| Error::malformed(path, "not valid UTF-8 text"))
}
