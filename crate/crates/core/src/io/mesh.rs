//! Minimal ASCII meshes: `v x y z` vertex lines and `f i j k` faces with
//! 1-based indices. Blank lines and `#` comments are skipped, other OBJ
//! record types are ignored, and `i/t/n` face tokens keep only the vertex.

use std::fmt::Write as _;
use std::path::Path;

use super::{read_text, write_atomic};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::losses::PointCloud;
use crate::mesh::TriangleMesh;

fn parse_records(text: &str, path: &Path) -> Result<(Vec<Vec3>, Vec<[usize; 3]>)> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let bad = |reason: String| Error::malformed(path, format!("line {lineno}: {reason}"));
        let line = line.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad(format!("bad vertex {line:?}")))?;
                if coords.len() != 3 || coords.iter().any(|c| !c.is_finite()) {
                    return Err(bad(format!("vertex needs three finite coordinates: {line:?}")));
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = tokens
                    .map(|t| t.split('/').next().unwrap_or("").parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad(format!("bad face {line:?}")))?;
                if idx.len() != 3 {
                    return Err(bad(format!("face must be a triangle: {line:?}")));
                }
                if idx.contains(&0) {
                    return Err(bad("face indices are 1-based".into()));
                }
                faces.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

/// Parses mesh text; `path` is only used in error messages.
pub fn parse_mesh(text: &str, path: &Path) -> Result<TriangleMesh> {
    let (vertices, faces) = parse_records(text, path)?;
    if faces.is_empty() {
        return Err(Error::malformed(path, "mesh has no faces"));
    }
    TriangleMesh::new(vertices, faces).map_err(|e| Error::malformed(path, e.to_string()))
}

pub fn read_mesh(path: &Path) -> Result<TriangleMesh> {
    parse_mesh(&read_text(path)?, path)
}

/// Reads only the vertex records of a mesh-format file.
pub fn read_point_cloud(path: &Path) -> Result<PointCloud> {
    let (vertices, _) = parse_records(&read_text(path)?, path)?;
    PointCloud::new(vertices).map_err(|e| Error::malformed(path, e.to_string()))
}

pub fn write_mesh(path: &Path, mesh: &TriangleMesh) -> Result<()> {
    let mut out = String::new();
    for v in mesh.vertices() {
        writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z).unwrap();
    }
    for f in mesh.faces() {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    write_atomic(path, out.as_bytes())
}
