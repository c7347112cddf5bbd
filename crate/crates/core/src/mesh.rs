//! Triangle meshes, ray/triangle tests and the synthetic test objects used for
//! coverage evaluation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Parallel/degenerate threshold of the Möller-Trumbore test.
pub const TRIANGLE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(f) = faces.iter().find(|f| f.iter().any(|&i| i >= vertices.len())) {
            return Err(Error::InvalidParameter(format!(
                "face {f:?} references a vertex beyond {}",
                vertices.len()
            )));
        }
        Ok(Self { vertices, faces })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn triangle(&self, face: usize) -> [Vec3; 3] {
        let [a, b, c] = self.faces[face];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.triangle(face);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.triangle_area(f)).sum()
    }

    /// Every undirected edge is shared by exactly two faces.
    pub fn is_watertight(&self) -> bool {
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            for e in 0..3 {
                let (a, b) = (f[e], f[(e + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        !edges.is_empty() && edges.values().all(|&n| n == 2)
    }

    /// True when the segment `from -> to` touches any triangle.
    pub fn segment_hits(&self, from: &Vec3, to: &Vec3) -> bool {
        let dir = to - from;
        (0..self.faces.len()).any(|f| {
            segment_triangle_param(from, &dir, &self.triangle(f)).is_some()
        })
    }
}

/// Möller-Trumbore: the parameter `t` in `[0, 1]` at which `origin + t * dir`
/// crosses the triangle, if it does.
pub fn segment_triangle_param(origin: &Vec3, dir: &Vec3, tri: &[Vec3; 3]) -> Option<f64> {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let p = dir.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < TRIANGLE_EPSILON * e1.norm() * e2.norm() * dir.norm() {
        return None;
    }
    let inv = 1.0 / det;
    let s = origin - tri[0];
    let u = s.dot(&p) * inv;
    if !(-TRIANGLE_EPSILON..=1.0 + TRIANGLE_EPSILON).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < -TRIANGLE_EPSILON || u + v > 1.0 + TRIANGLE_EPSILON {
        return None;
    }
    let t = e2.dot(&q) * inv;
    (0.0..=1.0).contains(&t).then_some(t)
}

/// Synthetic test objects, all centered on the origin with +Z up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShapeKind {
    /// Axis-aligned box with edges `(x, y, z)`.
    Box { size: [f64; 3] },
    /// Solid cup open at the top.
    Bowl {
        outer_radius: f64,
        inner_radius: f64,
        height: f64,
        floor: f64,
        segments: usize,
    },
    /// Thick pipe open at both ends.
    Tube {
        outer_radius: f64,
        inner_radius: f64,
        height: f64,
        segments: usize,
    },
    /// L-shaped profile in the XZ plane extruded along Y.
    LShape { arm: f64, thickness: f64, depth: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticShape {
    pub kind: ShapeKind,
    pub mesh: TriangleMesh,
}

impl SyntheticShape {
    pub fn unit_cube() -> Self {
        Self::build(ShapeKind::Box { size: [1.0; 3] }).expect("valid cube")
    }

    /// A bowl deep enough that its floor is hidden from the equator.
    pub fn deep_bowl() -> Self {
        Self::build(ShapeKind::Bowl {
            outer_radius: 0.5,
            inner_radius: 0.4,
            height: 1.0,
            floor: 0.1,
            segments: 32,
        })
        .expect("valid bowl")
    }

    pub fn build(kind: ShapeKind) -> Result<Self> {
        let mesh = match kind {
            ShapeKind::Box { size } => {
                if size.iter().any(|s| !(*s > 0.0)) {
                    return Err(Error::InvalidParameter("box edges must be positive".into()));
                }
                box_mesh(Vec3::from(size) * 0.5)
            }
            ShapeKind::Bowl {
                outer_radius,
                inner_radius,
                height,
                floor,
                segments,
            } => {
                if !(0.0 < inner_radius
                    && inner_radius < outer_radius
                    && 0.0 < floor
                    && floor < height
                    && segments >= 3)
                {
                    return Err(Error::InvalidParameter("inconsistent bowl dimensions".into()));
                }
                let (lo, hi) = (-height / 2.0, height / 2.0);
                revolve(
                    &[
                        (0.0, lo),
                        (outer_radius, lo),
                        (outer_radius, hi),
                        (inner_radius, hi),
                        (inner_radius, lo + floor),
                        (0.0, lo + floor),
                    ],
                    segments,
                )
            }
            ShapeKind::Tube {
                outer_radius,
                inner_radius,
                height,
                segments,
            } => {
                if !(0.0 < inner_radius && inner_radius < outer_radius && height > 0.0 && segments >= 3) {
                    return Err(Error::InvalidParameter("inconsistent tube dimensions".into()));
                }
                let (lo, hi) = (-height / 2.0, height / 2.0);
                revolve(
                    &[
                        (inner_radius, lo),
                        (outer_radius, lo),
                        (outer_radius, hi),
                        (inner_radius, hi),
                    ],
                    segments,
                )
            }
            ShapeKind::LShape {
                arm,
                thickness,
                depth,
            } => {
                if !(0.0 < thickness && thickness < arm && depth > 0.0) {
                    return Err(Error::InvalidParameter("inconsistent L-shape dimensions".into()));
                }
                l_prism(arm, thickness, depth)
            }
        };
        Ok(Self { kind, mesh })
    }
}

fn box_mesh(half: Vec3) -> TriangleMesh {
    let vertices: Vec<Vec3> = (0..8)
        .map(|i| {
            Vec3::new(
                if i & 1 == 0 { -half.x } else { half.x },
                if i & 2 == 0 { -half.y } else { half.y },
                if i & 4 == 0 { -half.z } else { half.z },
            )
        })
        .collect();
    // two triangles per face, outward winding; faces ordered -x, +x, -y, +y, -z, +z
    let quads = [
        [0, 4, 6, 2],
        [1, 3, 7, 5],
        [0, 1, 5, 4],
        [2, 6, 7, 3],
        [0, 2, 3, 1],
        [4, 5, 7, 6],
    ];
    let faces = quads
        .iter()
        .flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]])
        .collect();
    TriangleMesh { vertices, faces }
}

/// Revolves a closed `(radius, z)` profile about the Z axis. Profile points on
/// the axis become a single pole vertex.
pub(crate) fn revolve(profile: &[(f64, f64)], segments: usize) -> TriangleMesh {
    let mut vertices = Vec::new();
    let rings: Vec<Vec<usize>> = profile
        .iter()
        .map(|&(r, z)| {
            if r == 0.0 {
                vertices.push(Vec3::new(0.0, 0.0, z));
                vec![vertices.len() - 1; segments]
            } else {
                (0..segments)
                    .map(|s| {
                        let a = std::f64::consts::TAU * s as f64 / segments as f64;
                        vertices.push(Vec3::new(r * a.cos(), r * a.sin(), z));
                        vertices.len() - 1
                    })
                    .collect()
            }
        })
        .collect();
    let mut faces = Vec::new();
    for p in 0..profile.len() {
        let (a, b) = (&rings[p], &rings[(p + 1) % profile.len()]);
        for s in 0..segments {
            let n = (s + 1) % segments;
            for f in [[a[s], b[s], b[n]], [a[s], b[n], a[n]]] {
                if f[0] != f[1] && f[1] != f[2] && f[0] != f[2] {
                    faces.push(f);
                }
            }
        }
    }
    TriangleMesh { vertices, faces }
}

fn l_prism(arm: f64, thickness: f64, depth: f64) -> TriangleMesh {
    // profile in (x, z), centered on the bounding square
    let c = arm / 2.0;
    let outline = [
        (0.0, 0.0),
        (arm, 0.0),
        (arm, thickness),
        (thickness, thickness),
        (thickness, arm),
        (0.0, arm),
    ];
    let n = outline.len();
    let mut vertices = Vec::with_capacity(2 * n);
    for y in [-depth / 2.0, depth / 2.0] {
        vertices.extend(outline.iter().map(|&(x, z)| Vec3::new(x - c, y, z - c)));
    }
    let mut faces = Vec::new();
    // caps: fan from the reflex corner (index 3), which sees every edge
    for i in [4, 5, 0, 1] {
        let j = (i + 1) % n;
        faces.push([3, j, i]);
        faces.push([n + 3, n + i, n + j]);
    }
    for i in 0..n {
        let j = (i + 1) % n;
        faces.push([i, j, n + j]);
        faces.push([i, n + j, n + i]);
    }
    TriangleMesh { vertices, faces }
}
