use std::path::Path;

use crate::{Error, Result, Vec3};

/// Triangulated inspection surface with per-triangle outward normals.
///
/// Normals follow the right-hand rule on the vertex order, so counter
/// clockwise triangles seen from outside face outward.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    normals: Vec<Vec3>,
    centroids: Vec<Vec3>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mut normals = Vec::with_capacity(triangles.len());
        let mut centroids = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::InvalidParameter(format!(
                    "triangle {t} references vertex {bad}, mesh has {}",
                    vertices.len()
                )));
            }
            let [a, b, c] = tri.map(|i| vertices[i]);
            let n = (b - a).cross(&(c - a));
            let norm = n.norm();
            if !(norm > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "triangle {t} is degenerate"
                )));
            }
            normals.push(n / norm);
            centroids.push((a + b + c) / 3.0);
        }
        Ok(Self {
            vertices,
            triangles,
            normals,
            centroids,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn centroids(&self) -> &[Vec3] {
        &self.centroids
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

/// Reads the `v` / `f` subset of Wavefront OBJ. Faces must be triangles with
/// 1-based indices; `i/t/n` index forms are accepted and only `i` is used.
/// Other directives are ignored.
pub fn parse_obj(text: &str, path: &Path) -> Result<TriangleMesh> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let rest: Vec<&str> = fields.collect();
                // Optional fourth (w) component is ignored.
                if rest.len() < 3 {
                    return Err(err(n + 1, "vertex needs 3 coordinates".into()));
                }
                let p = super::cloud::parse_triple(&rest[..3].join(" "))
                    .map_err(|m| err(n + 1, m))?;
                vertices.push(p);
            }
            Some("f") => {
                let idx: Vec<&str> = fields.collect();
                if idx.len() != 3 {
                    return Err(err(
                        n + 1,
                        format!("only triangles supported, face has {} vertices", idx.len()),
                    ));
                }
                let mut tri = [0usize; 3];
                for (slot, tok) in tri.iter_mut().zip(&idx) {
                    let head = tok.split('/').next().unwrap_or("");
                    let i: usize = head
                        .parse()
                        .map_err(|_| err(n + 1, format!("invalid face index {tok:?}")))?;
                    if i == 0 {
                        return Err(err(n + 1, "face indices are 1-based".into()));
                    }
                    *slot = i - 1;
                }
                triangles.push(tri);
            }
            _ => {}
        }
    }
    TriangleMesh::new(vertices, triangles).map_err(|e| match e {
        Error::InvalidParameter(m) => err(0, m),
        other => other,
    })
}

pub fn load_obj(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_obj(&text, path)
}

/// Lateral surface of the cylinder with axis `a -> b`, outward normals,
/// `segments` around the circumference and `rings` along the axis.
pub fn cylinder_mesh(a: &Vec3, b: &Vec3, radius: f64, segments: usize, rings: usize) -> Result<TriangleMesh> {
    let axis = b - a;
    let len = axis.norm();
    if !(len > 0.0) || !(radius > 0.0) || segments < 3 || rings < 1 {
        return Err(Error::InvalidParameter(
            "cylinder mesh needs a non-zero axis, radius > 0, segments >= 3, rings >= 1".into(),
        ));
    }
    let w = axis / len;
    let helper = if w.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = w.cross(&helper).normalize();
    let v = w.cross(&u);
    let mut vertices = Vec::with_capacity(segments * (rings + 1));
    for r in 0..=rings {
        let base = a + axis * (r as f64 / rings as f64);
        for s in 0..segments {
            let th = std::f64::consts::TAU * s as f64 / segments as f64;
            vertices.push(base + (u * th.cos() + v * th.sin()) * radius);
        }
    }
    let mut triangles = Vec::with_capacity(2 * segments * rings);
    for r in 0..rings {
        for s in 0..segments {
            let s1 = (s + 1) % segments;
            let i00 = r * segments + s;
            let i01 = r * segments + s1;
            let i10 = (r + 1) * segments + s;
            let i11 = (r + 1) * segments + s1;
            // u x v = w, so (i00, i01, i11) winds outward.
            triangles.push([i00, i01, i11]);
            triangles.push([i00, i11, i10]);
        }
    }
    TriangleMesh::new(vertices, triangles)
}
