//! Surface coverage of an inspection mesh.
//!
//! A triangle counts as seen when its centroid is in range, it faces the
//! camera and the centroid lies inside the view cone. Occlusion is ignored.

use crate::env_map::TriangleMesh;
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel {
    /// Full cone angle (degrees).
    pub fov: f64,
    /// Maximum inspection distance (m).
    pub range: f64,
}

impl CameraModel {
    pub fn new(fov: f64, range: f64) -> Result<Self> {
        if !(fov > 0.0 && fov < 180.0) || !(range > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "camera needs 0 < fov < 180 and range > 0, got fov {fov}, range {range}"
            )));
        }
        Ok(Self { fov, range })
    }
}

impl Default for CameraModel {
    fn default() -> Self {
        Self { fov: 70.0, range: 1.2 }
    }
}

/// Indices of triangles visible from `position` looking along the unit
/// vector `view`, in increasing order.
pub fn visible_triangles(position: &Vec3, view: &Vec3, camera: &CameraModel, mesh: &TriangleMesh) -> Vec<usize> {
    let cos_half = (camera.fov.to_radians() / 2.0).cos();
    let range2 = camera.range * camera.range;
    mesh.centroids()
        .iter()
        .zip(mesh.normals())
        .enumerate()
        .filter(|(_, (c, n))| {
            let to_cam = position - *c;
            let d2 = to_cam.norm_squared();
            if d2 > range2 || n.dot(&to_cam) <= 0.0 {
                return false;
            }
            let d = d2.sqrt();
            // Centroid at the camera: no bearing, treat as outside the cone.
            d > 0.0 && view.dot(&(-to_cam)) >= cos_half * d
        })
        .map(|(i, _)| i)
        .collect()
}

/// Accumulates the set of triangles seen so far.
#[derive(Debug, Clone)]
pub struct CoverageTracker {
    mesh: TriangleMesh,
    seen: Vec<bool>,
    count: usize,
}

impl CoverageTracker {
    pub fn new(mesh: TriangleMesh) -> Self {
        let n = mesh.len();
        Self {
            mesh,
            seen: vec![false; n],
            count: 0,
        }
    }

    pub fn mesh(&self) -> &TriangleMesh {
        &self.mesh
    }

    pub fn seen_count(&self) -> usize {
        self.count
    }

    pub fn total(&self) -> usize {
        self.seen.len()
    }

    pub fn is_seen(&self, triangle: usize) -> bool {
        self.seen.get(triangle).copied().unwrap_or(false)
    }

    /// Fraction of triangles seen; 1.0 for an empty mesh.
    pub fn ratio(&self) -> f64 {
        if self.seen.is_empty() {
            1.0
        } else {
            self.count as f64 / self.seen.len() as f64
        }
    }

    /// Marks everything visible from the pose and returns the new ratio.
    pub fn update_and_ratio(&mut self, position: &Vec3, view: &Vec3, camera: &CameraModel) -> f64 {
        for i in visible_triangles(position, view, camera, &self.mesh) {
            if !self.seen[i] {
                self.seen[i] = true;
                self.count += 1;
            }
        }
        self.ratio()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    /// Upright triangle centred at `c` facing -x (toward a camera at the origin).
    fn facing_triangle(c: Vec3, flip: bool) -> ([Vec3; 3], [usize; 3]) {
        let a = c + v(0.0, 0.1, -0.05);
        let b = c + v(0.0, -0.1, -0.05);
        let d = c + v(0.0, 0.0, 0.1);
        let tri = if flip { [0, 2, 1] } else { [0, 1, 2] };
        ([a, b, d], tri)
    }

    fn mesh_of(items: &[([Vec3; 3], [usize; 3])]) -> TriangleMesh {
        let mut verts = Vec::new();
        let mut tris = Vec::new();
        for (vs, t) in items {
            let base = verts.len();
            verts.extend_from_slice(vs);
            tris.push([base + t[0], base + t[1], base + t[2]]);
        }
        TriangleMesh::new(verts, tris).unwrap()
    }

    #[test]
    fn visibility_conditions() {
        let cam = CameraModel::new(70.0, 2.0).unwrap();
        let ahead = mesh_of(&[facing_triangle(v(1.0, 0.0, 0.0), false)]);
        assert!(ahead.normals()[0].x < 0.0);
        assert_eq!(visible_triangles(&Vec3::zeros(), &Vec3::x(), &cam, &ahead), vec![0]);

        let back = mesh_of(&[facing_triangle(v(1.0, 0.0, 0.0), true)]);
        assert!(visible_triangles(&Vec3::zeros(), &Vec3::x(), &cam, &back).is_empty());

        let th = 40f64.to_radians();
        let off = mesh_of(&[facing_triangle(v(th.cos(), th.sin(), 0.0), false)]);
        assert!(off.normals()[0].dot(&(-off.centroids()[0])) > 0.0);
        assert!(visible_triangles(&Vec3::zeros(), &Vec3::x(), &cam, &off).is_empty());

        let far = mesh_of(&[facing_triangle(v(2.5, 0.0, 0.0), false)]);
        assert!(visible_triangles(&Vec3::zeros(), &Vec3::x(), &cam, &far).is_empty());
    }

    #[test]
    fn ratio_accumulates_as_a_set() {
        let cam = CameraModel::new(70.0, 2.0).unwrap();
        let mesh = mesh_of(&[
            facing_triangle(v(1.0, 0.0, 0.0), false),
            facing_triangle(v(1.0, 0.2, 0.0), false),
            facing_triangle(v(-1.0, 0.0, 0.0), false),
            facing_triangle(v(-1.0, 0.2, 0.0), false),
        ]);
        let mut tr = CoverageTracker::new(mesh);
        assert_eq!(tr.update_and_ratio(&Vec3::zeros(), &Vec3::x(), &cam), 0.5);
        assert_eq!(tr.update_and_ratio(&Vec3::zeros(), &Vec3::x(), &cam), 0.5);
        // The far pair faces -x, so it is seen from beyond it.
        assert_eq!(tr.update_and_ratio(&v(-2.0, 0.1, 0.0), &Vec3::x(), &cam), 1.0);
    }

    #[test]
    fn empty_mesh_is_fully_covered() {
        let tr = CoverageTracker::new(TriangleMesh::new(Vec::new(), Vec::new()).unwrap());
        assert_eq!(tr.ratio(), 1.0);
    }

    #[test]
    fn rejects_bad_camera() {
        assert!(CameraModel::new(180.0, 1.0).is_err());
        assert!(CameraModel::new(70.0, 0.0).is_err());
    }
}
