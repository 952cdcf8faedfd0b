//! Voxel signed distance field.
//!
//! Occupied voxels store `0`. Every other voxel stores the Euclidean distance
//! from its center to the nearest occupied voxel center, clamped to the
//! truncation distance. Distances are exact: the transform is the separable
//! lower-envelope-of-parabolas algorithm run once per axis on squared
//! distances.
//!
//! Queries interpolate trilinearly between voxel centers. Because stored
//! values are samples of a 1-Lipschitz function, each partial derivative of
//! the interpolant is bounded by one, so the interpolated field is
//! `sqrt(3)`-Lipschitz. Line-of-sight checks use that bound to skip samples
//! that provably clear the margin.

use super::{PointCloud, Primitive};
use crate::geom::Aabb;
use crate::{Error, Result, Vec3};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Placement of a regular voxel grid. Voxel `(i, j, k)` spans
/// `origin + [i, i+1) * resolution` on each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoxelLayout {
    pub origin: Vec3,
    pub resolution: f64,
    pub dims: [usize; 3],
}

impl VoxelLayout {
    pub fn from_bounds(bounds: &Aabb, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if bounds.is_degenerate() {
            return Err(Error::InvalidParameter(format!(
                "degenerate bounds {:?} .. {:?}",
                bounds.min, bounds.max
            )));
        }
        let ext = bounds.extent();
        let dims = [0, 1, 2].map(|k| ((ext[k] / resolution - 1e-9).ceil() as usize).max(1));
        Ok(Self {
            origin: bounds.min,
            resolution,
            dims,
        })
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims[1] + j) * self.dims[0] + i
    }

    pub fn center(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin + Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * self.resolution
    }

    pub fn bounds(&self) -> Aabb {
        let ext = Vec3::new(self.dims[0] as f64, self.dims[1] as f64, self.dims[2] as f64)
            * self.resolution;
        Aabb::new(self.origin, self.origin + ext)
    }

    /// Voxel containing `p`, or `None` outside the grid. Points on the upper
    /// faces belong to the last voxel.
    pub fn voxel_of(&self, p: &Vec3) -> Option<[usize; 3]> {
        let mut out = [0usize; 3];
        for k in 0..3 {
            let u = (p[k] - self.origin[k]) / self.resolution;
            if !(u >= 0.0) || u > self.dims[k] as f64 {
                return None;
            }
            out[k] = (u.floor() as usize).min(self.dims[k] - 1);
        }
        Some(out)
    }
}

/// Boolean voxel occupancy, the input of the distance transform.
#[derive(Debug, Clone)]
pub struct OccupancyGrid {
    layout: VoxelLayout,
    occupied: Vec<bool>,
}

impl OccupancyGrid {
    pub fn new(layout: VoxelLayout) -> Self {
        Self {
            occupied: vec![false; layout.len()],
            layout,
        }
    }

    pub fn layout(&self) -> &VoxelLayout {
        &self.layout
    }

    /// Marks the voxel containing `p`; false when `p` is outside the grid.
    pub fn mark_point(&mut self, p: &Vec3) -> bool {
        match self.layout.voxel_of(p) {
            Some([i, j, k]) => {
                let idx = self.layout.index(i, j, k);
                self.occupied[idx] = true;
                true
            }
            None => false,
        }
    }

    /// Marks every voxel whose center lies inside the primitive.
    pub fn mark_primitive(&mut self, prim: &Primitive) -> usize {
        let l = self.layout;
        let pb = prim.bounds().intersection(&l.bounds());
        if pb.is_degenerate() {
            return 0;
        }
        let lo = [0, 1, 2].map(|k| {
            (((pb.min[k] - l.origin[k]) / l.resolution).floor().max(0.0) as usize).min(l.dims[k] - 1)
        });
        let hi = [0, 1, 2].map(|k| {
            (((pb.max[k] - l.origin[k]) / l.resolution).ceil().max(0.0) as usize).min(l.dims[k] - 1)
        });
        let mut n = 0;
        for k in lo[2]..=hi[2] {
            for j in lo[1]..=hi[1] {
                for i in lo[0]..=hi[0] {
                    if prim.contains(&l.center(i, j, k)) {
                        let idx = l.index(i, j, k);
                        if !self.occupied[idx] {
                            self.occupied[idx] = true;
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    pub fn count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    /// Runs the exact Euclidean distance transform.
    pub fn into_sdf(self, truncation: f64) -> Result<SdfGrid> {
        if !(truncation >= self.layout.resolution) {
            return Err(Error::InvalidParameter(format!(
                "truncation {truncation} must be at least the resolution {}",
                self.layout.resolution
            )));
        }
        let l = self.layout;
        let [nx, ny, nz] = l.dims;
        let mut sq: Vec<f64> = self
            .occupied
            .iter()
            .map(|&o| if o { 0.0 } else { f64::INFINITY })
            .collect();

        let longest = nx.max(ny).max(nz);
        let mut line = vec![0.0; longest];
        let mut out = vec![0.0; longest];
        let mut scratch = Envelope::with_capacity(longest);

        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    line[i] = sq[l.index(i, j, k)];
                }
                scratch.transform(&line[..nx], &mut out[..nx]);
                for i in 0..nx {
                    sq[l.index(i, j, k)] = out[i];
                }
            }
        }
        for k in 0..nz {
            for i in 0..nx {
                for j in 0..ny {
                    line[j] = sq[l.index(i, j, k)];
                }
                scratch.transform(&line[..ny], &mut out[..ny]);
                for j in 0..ny {
                    sq[l.index(i, j, k)] = out[j];
                }
            }
        }
        for j in 0..ny {
            for i in 0..nx {
                for k in 0..nz {
                    line[k] = sq[l.index(i, j, k)];
                }
                scratch.transform(&line[..nz], &mut out[..nz]);
                for k in 0..nz {
                    sq[l.index(i, j, k)] = out[k];
                }
            }
        }

        let occupied = self.count();
        let values = sq
            .into_iter()
            .map(|d2| (d2.sqrt() * l.resolution).min(truncation))
            .collect();
        Ok(SdfGrid {
            layout: l,
            values,
            truncation,
            occupied,
        })
    }
}

/// Scratch buffers for the 1D squared distance transform.
struct Envelope {
    v: Vec<usize>,
    z: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self {
            v: vec![0; n],
            z: vec![0.0; n + 1],
        }
    }

    /// `out[q] = min_p (q - p)^2 + f[p]` over finite `f[p]`.
    fn transform(&mut self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        let mut k: usize = 0;
        let mut seeded = false;
        for q in 0..n {
            if !f[q].is_finite() {
                continue;
            }
            if !seeded {
                self.v[0] = q;
                self.z[0] = f64::NEG_INFINITY;
                self.z[1] = f64::INFINITY;
                seeded = true;
                continue;
            }
            let qf = q as f64;
            // z[0] is -inf, so the pop loop never empties the envelope.
            let s = loop {
                let p = self.v[k];
                let pf = p as f64;
                let s = ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf));
                if s <= self.z[k] {
                    k -= 1;
                } else {
                    break s;
                }
            };
            k += 1;
            self.v[k] = q;
            self.z[k] = s;
            self.z[k + 1] = f64::INFINITY;
        }
        if !seeded {
            out.iter_mut().for_each(|o| *o = f64::INFINITY);
            return;
        }
        let mut k = 0;
        for (q, o) in out.iter_mut().enumerate() {
            let qf = q as f64;
            while self.z[k + 1] < qf {
                k += 1;
            }
            let p = self.v[k];
            let d = qf - p as f64;
            *o = d * d + f[p];
        }
    }
}

/// Truncated distance field over a voxel grid. Immutable once built.
#[derive(Debug, Clone)]
pub struct SdfGrid {
    layout: VoxelLayout,
    values: Vec<f64>,
    truncation: f64,
    occupied: usize,
}

/// Builds the distance field of a point cloud: voxels containing at least
/// one point are occupied.
///
/// A cloud with no point inside `bounds` produces an all-free grid and logs
/// a warning.
pub fn build_sdf(cloud: &PointCloud, bounds: &Aabb, resolution: f64, truncation: f64) -> Result<SdfGrid> {
    let layout = VoxelLayout::from_bounds(bounds, resolution)?;
    let mut occ = OccupancyGrid::new(layout);
    let inside = cloud.points().iter().filter(|p| occ.mark_point(p)).count();
    if inside == 0 && !cloud.is_empty() {
        log::warn!(
            "none of the {} cloud points lie inside the map bounds; map is empty",
            cloud.len()
        );
    }
    occ.into_sdf(truncation)
}

impl SdfGrid {
    /// Distance field of solid primitives plus an optional point cloud.
    pub fn from_primitives(
        bounds: &Aabb,
        resolution: f64,
        truncation: f64,
        primitives: &[Primitive],
        cloud: Option<&PointCloud>,
    ) -> Result<Self> {
        let mut occ = OccupancyGrid::new(VoxelLayout::from_bounds(bounds, resolution)?);
        for p in primitives {
            occ.mark_primitive(p);
        }
        if let Some(c) = cloud {
            for p in c.points() {
                occ.mark_point(p);
            }
        }
        occ.into_sdf(truncation)
    }

    pub fn layout(&self) -> &VoxelLayout {
        &self.layout
    }

    pub fn resolution(&self) -> f64 {
        self.layout.resolution
    }

    pub fn origin(&self) -> Vec3 {
        self.layout.origin
    }

    pub fn dims(&self) -> [usize; 3] {
        self.layout.dims
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn bounds(&self) -> Aabb {
        self.layout.bounds()
    }

    /// Number of occupied voxels.
    pub fn occupied_count(&self) -> usize {
        self.occupied
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.layout.index(i, j, k)]
    }

    pub fn is_occupied(&self, i: usize, j: usize, k: usize) -> bool {
        self.value(i, j, k) <= 0.0
    }

    /// Centers of all occupied voxels.
    pub fn occupied_centers(&self) -> Vec<Vec3> {
        let [nx, ny, nz] = self.layout.dims;
        let mut out = Vec::with_capacity(self.occupied);
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    if self.is_occupied(i, j, k) {
                        out.push(self.layout.center(i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Trilinearly interpolated distance. Points outside the grid are free
    /// and return the truncation distance.
    pub fn distance_at(&self, p: &Vec3) -> f64 {
        let l = &self.layout;
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for k in 0..3 {
            let rel = (p[k] - l.origin[k]) / l.resolution;
            let n = l.dims[k];
            if !(rel >= 0.0) || rel > n as f64 {
                return self.truncation;
            }
            let u = (rel - 0.5).clamp(0.0, (n - 1) as f64);
            if n == 1 {
                base[k] = 0;
                frac[k] = 0.0;
            } else {
                let i0 = (u.floor() as usize).min(n - 2);
                base[k] = i0;
                frac[k] = u - i0 as f64;
            }
        }
        let [i, j, k] = base;
        let di = usize::from(l.dims[0] > 1);
        let dj = if l.dims[1] > 1 { l.dims[0] } else { 0 };
        let dk = if l.dims[2] > 1 { l.dims[0] * l.dims[1] } else { 0 };
        let i000 = l.index(i, j, k);
        let v = &self.values;
        let [fx, fy, fz] = frac;
        let c00 = v[i000] * (1.0 - fx) + v[i000 + di] * fx;
        let c10 = v[i000 + dj] * (1.0 - fx) + v[i000 + dj + di] * fx;
        let c01 = v[i000 + dk] * (1.0 - fx) + v[i000 + dk + di] * fx;
        let c11 = v[i000 + dk + dj] * (1.0 - fx) + v[i000 + dk + dj + di] * fx;
        let c0 = c00 * (1.0 - fy) + c10 * fy;
        let c1 = c01 * (1.0 - fy) + c11 * fy;
        c0 * (1.0 - fz) + c1 * fz
    }

    pub fn is_in_collision(&self, p: &Vec3, margin: f64) -> bool {
        self.distance_at(p) < margin
    }

    /// True when every sample of `[a, b]`, spaced at most half a voxel apart
    /// and including both endpoints, clears `margin`.
    pub fn line_of_sight(&self, a: &Vec3, b: &Vec3, margin: f64) -> bool {
        let d = b - a;
        let len = d.norm();
        let n = self.sample_count(len);
        if n == 0 {
            return !self.is_in_collision(a, margin);
        }
        let spacing = len / n as f64;
        let bounds = self.layout.bounds();
        let mut k = 0;
        loop {
            let p = a + d * (k as f64 / n as f64);
            let val = self.distance_at(&p);
            if val < margin {
                return false;
            }
            if k == n {
                return true;
            }
            let clear = if bounds.contains(&p) {
                (val - margin) / SQRT3
            } else {
                box_distance(&bounds, &p)
            };
            let skip = ((clear * (1.0 - 1e-9)) / spacing).floor();
            let skip = if skip >= 1.0 { skip.min(n as f64) as usize } else { 1 };
            // Always land on the far endpoint rather than past it.
            k = (k + skip).min(n);
        }
    }

    /// Reference implementation of [`SdfGrid::line_of_sight`] that evaluates
    /// every sample. Used to cross-check the accelerated version.
    pub fn line_of_sight_exhaustive(&self, a: &Vec3, b: &Vec3, margin: f64) -> bool {
        let d = b - a;
        let n = self.sample_count(d.norm());
        if n == 0 {
            return !self.is_in_collision(a, margin);
        }
        (0..=n).all(|k| self.distance_at(&(a + d * (k as f64 / n as f64))) >= margin)
    }

    fn sample_count(&self, len: f64) -> usize {
        let step = self.layout.resolution * 0.5;
        if len <= 0.0 {
            0
        } else {
            (len / step).ceil() as usize
        }
    }
}

fn box_distance(b: &Aabb, p: &Vec3) -> f64 {
    let dx = (b.min.x - p.x).max(0.0).max(p.x - b.max.x);
    let dy = (b.min.y - p.y).max(0.0).max(p.y - b.max.y);
    let dz = (b.min.z - p.z).max(0.0).max(p.z - b.max.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}
