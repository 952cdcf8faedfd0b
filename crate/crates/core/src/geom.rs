//! Small geometric helpers shared by the map, tether and planner modules.

use crate::Vec3;

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    /// Smallest box containing every point, `None` for an empty slice.
    pub fn from_points(points: &[Vec3]) -> Option<Self> {
        let first = points.first()?;
        let mut b = Aabb::new(*first, *first);
        for p in &points[1..] {
            b.min = b.min.inf(p);
            b.max = b.max.sup(p);
        }
        Some(b)
    }

    /// True when any extent is non-positive or a corner is not finite.
    pub fn is_degenerate(&self) -> bool {
        let ok = (0..3).all(|k| {
            self.min[k].is_finite() && self.max[k].is_finite() && self.max[k] > self.min[k]
        });
        !ok
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    pub fn inflated(&self, amount: f64) -> Self {
        let d = Vec3::repeat(amount);
        Aabb::new(self.min - d, self.max + d)
    }

    pub fn intersection(&self, other: &Aabb) -> Aabb {
        Aabb::new(self.min.sup(&other.min), self.max.inf(&other.max))
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn clamp(&self, p: &Vec3) -> Vec3 {
        p.sup(&self.min).inf(&self.max)
    }
}

/// Sum of consecutive distances; zero for fewer than two points.
pub fn path_length(path: &[Vec3]) -> f64 {
    path.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Interior samples of segment `[a, b]` at spacing at most `spacing`.
///
/// Neither endpoint is included. The segment is split into
/// `ceil(|b - a| / spacing)` equal pieces.
pub fn segment_interior(a: &Vec3, b: &Vec3, spacing: f64) -> Vec<Vec3> {
    let len = (b - a).norm();
    if len <= spacing || spacing <= 0.0 {
        return Vec::new();
    }
    let pieces = (len / spacing - 1e-9).ceil().max(1.0) as usize;
    (1..pieces)
        .map(|k| a + (b - a) * (k as f64 / pieces as f64))
        .collect()
}

/// Inserts samples so no two consecutive points are more than `spacing`
/// apart. Original vertices are kept.
pub fn densify(path: &[Vec3], spacing: f64) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(path.len());
    for (k, p) in path.iter().enumerate() {
        if k > 0 {
            out.extend(segment_interior(&path[k - 1], p, spacing));
        }
        out.push(*p);
    }
    out
}

/// Resamples a polyline at uniform arc-length spacing (the last piece may be
/// shorter). Both endpoints are kept exactly.
pub fn resample_uniform(path: &[Vec3], spacing: f64) -> Vec<Vec3> {
    if path.len() < 2 {
        return path.to_vec();
    }
    let total = path_length(path);
    if total <= 0.0 {
        return vec![path[0]];
    }
    let pieces = (total / spacing - 1e-9).ceil().max(1.0) as usize;
    let mut out = Vec::with_capacity(pieces + 1);
    out.push(path[0]);
    for k in 1..pieces {
        out.push(point_at_arclength(path, total * k as f64 / pieces as f64));
    }
    out.push(*path.last().unwrap());
    out
}

/// Point at arc-length `s` along the polyline, clamped to its ends.
pub fn point_at_arclength(path: &[Vec3], s: f64) -> Vec3 {
    let Some(first) = path.first() else {
        return Vec3::zeros();
    };
    if s <= 0.0 {
        return *first;
    }
    let mut acc = 0.0;
    for w in path.windows(2) {
        let seg = (w[1] - w[0]).norm();
        if acc + seg >= s && seg > 0.0 {
            return w[0] + (w[1] - w[0]) * ((s - acc) / seg);
        }
        acc += seg;
    }
    *path.last().unwrap()
}

/// Arc-length of the path point closest to `p`.
pub fn closest_arclength(path: &[Vec3], p: &Vec3) -> f64 {
    let mut best = f64::INFINITY;
    let mut best_s = 0.0;
    let mut acc = 0.0;
    if path.len() == 1 {
        return 0.0;
    }
    for w in path.windows(2) {
        let d = w[1] - w[0];
        let seg = d.norm();
        let t = if seg > 0.0 {
            ((p - w[0]).dot(&d) / (seg * seg)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let dist = (w[0] + d * t - p).norm();
        if dist < best {
            best = dist;
            best_s = acc + t * seg;
        }
        acc += seg;
    }
    best_s
}

/// Like [`closest_arclength`] but only considers arc-lengths in `[lo, hi]`.
pub fn closest_arclength_in(path: &[Vec3], p: &Vec3, lo: f64, hi: f64) -> f64 {
    let mut best = f64::INFINITY;
    let mut best_s = lo.max(0.0);
    let mut acc = 0.0;
    for w in path.windows(2) {
        let d = w[1] - w[0];
        let seg = d.norm();
        let (s0, s1) = (acc, acc + seg);
        acc = s1;
        if s1 < lo || s0 > hi || seg == 0.0 {
            continue;
        }
        // Rounding can put lo a hair past s1; keep t_lo <= t_hi regardless.
        let t_lo = ((lo - s0) / seg).clamp(0.0, 1.0);
        let t_hi = ((hi - s0) / seg).clamp(t_lo, 1.0);
        let t = ((p - w[0]).dot(&d) / (seg * seg)).clamp(t_lo, t_hi);
        let dist = (w[0] + d * t - p).norm();
        if dist < best {
            best = dist;
            best_s = s0 + t * seg;
        }
    }
    best_s
}

/// Euclidean distance from `p` to segment `[a, b]`.
pub fn point_segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&d) / len2).clamp(0.0, 1.0);
    (a + d * t - p).norm()
}
