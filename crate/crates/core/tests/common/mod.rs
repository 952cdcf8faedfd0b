//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use tetherplan::env_map::{Primitive, SdfGrid};
use tetherplan::geom::Aabb;
use tetherplan::Vec3;

pub type P2 = [f64; 2];

pub fn v(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

/// Thin slab grid with vertical prisms, for planar scenes in z = 0.
pub fn planar_grid(half: f64, resolution: f64, primitives: &[Primitive]) -> SdfGrid {
    let bounds = Aabb::new(v(-half, -half, -0.2), v(half, half, 0.2));
    SdfGrid::from_primitives(&bounds, resolution, 1.0, primitives, None).unwrap()
}

pub fn vertical_cylinder(cx: f64, cy: f64, r: f64) -> Primitive {
    Primitive::Cylinder {
        a: v(cx, cy, -1.0),
        b: v(cx, cy, 1.0),
        radius: r,
    }
}

pub fn vertical_box(x0: f64, y0: f64, x1: f64, y1: f64) -> Primitive {
    Primitive::Box(Aabb::new(v(x0, y0, -1.0), v(x1, y1, 1.0)))
}

/// Counter-clockwise polygon enclosing a disc.
pub fn disc_polygon(cx: f64, cy: f64, r: f64, sides: usize) -> Vec<P2> {
    let big = r / (std::f64::consts::PI / sides as f64).cos();
    (0..sides)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / sides as f64;
            [cx + big * a.cos(), cy + big * a.sin()]
        })
        .collect()
}

/// Counter-clockwise polygon enclosing a rectangle grown by `m` with
/// rounded corners.
pub fn rounded_rect_polygon(x0: f64, y0: f64, x1: f64, y1: f64, m: f64, per_corner: usize) -> Vec<P2> {
    let corners = [(x1, y0, -0.5), (x1, y1, 0.0), (x0, y1, 0.5), (x0, y0, 1.0)];
    let step = std::f64::consts::FRAC_PI_2 / per_corner as f64;
    let big = m / (step / 2.0).cos();
    let mut out = Vec::new();
    for (cx, cy, start) in corners {
        for k in 0..=per_corner {
            let a = std::f64::consts::PI * start + step * k as f64;
            out.push([cx + big * a.cos(), cy + big * a.sin()]);
        }
    }
    out
}

fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// True when the open segment passes through the interior of the convex
/// counter-clockwise polygon (Cyrus-Beck clipping).
pub fn segment_blocked(a: P2, b: P2, poly: &[P2]) -> bool {
    let d = [b[0] - a[0], b[1] - a[1]];
    let (mut t_in, mut t_out) = (0.0f64, 1.0f64);
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        let n = [-(q[1] - p[1]), q[0] - p[0]];
        let num = n[0] * (a[0] - p[0]) + n[1] * (a[1] - p[1]);
        let den = n[0] * d[0] + n[1] * d[1];
        if den.abs() < 1e-15 {
            if num <= 1e-12 {
                return false;
            }
        } else if den > 0.0 {
            t_in = t_in.max(-num / den);
        } else {
            t_out = t_out.min(-num / den);
        }
        if t_out - t_in <= 1e-9 {
            return false;
        }
    }
    t_out - t_in > 1e-9
}

pub fn point_inside(p: P2, poly: &[P2]) -> bool {
    (0..poly.len()).all(|k| cross(poly[k], poly[(k + 1) % poly.len()], p) > 0.0)
}

/// Shortest path from `a` to `b` around one convex polygon, via Dijkstra
/// over its visibility graph. Returns the length and the vertices used.
pub fn visibility_geodesic(a: P2, b: P2, poly: &[P2]) -> (f64, Vec<P2>) {
    let mut nodes = vec![a, b];
    nodes.extend_from_slice(poly);
    let n = nodes.len();
    let dist = |i: usize, j: usize| ((nodes[i][0] - nodes[j][0]).powi(2) + (nodes[i][1] - nodes[j][1]).powi(2)).sqrt();
    let mut best = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    best[0] = 0.0;
    for _ in 0..n {
        let Some(u) = (0..n).filter(|&i| !done[i]).min_by(|&i, &j| best[i].total_cmp(&best[j])) else {
            break;
        };
        if !best[u].is_finite() {
            break;
        }
        done[u] = true;
        for w in 0..n {
            if !done[w] && !segment_blocked(nodes[u], nodes[w], poly) {
                let c = best[u] + dist(u, w);
                if c < best[w] {
                    best[w] = c;
                    prev[w] = u;
                }
            }
        }
    }
    let mut route = vec![b];
    let mut k = 1;
    while prev[k] != usize::MAX {
        k = prev[k];
        route.push(nodes[k]);
    }
    route.reverse();
    (best[1], route)
}

/// Distance to the nearest occupied voxel centre, capped at the truncation.
pub fn brute_force_distance(grid: &SdfGrid, centers: &[Vec3], p: &Vec3) -> f64 {
    centers
        .iter()
        .map(|c| (c - p).norm())
        .fold(grid.truncation(), f64::min)
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0)
    }
}

/// 8-connected Dijkstra on a planar lattice of cell size `h` over the box
/// `[lo, hi]`; `free` decides which lattice points may be used.
pub fn grid_dijkstra(lo: P2, hi: P2, h: f64, start: P2, goal: P2, free: impl Fn(P2) -> bool) -> Option<f64> {
    let nx = ((hi[0] - lo[0]) / h).round() as usize + 1;
    let ny = ((hi[1] - lo[1]) / h).round() as usize + 1;
    let at = |i: usize, j: usize| [lo[0] + i as f64 * h, lo[1] + j as f64 * h];
    let snap = |p: P2| {
        let i = (((p[0] - lo[0]) / h).round() as usize).min(nx - 1);
        let j = (((p[1] - lo[1]) / h).round() as usize).min(ny - 1);
        (i, j)
    };
    let open: Vec<bool> = (0..nx * ny).map(|k| free(at(k % nx, k / nx))).collect();
    let (si, sj) = snap(start);
    let (gi, gj) = snap(goal);
    let s = sj * nx + si;
    let g = gj * nx + gi;
    let mut best = vec![f64::INFINITY; nx * ny];
    best[s] = 0.0;
    let mut heap = BinaryHeap::from([Item(0.0, s)]);
    while let Some(Item(c, u)) = heap.pop() {
        if u == g {
            break;
        }
        if c > best[u] {
            continue;
        }
        let (ui, uj) = ((u % nx) as i64, (u / nx) as i64);
        for di in -1i64..=1 {
            for dj in -1i64..=1 {
                let (wi, wj) = (ui + di, uj + dj);
                if (di, dj) == (0, 0) || wi < 0 || wj < 0 || wi >= nx as i64 || wj >= ny as i64 {
                    continue;
                }
                let w = wj as usize * nx + wi as usize;
                if !open[w] {
                    continue;
                }
                let nc = c + h * ((di * di + dj * dj) as f64).sqrt();
                if nc < best[w] {
                    best[w] = nc;
                    heap.push(Item(nc, w));
                }
            }
        }
    }
    let d0 = ((start[0] - at(si, sj)[0]).powi(2) + (start[1] - at(si, sj)[1]).powi(2)).sqrt();
    let d1 = ((goal[0] - at(gi, gj)[0]).powi(2) + (goal[1] - at(gi, gj)[1]).powi(2)).sqrt();
    best[g].is_finite().then(|| best[g] + d0 + d1)
}

/// Samples a straight polyline from `a` to `b` at most `step` apart,
/// excluding `a`.
pub fn walk(a: Vec3, b: Vec3, step: f64) -> Vec<Vec3> {
    let n = ((b - a).norm() / step).ceil().max(1.0) as usize;
    (1..=n).map(|k| a + (b - a) * (k as f64 / n as f64)).collect()
}
