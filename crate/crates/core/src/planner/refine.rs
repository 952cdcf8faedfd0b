//! Recovery path refinement for vehicle clearance.
//!
//! Candidate paths are planned at tether clearance, which is tighter than the
//! vehicle needs. Each round pushes interior points away from the path
//! centroid, re-samples points still too close to obstacles and smooths with
//! local cubic fits. Rounds repeat until the path is collision-free.

use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env_map::SdfGrid;
use crate::shortest_path::path_is_collision_free;
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineConfig {
    /// Centroid offset per round as a multiple of the margin.
    pub offset_gain: f64,
    pub perturbation_samples: usize,
    /// Node count of each smoothing window.
    pub window: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            offset_gain: 1.0,
            perturbation_samples: 20,
            window: 8,
            max_iterations: 25,
            seed: 0,
        }
    }
}

/// Refines with the default configuration.
pub fn refine_recovery_path(path: &[Vec3], grid: &SdfGrid, margin: f64, rng_seed: u64) -> Result<Vec<Vec3>> {
    refine_with(
        path,
        grid,
        margin,
        &RefineConfig {
            seed: rng_seed,
            ..RefineConfig::default()
        },
    )
}

pub fn refine_with(path: &[Vec3], grid: &SdfGrid, margin: f64, cfg: &RefineConfig) -> Result<Vec<Vec3>> {
    if path.is_empty() {
        return Err(Error::InvalidParameter("cannot refine an empty path".into()));
    }
    if path.len() <= 2 {
        return Ok(path.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut current = path.to_vec();
    for _ in 0..cfg.max_iterations {
        offset_from_centroid(&mut current, grid, margin, cfg.offset_gain * margin);
        perturb_violations(&mut current, grid, margin, cfg.perturbation_samples, &mut rng);
        current = smooth_cubic(&current, cfg.window);
        if path_is_collision_free(grid, &current, margin) {
            return Ok(current);
        }
    }
    if path_is_collision_free(grid, path, margin) {
        Ok(path.to_vec())
    } else {
        Err(Error::RefinementFailed { best_effort: current })
    }
}

/// Pushes interior points away from the path centroid. A push that would
/// leave a point inside the margin and closer to an obstacle than before is
/// skipped, so points near a floor or wall are not driven into it.
fn offset_from_centroid(path: &mut [Vec3], grid: &SdfGrid, margin: f64, amount: f64) {
    let centroid = path.iter().sum::<Vec3>() / path.len() as f64;
    let last = path.len() - 1;
    for p in &mut path[1..last] {
        let d = *p - centroid;
        let n = d.norm();
        if n > 0.0 {
            let moved = *p + d * (amount / n);
            let after = grid.distance_at(&moved);
            if after >= margin || after >= grid.distance_at(p) {
                *p = moved;
            }
        }
    }
}

fn perturb_violations(path: &mut [Vec3], grid: &SdfGrid, margin: f64, samples: usize, rng: &mut ChaCha8Rng) {
    let last = path.len() - 1;
    for p in &mut path[1..last] {
        let mut best_d = grid.distance_at(p);
        if best_d >= margin {
            continue;
        }
        let mut best = *p;
        for _ in 0..samples {
            let dir = random_unit(rng);
            let r = rng.gen_range(0.0..=2.0 * margin);
            let cand = *p + dir * r;
            let d = grid.distance_at(&cand);
            if d > best_d {
                best_d = d;
                best = cand;
                if d >= margin {
                    break;
                }
            }
        }
        *p = best;
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-6 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Replaces each interior point by the value of a least-squares cubic (per
/// coordinate, over chord-length parameter) fitted to the `window` nodes
/// around it. Endpoints are kept.
pub fn smooth_cubic(path: &[Vec3], window: usize) -> Vec<Vec3> {
    let n = path.len();
    if n <= 2 || window < 2 {
        return path.to_vec();
    }
    let mut s = Vec::with_capacity(n);
    let mut acc = 0.0;
    s.push(0.0);
    for w in path.windows(2) {
        acc += (w[1] - w[0]).norm();
        s.push(acc);
    }
    let w = window.min(n);
    let mut out = path.to_vec();
    for i in 1..n - 1 {
        let lo = i.saturating_sub(w / 2).min(n - w);
        let pts = &path[lo..lo + w];
        let ts = &s[lo..lo + w];
        if let Some(p) = fit_eval(pts, ts, s[i]) {
            out[i] = p;
        }
    }
    out
}

fn fit_eval(pts: &[Vec3], ts: &[f64], t: f64) -> Option<Vec3> {
    let degree = (pts.len() - 1).min(3);
    let center = ts.iter().sum::<f64>() / ts.len() as f64;
    let scale = ts
        .iter()
        .map(|x| (x - center).abs())
        .fold(0.0, f64::max);
    if !(scale > 0.0) {
        return None;
    }
    let basis = |x: f64| {
        let u = (x - center) / scale;
        let mut b = Vector4::zeros();
        let mut pw = 1.0;
        for k in 0..=degree {
            b[k] = pw;
            pw *= u;
        }
        b
    };
    let mut ata = Matrix4::zeros();
    let mut atb = [Vector4::zeros(); 3];
    for (p, &x) in pts.iter().zip(ts) {
        let b = basis(x);
        ata += b * b.transpose();
        for c in 0..3 {
            atb[c] += b * p[c];
        }
    }
    // Unused higher powers get an identity row so the system stays regular.
    for k in degree + 1..4 {
        ata[(k, k)] = 1.0;
    }
    let chol = ata.cholesky()?;
    let bt = basis(t);
    let mut out = Vec3::zeros();
    for c in 0..3 {
        out[c] = chol.solve(&atb[c]).dot(&bt);
    }
    Some(out)
}
