//! Geometric taut-tether model.
//!
//! The tether is a polyline from a fixed anchor to the vehicle. Each update
//! appends the vehicle position and then repeats sweeps of two operations
//! until the length settles:
//!
//! - **shortcutting**: for every node `i`, scanning back from the vehicle
//!   end, the nodes between `i` and the farthest earlier node `j` that is in
//!   line of sight are replaced by a straight segment resampled at the node
//!   spacing;
//! - **pulling**: a node found in collision while scanning is moved one
//!   spacing toward the vehicle end, which drags nodes out of cavities that
//!   shortcutting alone cannot escape.
//!
//! Shortcuts from `i` go to the farthest node of the unbroken run of nodes
//! visible from it. Past the first blocked chord the scan only pulls, and
//! it stops once the segment `j -> j+1` itself is blocked and pulling did
//! not move node `j`.

use std::fmt::Write as _;
use std::io;

use crate::env_map::SdfGrid;
use crate::geom::{path_length, segment_interior};
use crate::{Error, Result, Vec3};

/// Positions closer than this are treated as the same node.
pub const DUPLICATE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetherConfig {
    /// Node spacing of resampled segments (m).
    pub spacing: f64,
    /// Clearance every node and shortcut must keep from obstacles (m).
    pub margin: f64,
    /// Sweeps stop once the length changes by less than this (m).
    pub convergence_tol: f64,
    pub max_sweeps: usize,
}

impl TetherConfig {
    /// Spacing and margin with the default convergence settings: tolerance of
    /// one tenth of the spacing and at most 50 sweeps.
    pub fn new(spacing: f64, margin: f64) -> Self {
        Self {
            spacing,
            margin,
            convergence_tol: spacing / 10.0,
            max_sweeps: 50,
        }
    }
}

/// Ordered tether nodes; node 0 is the anchor, the last node the vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct TetherPath {
    nodes: Vec<Vec3>,
    spacing: f64,
}

impl TetherPath {
    /// Single-node tether sitting at the anchor.
    pub fn new(anchor: Vec3, spacing: f64) -> Self {
        Self {
            nodes: vec![anchor],
            spacing,
        }
    }

    pub fn from_nodes(nodes: Vec<Vec3>, spacing: f64) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidParameter("tether needs at least one node".into()));
        }
        if !(spacing > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tether spacing must be positive, got {spacing}"
            )));
        }
        Ok(Self { nodes, spacing })
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn anchor(&self) -> Vec3 {
        self.nodes[0]
    }

    pub fn end(&self) -> Vec3 {
        *self.nodes.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        compute_length(&self.nodes)
    }

    /// Tether cut at node `index`, which becomes the new end.
    pub fn truncated(&self, index: usize) -> Result<TetherPath> {
        self.check_index(index)?;
        Ok(TetherPath {
            nodes: self.nodes[..=index].to_vec(),
            spacing: self.spacing,
        })
    }

    /// Appends the vehicle position. Gaps wider than the spacing are filled
    /// with evenly spaced samples; a position within
    /// [`DUPLICATE_TOLERANCE`] of the current end is ignored.
    pub fn append_rov(&mut self, p_rov: Vec3) {
        let last = self.end();
        if (p_rov - last).norm() <= DUPLICATE_TOLERANCE {
            return;
        }
        self.nodes.extend(segment_interior(&last, &p_rov, self.spacing));
        self.nodes.push(p_rov);
    }

    /// Whether node `j` is in line of sight of node `i` (`j < i`).
    pub fn check_shortcut(&self, i: usize, j: usize, grid: &SdfGrid, margin: f64) -> Result<bool> {
        self.check_index(i)?;
        if j >= i {
            return Err(Error::InvalidParameter(format!(
                "shortcut requires j < i, got j = {j}, i = {i}"
            )));
        }
        Ok(grid.line_of_sight(&self.nodes[j], &self.nodes[i], margin))
    }

    /// Replaces the nodes strictly between `j` and `i` by samples of the
    /// straight segment between them. Returns the new index of node `i`.
    pub fn replace_nodes(&mut self, i: usize, j: usize) -> Result<usize> {
        self.check_index(i)?;
        if j >= i {
            return Err(Error::InvalidParameter(format!(
                "replace requires j < i, got j = {j}, i = {i}"
            )));
        }
        Ok(replace_span(&mut self.nodes, None, i, j, self.spacing))
    }

    /// CSV with header `node_index,x,y,z`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("node_index,x,y,z\n");
        for (k, p) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "{k},{:.6},{:.6},{:.6}", p.x, p.y, p.z);
        }
        s
    }

    pub fn write_csv(&self, mut w: impl io::Write) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.nodes.len() {
            Err(Error::IndexOutOfRange {
                index,
                len: self.nodes.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// Sum of consecutive node distances.
pub fn compute_length(nodes: &[Vec3]) -> f64 {
    path_length(nodes)
}

/// Moves `node` by at most `step` straight toward `endpoint`.
pub fn pull_node(node: &Vec3, endpoint: &Vec3, step: f64) -> Vec3 {
    let d = endpoint - node;
    let dist = d.norm();
    if dist <= step {
        *endpoint
    } else {
        node + d * (step / dist)
    }
}

fn replace_span(nodes: &mut Vec<Vec3>, flags: Option<&mut Vec<bool>>, i: usize, j: usize, spacing: f64) -> usize {
    if i == j + 1 {
        return i;
    }
    let fill = segment_interior(&nodes[j], &nodes[i], spacing);
    let added = fill.len();
    nodes.splice(j + 1..i, fill);
    if let Some(f) = flags {
        f.splice(j + 1..i, std::iter::repeat(false).take(added));
    }
    j + 1 + added
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateStatus {
    /// Length settled below the convergence tolerance.
    Converged,
    /// Sweep budget exhausted; the path is the last iterate.
    NotConverged,
    /// The vehicle position is inside an obstacle; the previous path is
    /// returned unchanged.
    RejectedInCollision,
}

#[derive(Debug, Clone)]
pub struct TetherUpdate {
    pub path: TetherPath,
    pub status: UpdateStatus,
    pub sweeps: usize,
    /// No node violates the margin.
    pub collision_free: bool,
}

/// The taut-tether model bound to a map.
#[derive(Debug, Clone, Copy)]
pub struct TetherModel<'a> {
    grid: &'a SdfGrid,
    config: TetherConfig,
}

impl<'a> TetherModel<'a> {
    pub fn new(grid: &'a SdfGrid, config: TetherConfig) -> Self {
        Self { grid, config }
    }

    pub fn config(&self) -> &TetherConfig {
        &self.config
    }

    pub fn grid(&self) -> &'a SdfGrid {
        self.grid
    }

    /// Appends `p_rov` and tightens the result.
    pub fn update(&self, path: &TetherPath, p_rov: Vec3) -> TetherUpdate {
        if self.grid.is_in_collision(&p_rov, self.config.margin) {
            return TetherUpdate {
                path: path.clone(),
                status: UpdateStatus::RejectedInCollision,
                sweeps: 0,
                collision_free: self.collision_free(path.nodes()),
            };
        }
        let mut next = path.clone();
        next.spacing = self.config.spacing;
        next.append_rov(p_rov);
        self.tighten(next)
    }

    /// Appends every point of `positions` in order, tightening after each
    /// `every` points and after the last one.
    pub fn update_along(&self, path: &TetherPath, positions: &[Vec3], every: usize) -> TetherUpdate {
        let every = every.max(1);
        let mut current = TetherUpdate {
            path: path.clone(),
            status: UpdateStatus::Converged,
            sweeps: 0,
            collision_free: true,
        };
        for (k, p) in positions.iter().enumerate() {
            current.path.append_rov(*p);
            if (k + 1) % every == 0 || k + 1 == positions.len() {
                current = self.tighten(current.path);
            }
        }
        current
    }

    /// Runs shortcut/pull sweeps until the length settles.
    pub fn tighten(&self, path: TetherPath) -> TetherUpdate {
        let spacing = path.spacing;
        let mut nodes = path.nodes;
        let mut prev = compute_length(&nodes);
        let mut status = UpdateStatus::NotConverged;
        let mut sweeps = 0;
        let mut pulled = Vec::new();
        while sweeps < self.config.max_sweeps {
            pulled.clear();
            pulled.resize(nodes.len(), false);
            self.sweep(&mut nodes, &mut pulled, spacing);
            sweeps += 1;
            let len = compute_length(&nodes);
            let change = (prev - len).abs();
            prev = len;
            // A node still inside the margin gets another pull next sweep.
            if change < self.config.convergence_tol && self.collision_free(&nodes) {
                status = UpdateStatus::Converged;
                break;
            }
        }
        let nodes = bound_gaps(nodes, spacing);
        let collision_free = self.collision_free(&nodes);
        TetherUpdate {
            path: TetherPath { nodes, spacing },
            status,
            sweeps,
            collision_free,
        }
    }

    fn collision_free(&self, nodes: &[Vec3]) -> bool {
        nodes
            .iter()
            .all(|p| !self.grid.is_in_collision(p, self.config.margin))
    }

    fn sweep(&self, nodes: &mut Vec<Vec3>, pulled: &mut Vec<bool>, spacing: f64) {
        let grid = self.grid;
        let margin = self.config.margin;
        let mut i = nodes.len() - 1;
        while i >= 1 {
            let mut farthest = None;
            let end = *nodes.last().unwrap();
            let mut visible_run = true;
            for j in (0..i).rev() {
                // Only the unbroken run of visible nodes behind i is eligible:
                // jumping past a blocked chord would carry the tether through
                // the obstacle that blocked it.
                if visible_run && grid.line_of_sight(&nodes[j], &nodes[i], margin) {
                    farthest = Some(j);
                    continue;
                }
                visible_run = false;
                let mut displaced = false;
                if j > 0 && !pulled[j] && grid.is_in_collision(&nodes[j], margin) {
                    let moved = pull_node(&nodes[j], &end, spacing);
                    displaced = (moved - nodes[j]).norm() > 0.0;
                    nodes[j] = moved;
                    pulled[j] = true;
                }
                if !displaced && !grid.line_of_sight(&nodes[j], &nodes[j + 1], margin) {
                    break;
                }
            }
            if let Some(j) = farthest {
                i = replace_span(nodes, Some(pulled), i, j, spacing);
            }
            i -= 1;
        }
    }
}

/// Splits gaps wider than twice the spacing, which pulling can open up.
fn bound_gaps(nodes: Vec<Vec3>, spacing: f64) -> Vec<Vec3> {
    let limit = 2.0 * spacing;
    if nodes.windows(2).all(|w| (w[1] - w[0]).norm() <= limit) {
        return nodes;
    }
    let mut out = Vec::with_capacity(nodes.len() + 8);
    for (k, p) in nodes.iter().enumerate() {
        if k > 0 && (p - nodes[k - 1]).norm() > limit {
            out.extend(segment_interior(&nodes[k - 1], p, spacing));
        }
        out.push(*p);
    }
    out
}

/// One tether update with default convergence settings.
pub fn update_tether(path: &TetherPath, p_rov: Vec3, grid: &SdfGrid, spacing: f64, margin: f64) -> TetherUpdate {
    TetherModel::new(grid, TetherConfig::new(spacing, margin)).update(path, p_rov)
}
