//! Collision-free shortest paths over the distance map.
//!
//! RRT* grows a tree from the start; every new node that sees the goal is a
//! candidate parent for it. Once the goal is connected the search runs a
//! bounded number of extra iterations so rewiring can improve the tree, then
//! the path is shortcut greedily and densified to the tether spacing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env_map::SdfGrid;
use crate::geom::{densify, Aabb};
use crate::{Error, Result, Vec3};

pub use crate::geom::path_length;

#[derive(Debug, Clone, PartialEq)]
pub struct PathQuery {
    pub start: Vec3,
    pub goal: Vec3,
    pub margin: f64,
    /// Box that random samples are drawn from.
    pub bounds: Aabb,
    pub max_iterations: usize,
    /// Extension length (m).
    pub step: f64,
    pub goal_bias: f64,
    pub rng_seed: u64,
    /// Spacing of the returned path (m).
    pub spacing: f64,
    /// Iterations kept running after the goal is first connected.
    pub improve_iterations: usize,
}

impl PathQuery {
    /// Query with the default parameters for `grid`: step of five voxels,
    /// goal bias 0.1, 5000 iterations and sampling over the map bounds
    /// inflated by the margin.
    pub fn new(grid: &SdfGrid, start: Vec3, goal: Vec3, margin: f64, spacing: f64, rng_seed: u64) -> Self {
        Self {
            start,
            goal,
            margin,
            bounds: grid.bounds().inflated(margin),
            max_iterations: 5000,
            step: 5.0 * grid.resolution(),
            goal_bias: 0.1,
            rng_seed,
            spacing,
            improve_iterations: 200,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !(self.spacing > 0.0) {
            return Err(Error::InvalidParameter("step and spacing must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return Err(Error::InvalidParameter(format!(
                "goal_bias must be in [0, 1], got {}",
                self.goal_bias
            )));
        }
        if self.bounds.is_degenerate() {
            return Err(Error::InvalidParameter("sampling box is degenerate".into()));
        }
        Ok(())
    }
}

/// Result of a successful query.
#[derive(Debug, Clone, PartialEq)]
pub struct PlannedPath {
    pub points: Vec<Vec3>,
    /// Length of the tree path before shortcutting.
    pub raw_length: f64,
    pub iterations: usize,
}

/// Plans a path and returns its points.
pub fn plan_shortest_path(query: &PathQuery, grid: &SdfGrid) -> Result<Vec<Vec3>> {
    plan(query, grid).map(|p| p.points)
}

pub fn plan(query: &PathQuery, grid: &SdfGrid) -> Result<PlannedPath> {
    query.validate()?;
    let (start, goal, margin) = (query.start, query.goal, query.margin);
    if grid.is_in_collision(&start, margin) {
        return Err(Error::StartInCollision);
    }
    if grid.is_in_collision(&goal, margin) {
        return Err(Error::GoalInCollision);
    }
    if (goal - start).norm() == 0.0 {
        return Ok(PlannedPath {
            points: vec![start],
            raw_length: 0.0,
            iterations: 0,
        });
    }
    if grid.line_of_sight(&start, &goal, margin) {
        let raw = vec![start, goal];
        return Ok(PlannedPath {
            raw_length: path_length(&raw),
            points: densify(&raw, query.spacing),
            iterations: 0,
        });
    }

    let mut tree = Tree::new(start);
    let mut rng = ChaCha8Rng::seed_from_u64(query.rng_seed);
    let gamma = 2.0 * query.step;
    let (lo, hi) = (query.bounds.min, query.bounds.max);
    let mut seen_goal: Vec<usize> = Vec::new();
    let mut deadline = query.max_iterations;
    let mut iterations = 0;
    let mut near = Vec::new();

    while iterations < deadline {
        iterations += 1;
        let sample = if rng.gen::<f64>() < query.goal_bias {
            goal
        } else {
            Vec3::new(
                rng.gen_range(lo.x..hi.x),
                rng.gen_range(lo.y..hi.y),
                rng.gen_range(lo.z..hi.z),
            )
        };
        let nearest = tree.nearest(&sample);
        let from = tree.points[nearest];
        let d = sample - from;
        let dist = d.norm();
        if dist == 0.0 {
            continue;
        }
        let new = if dist > query.step { from + d * (query.step / dist) } else { sample };
        if !grid.line_of_sight(&from, &new, margin) {
            continue;
        }

        let n = tree.points.len() as f64 + 1.0;
        let radius = gamma * (n.ln() / n).cbrt();
        tree.within(&new, radius, &mut near);

        let mut parent = nearest;
        let mut cost = tree.cost[nearest] + (new - from).norm();
        for &c in &near {
            if c == nearest {
                continue;
            }
            let cand = tree.cost[c] + (new - tree.points[c]).norm();
            if cand < cost && grid.line_of_sight(&tree.points[c], &new, margin) {
                parent = c;
                cost = cand;
            }
        }
        let id = tree.push(new, parent, cost);

        for &c in &near {
            if c == parent {
                continue;
            }
            let cand = cost + (tree.points[c] - new).norm();
            if cand + 1e-12 < tree.cost[c] && grid.line_of_sight(&new, &tree.points[c], margin) {
                tree.reparent(c, id, cand);
            }
        }

        if grid.line_of_sight(&new, &goal, margin) {
            if seen_goal.is_empty() {
                deadline = deadline.min(iterations + query.improve_iterations);
            }
            seen_goal.push(id);
        }
    }

    if seen_goal.is_empty() {
        return Err(Error::Unreachable { iterations });
    }
    // Costs may have dropped through rewiring since each node first saw the goal.
    let best = seen_goal
        .iter()
        .copied()
        .min_by(|&a, &b| {
            let ca = tree.cost[a] + (goal - tree.points[a]).norm();
            let cb = tree.cost[b] + (goal - tree.points[b]).norm();
            ca.total_cmp(&cb)
        })
        .unwrap();
    let mut raw = vec![goal];
    let mut at = Some(best);
    while let Some(i) = at {
        raw.push(tree.points[i]);
        at = tree.parent[i];
    }
    raw.reverse();
    let raw_length = path_length(&raw);
    let simplified = shortcut_path(grid, &raw, margin);
    Ok(PlannedPath {
        points: densify(&simplified, query.spacing),
        raw_length,
        iterations,
    })
}

/// Greedy line-of-sight simplification: from each kept vertex jump to the
/// farthest later vertex it can see.
pub fn shortcut_path(grid: &SdfGrid, path: &[Vec3], margin: f64) -> Vec<Vec3> {
    if path.len() <= 2 {
        return path.to_vec();
    }
    let mut out = vec![path[0]];
    let mut i = 0;
    while i + 1 < path.len() {
        let mut next = i + 1;
        for j in (i + 2..path.len()).rev() {
            if grid.line_of_sight(&path[i], &path[j], margin) {
                next = j;
                break;
            }
        }
        out.push(path[next]);
        i = next;
    }
    out
}

/// True when every vertex and every edge of `path` clears `margin`.
pub fn path_is_collision_free(grid: &SdfGrid, path: &[Vec3], margin: f64) -> bool {
    match path {
        [] => true,
        [p] => !grid.is_in_collision(p, margin),
        _ => path.windows(2).all(|w| grid.line_of_sight(&w[0], &w[1], margin)),
    }
}

struct Tree {
    points: Vec<Vec3>,
    parent: Vec<Option<usize>>,
    cost: Vec<f64>,
    children: Vec<Vec<usize>>,
}

impl Tree {
    fn new(root: Vec3) -> Self {
        Self {
            points: vec![root],
            parent: vec![None],
            cost: vec![0.0],
            children: vec![Vec::new()],
        }
    }

    fn push(&mut self, p: Vec3, parent: usize, cost: f64) -> usize {
        let id = self.points.len();
        self.points.push(p);
        self.parent.push(Some(parent));
        self.cost.push(cost);
        self.children.push(Vec::new());
        self.children[parent].push(id);
        id
    }

    fn nearest(&self, p: &Vec3) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, q) in self.points.iter().enumerate() {
            let d = (q - p).norm_squared();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    fn within(&self, p: &Vec3, radius: f64, out: &mut Vec<usize>) {
        out.clear();
        let r2 = radius * radius;
        out.extend(
            self.points
                .iter()
                .enumerate()
                .filter(|(_, q)| (*q - p).norm_squared() <= r2)
                .map(|(i, _)| i),
        );
    }

    fn reparent(&mut self, node: usize, new_parent: usize, new_cost: f64) {
        if let Some(old) = self.parent[node] {
            self.children[old].retain(|&c| c != node);
        }
        self.parent[node] = Some(new_parent);
        self.children[new_parent].push(node);
        let delta = self.cost[node] - new_cost;
        let mut stack = vec![node];
        self.cost[node] = new_cost;
        while let Some(n) = stack.pop() {
            for k in 0..self.children[n].len() {
                let c = self.children[n][k];
                self.cost[c] -= delta;
                stack.push(c);
            }
        }
    }
}
