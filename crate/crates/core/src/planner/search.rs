//! Backward pivot search for a recovery route.
//!
//! Each tether node, from the vehicle end back to the anchor, is a pivot
//! candidate: the vehicle retraces the tether to the pivot, then follows a
//! shortest path to the goal. A pivot is feasible when the tether predicted
//! for that manoeuvre stays within the length limit.

use crate::env_map::SdfGrid;
use crate::shortest_path::{plan_shortest_path, PathQuery};
use crate::tether::{TetherConfig, TetherModel, TetherPath};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub l_max: f64,
    pub tether: TetherConfig,
    /// Intermediate tether predictions are taken every this many path
    /// nodes (about `stride` spacings of travel).
    pub stride: usize,
    pub rrt_step: Option<f64>,
    pub rrt_goal_bias: f64,
    pub rrt_max_iterations: usize,
    pub rrt_improve_iterations: usize,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(l_max: f64, tether: TetherConfig, seed: u64) -> Self {
        Self {
            l_max,
            tether,
            stride: 10,
            rrt_step: None,
            rrt_goal_bias: 0.1,
            rrt_max_iterations: 5000,
            rrt_improve_iterations: 200,
            seed,
        }
    }

    fn query(&self, grid: &SdfGrid, start: Vec3, goal: Vec3, seed: u64) -> PathQuery {
        let mut q = PathQuery::new(grid, start, goal, self.tether.margin, self.tether.spacing, seed);
        if let Some(step) = self.rrt_step {
            q.step = step;
        }
        q.goal_bias = self.rrt_goal_bias;
        q.max_iterations = self.rrt_max_iterations;
        q.improve_iterations = self.rrt_improve_iterations;
        q
    }

    fn pivot_seed(&self, pivot: usize) -> u64 {
        self.seed ^ (pivot as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }
}

/// Prediction for one pivot.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotEvaluation {
    pub pivot_index: usize,
    /// Planned route from the pivot to the goal.
    pub route: Vec<Vec3>,
    /// Predicted tether length with the vehicle at the goal.
    pub predicted_length: f64,
    /// Largest predicted length along the route.
    pub peak_length: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoverySearchResult {
    /// Retraced tether segment followed by the planned route; starts at the
    /// vehicle.
    pub recovery_path: Vec<Vec3>,
    pub pivot_index: usize,
    pub feasible: bool,
    pub predicted_length: f64,
    pub pivots_evaluated: usize,
    /// Pivots whose route planning failed.
    pub skipped: Vec<usize>,
}

/// Plans from tether node `pivot` to `goal` and predicts the resulting tether.
pub fn evaluate_pivot(
    tether: &TetherPath,
    pivot: usize,
    goal: &Vec3,
    grid: &SdfGrid,
    cfg: &SearchConfig,
) -> Result<PivotEvaluation> {
    let prefix = tether.truncated(pivot)?;
    let query = cfg.query(grid, prefix.end(), *goal, cfg.pivot_seed(pivot));
    let route = plan_shortest_path(&query, grid)?;
    let (predicted_length, peak_length) = predict(&prefix, &route, grid, cfg);
    Ok(PivotEvaluation {
        pivot_index: pivot,
        route,
        predicted_length,
        peak_length,
        feasible: peak_length <= cfg.l_max,
    })
}

fn predict(prefix: &TetherPath, route: &[Vec3], grid: &SdfGrid, cfg: &SearchConfig) -> (f64, f64) {
    let model = TetherModel::new(grid, cfg.tether);
    let stride = cfg.stride.max(1);
    let mut path = prefix.clone();
    let rest = route.get(1..).unwrap_or(&[]);
    // The retraced state itself is not counted: it is where recovery starts.
    let mut peak = if rest.is_empty() { path.length() } else { f64::NEG_INFINITY };
    for (k, p) in rest.iter().enumerate() {
        path.append_rov(*p);
        if (k + 1) % stride == 0 || k + 1 == rest.len() {
            path = model.tighten(path).path;
            peak = peak.max(path.length());
        }
    }
    (path.length(), peak)
}

/// Backward search over pivots from the vehicle end to the anchor. Returns
/// the first feasible pivot; otherwise the direct route from the vehicle,
/// flagged infeasible.
pub fn de_entanglement_search(
    tether: &TetherPath,
    goal: &Vec3,
    grid: &SdfGrid,
    cfg: &SearchConfig,
) -> Result<RecoverySearchResult> {
    let last = tether.len() - 1;
    let mut skipped = Vec::new();
    let mut evaluated = 0;
    let mut direct: Option<PivotEvaluation> = None;
    // A taut tether is never shorter than the anchor-goal distance.
    let hopeless = (tether.anchor() - goal).norm() > cfg.l_max;
    if !hopeless {
        for pivot in (0..=last).rev() {
            evaluated += 1;
            match evaluate_pivot(tether, pivot, goal, grid, cfg) {
                Ok(eval) if eval.feasible => {
                    return Ok(assemble(tether, eval, evaluated, skipped));
                }
                Ok(eval) => {
                    if pivot == last {
                        direct = Some(eval);
                    }
                }
                Err(Error::GoalInCollision) => return Err(Error::GoalInCollision),
                Err(e) => {
                    log::debug!("pivot {pivot} skipped: {e}");
                    skipped.push(pivot);
                }
            }
        }
    }
    let direct = match direct {
        Some(d) => d,
        None if skipped.contains(&last) => {
            return Err(Error::NoRecovery("no route from the vehicle to the goal".into()));
        }
        None => {
            evaluated += 1;
            evaluate_pivot(tether, last, goal, grid, cfg)
                .map_err(|e| Error::NoRecovery(format!("no route from the vehicle to the goal: {e}")))?
        }
    };
    let mut result = assemble(tether, direct, evaluated, skipped);
    result.feasible = false;
    Ok(result)
}

fn assemble(tether: &TetherPath, eval: PivotEvaluation, evaluated: usize, skipped: Vec<usize>) -> RecoverySearchResult {
    let nodes = tether.nodes();
    let mut path: Vec<Vec3> = nodes[eval.pivot_index..].iter().rev().copied().collect();
    path.extend(eval.route.iter().skip(1));
    RecoverySearchResult {
        recovery_path: path,
        pivot_index: eval.pivot_index,
        feasible: eval.feasible,
        predicted_length: eval.predicted_length,
        pivots_evaluated: evaluated,
        skipped,
    }
}
