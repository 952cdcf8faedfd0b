//! Entanglement-aware waypoint planner.
//!
//! In normal mode the vehicle heads for the current waypoint. When the
//! tether grows past its limit the planner searches for a recovery route
//! (see [`de_entanglement_search`]), refines it for vehicle clearance and
//! follows it to its end before resuming normal mode.

mod follow;
mod refine;
mod search;

use std::time::{Duration, Instant};

use crate::env_map::SdfGrid;
use crate::tether::TetherPath;
use crate::{Error, Result, Vec3};

pub use follow::{follow_path, reached_waypoint, PathFollower};
pub use refine::{refine_recovery_path, refine_with, smooth_cubic, RefineConfig};
pub use search::{de_entanglement_search, evaluate_pivot, PivotEvaluation, RecoverySearchResult, SearchConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Mission {
    pub waypoints: Vec<Vec3>,
    pub l_max: f64,
    pub reach_radius: f64,
}

impl Mission {
    pub fn new(waypoints: Vec<Vec3>, l_max: f64, reach_radius: f64) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::InvalidParameter("mission needs at least one waypoint".into()));
        }
        if !(l_max > 0.0) || !(reach_radius > 0.0) {
            return Err(Error::InvalidParameter("l_max and reach_radius must be positive".into()));
        }
        Ok(Self {
            waypoints,
            l_max,
            reach_radius,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Normal,
    Recovery,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Normal => "NORMAL",
            Mode::Recovery => "RECOVERY",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub search: SearchConfig,
    pub refine: RefineConfig,
    /// Clearance the vehicle keeps from obstacles (m).
    pub vehicle_margin: f64,
    pub lookahead: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerState {
    pub mode: Mode,
    /// Index of the current waypoint; equals the waypoint count when done.
    pub k: usize,
    pub recovery: PathFollower,
    /// Set when the last search found no feasible pivot; cleared when the
    /// waypoint index advances.
    pub soft_limit_active: bool,
    searches: u64,
}

impl Default for PlannerState {
    fn default() -> Self {
        Self {
            mode: Mode::Normal,
            k: 0,
            recovery: PathFollower::default(),
            soft_limit_active: false,
            searches: 0,
        }
    }
}

/// Summary of a recovery search triggered during a step.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub pivot_index: usize,
    pub feasible: bool,
    pub predicted_length: f64,
    pub pivots_evaluated: usize,
    pub latency: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub target: Vec3,
    /// Every waypoint has been reached; the target holds position.
    pub complete: bool,
    pub search: Option<SearchReport>,
}

#[derive(Debug, Clone)]
pub struct Planner {
    pub config: PlannerConfig,
    pub state: PlannerState,
}

impl Planner {
    pub fn new(config: PlannerConfig) -> Self {
        Self {
            config,
            state: PlannerState::default(),
        }
    }

    /// One control tick: returns the position the vehicle should head for.
    pub fn step(&mut self, mission: &Mission, tether: &TetherPath, p_rov: &Vec3, grid: &SdfGrid) -> Result<StepOutput> {
        let m = mission.waypoints.len();
        if self.state.k >= m {
            return Ok(StepOutput {
                target: *p_rov,
                complete: true,
                search: None,
            });
        }
        match self.state.mode {
            Mode::Normal => {
                let goal = mission.waypoints[self.state.k];
                if tether.length() > mission.l_max && !self.state.soft_limit_active {
                    let report = self.begin_recovery(tether, &goal, mission.l_max, grid)?;
                    let target = self.state.recovery.target(p_rov, self.config.lookahead);
                    return Ok(StepOutput {
                        target,
                        complete: false,
                        search: Some(report),
                    });
                }
                if reached_waypoint(p_rov, &goal, mission.reach_radius) {
                    self.state.k += 1;
                    self.state.soft_limit_active = false;
                    if self.state.k >= m {
                        return Ok(StepOutput {
                            target: *p_rov,
                            complete: true,
                            search: None,
                        });
                    }
                }
                Ok(StepOutput {
                    target: mission.waypoints[self.state.k],
                    complete: false,
                    search: None,
                })
            }
            Mode::Recovery => {
                let end = self.state.recovery.end().unwrap_or(*p_rov);
                if reached_waypoint(p_rov, &end, mission.reach_radius) {
                    self.state.mode = Mode::Normal;
                    self.state.recovery = PathFollower::default();
                    return Ok(StepOutput {
                        target: mission.waypoints[self.state.k],
                        complete: false,
                        search: None,
                    });
                }
                let target = self.state.recovery.target(p_rov, self.config.lookahead);
                Ok(StepOutput {
                    target,
                    complete: false,
                    search: None,
                })
            }
        }
    }

    /// Searches a recovery route toward `goal`, refines it and switches to
    /// recovery mode.
    pub fn begin_recovery(&mut self, tether: &TetherPath, goal: &Vec3, l_max: f64, grid: &SdfGrid) -> Result<SearchReport> {
        let started = Instant::now();
        let mut cfg = self.config.search;
        cfg.l_max = l_max;
        cfg.seed = mix_seed(cfg.seed, self.state.searches);
        self.state.searches += 1;
        let found = de_entanglement_search(tether, goal, grid, &cfg)?;
        let refine_cfg = RefineConfig {
            seed: cfg.seed,
            ..self.config.refine
        };
        let path = match refine_with(&found.recovery_path, grid, self.config.vehicle_margin, &refine_cfg) {
            Ok(p) => p,
            Err(Error::RefinementFailed { best_effort }) => {
                log::warn!("recovery path refinement did not clear the vehicle margin");
                best_effort
            }
            Err(e) => return Err(e),
        };
        self.state.mode = Mode::Recovery;
        self.state.recovery = PathFollower::new(path);
        if !found.feasible {
            self.state.soft_limit_active = true;
        }
        Ok(SearchReport {
            pivot_index: found.pivot_index,
            feasible: found.feasible,
            predicted_length: found.predicted_length,
            pivots_evaluated: found.pivots_evaluated,
            latency: started.elapsed(),
        })
    }
}

fn mix_seed(seed: u64, n: u64) -> u64 {
    seed.wrapping_add(n.wrapping_mul(0xD1B5_4A32_D192_ED03)).rotate_left(17)
}
