use std::time::Duration;

use crate::coverage::CoverageTracker;
use crate::env_map::SdfGrid;
use crate::geom::path_length;
use crate::planner::{
    reached_waypoint, refine_with, Mission, Mode, PathFollower, Planner, PlannerConfig, RefineConfig, SearchConfig,
};
use crate::shortest_path::{plan_shortest_path, PathQuery};
use crate::tether::{TetherConfig, TetherModel, TetherPath, UpdateStatus};
use crate::{Error, Result, Vec3};

use super::scenario::{PlannerKind, Scenario, World};
use super::vehicle::{step_vehicle, VehicleState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Inspection,
    Return,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Inspection => "INSPECTION",
            Phase::Return => "RETURN",
        }
    }
}

/// State after one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct MissionRow {
    pub tick: usize,
    pub time: f64,
    pub phase: Phase,
    pub position: Vec3,
    pub yaw: f64,
    pub target: Vec3,
    pub tether_length: f64,
    pub tether_nodes: usize,
    pub mode: Mode,
    /// Current waypoint index.
    pub waypoint: usize,
    pub coverage: f64,
    pub soft_limit: bool,
    /// Pivots evaluated by a recovery search started this tick, else 0.
    pub search_pivots: usize,
    pub tether_status: UpdateStatus,
}

/// A recovery search, with its wall-clock latency.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchEvent {
    pub tick: usize,
    pub time: f64,
    pub phase: Phase,
    pub pivot_index: usize,
    pub feasible: bool,
    pub predicted_length: f64,
    pub pivots_evaluated: usize,
    pub latency: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionSummary {
    pub planner: PlannerKind,
    /// Time the last waypoint was reached; `None` if it never was.
    pub inspection_time: Option<f64>,
    /// Duration of the return to the start.
    pub recovery_time: Option<f64>,
    pub total_time: f64,
    pub final_coverage: f64,
    pub max_tether_length: f64,
    pub exceedance_duration: f64,
    pub aborted: bool,
    pub abort_reason: Option<String>,
    /// Tether length when inspection ended.
    pub final_tether_length: f64,
    /// Straight-line anchor distance of the vehicle when inspection ended.
    pub straight_distance: f64,
    pub searches: usize,
    pub max_search_latency: Duration,
}

#[derive(Debug, Clone)]
pub struct MissionLog {
    pub rows: Vec<MissionRow>,
    pub events: Vec<SearchEvent>,
    pub summary: MissionSummary,
    /// Tether when inspection ended (or at abort).
    pub final_tether: TetherPath,
    pub l_max: f64,
    pub dt: f64,
}

/// Loads the scenario's world and runs it.
pub fn run_mission(scenario: &Scenario) -> Result<MissionLog> {
    let world = scenario.build()?;
    run_mission_in(scenario, &world)
}

/// Runs a mission in an already built world. Aborted missions are returned
/// as logs with `summary.aborted` set.
pub fn run_mission_in(scenario: &Scenario, world: &World) -> Result<MissionLog> {
    let grid = &world.grid;
    let tether_cfg = TetherConfig::new(scenario.spacing, scenario.tether_margin);
    let model = TetherModel::new(grid, tether_cfg);
    let mission = Mission::new(world.waypoints.clone(), scenario.l_max, scenario.reach_radius)?;
    let planner_cfg = planner_config(scenario, tether_cfg);

    let mut tether = model.update(&TetherPath::new(scenario.anchor, scenario.spacing), scenario.start).path;
    let mut vehicle = VehicleState {
        position: scenario.start,
        yaw: 0.0,
        max_speed: scenario.max_speed,
        max_yaw_rate: scenario.max_yaw_rate,
    };
    if let Some((cx, cy)) = scenario.look_at_axis {
        vehicle.yaw = (cy - vehicle.position.y).atan2(cx - vehicle.position.x);
    }
    let mut coverage = CoverageTracker::new(world.mesh.clone());
    coverage.update_and_ratio(&vehicle.position, &vehicle.heading(), &scenario.camera);

    let mut planner = Planner::new(planner_cfg.clone());
    let mut baseline_k = 0usize;
    let mut phase = Phase::Inspection;
    let mut ret = Return::None;
    let mut rows = Vec::new();
    let mut events = Vec::new();
    let mut inspection_time = None;
    let mut final_tether = None;
    let mut abort_reason = None;
    let mut done = false;
    let max_ticks = (scenario.max_time / scenario.dt).ceil() as usize;

    for tick in 0..max_ticks {
        let now = tick as f64 * scenario.dt;
        let up = model.update(&tether, vehicle.position);
        tether = up.path;
        let pos = vehicle.position;
        let mut search_pivots = 0usize;
        let mut record = |report: &crate::planner::SearchReport, phase: Phase, events: &mut Vec<SearchEvent>| {
            search_pivots += report.pivots_evaluated;
            events.push(SearchEvent {
                tick,
                time: now,
                phase,
                pivot_index: report.pivot_index,
                feasible: report.feasible,
                predicted_length: report.predicted_length,
                pivots_evaluated: report.pivots_evaluated,
                latency: report.latency,
            });
        };

        let mut target = pos;
        if phase == Phase::Inspection {
            let complete = match scenario.planner {
                PlannerKind::React => match planner.step(&mission, &tether, &pos, grid) {
                    Ok(out) => {
                        if let Some(r) = &out.search {
                            record(r, phase, &mut events);
                        }
                        target = out.target;
                        out.complete
                    }
                    Err(e) => {
                        abort_reason = Some(format!("planner failed: {e}"));
                        break;
                    }
                },
                PlannerKind::Baseline => {
                    if reached_waypoint(&pos, &mission.waypoints[baseline_k], mission.reach_radius) {
                        baseline_k += 1;
                    }
                    if baseline_k < mission.waypoints.len() {
                        target = mission.waypoints[baseline_k];
                        false
                    } else {
                        true
                    }
                }
            };
            if complete {
                inspection_time = Some(now);
                final_tether = Some(tether.clone());
                phase = Phase::Return;
                ret = match scenario.planner {
                    PlannerKind::React => {
                        let mut p = Planner::new(planner_cfg.clone());
                        match p.begin_recovery(&tether, &scenario.start, scenario.l_max, grid) {
                            Ok(r) => record(&r, phase, &mut events),
                            Err(e) => {
                                abort_reason = Some(format!("no return route: {e}"));
                                break;
                            }
                        }
                        Return::React(Box::new(p))
                    }
                    PlannerKind::Baseline => {
                        Return::Retrace(retrace_path(&tether, &scenario.start, grid, scenario, &planner_cfg.refine))
                    }
                };
            }
        }
        if phase == Phase::Return {
            let home = Mission::new(vec![scenario.start], scenario.l_max, scenario.reach_radius)?;
            match &mut ret {
                Return::React(p) => match p.step(&home, &tether, &pos, grid) {
                    Ok(out) => {
                        if let Some(r) = &out.search {
                            record(r, phase, &mut events);
                        }
                        target = out.target;
                        done = out.complete;
                    }
                    Err(e) => {
                        abort_reason = Some(format!("return planner failed: {e}"));
                        break;
                    }
                },
                Return::Retrace(f) => {
                    let end = f.end().unwrap_or(scenario.start);
                    if reached_waypoint(&pos, &end, scenario.reach_radius) {
                        done = true;
                    } else {
                        target = f.target(&pos, scenario.lookahead);
                    }
                }
                Return::None => unreachable!("return phase without a return plan"),
            }
            if done {
                break;
            }
        }

        let look_at = match scenario.look_at_axis {
            Some((cx, cy)) => Vec3::new(cx, cy, pos.z),
            None => target,
        };
        let mut next = step_vehicle(&vehicle, &target, &look_at, scenario.dt);
        // Contact: the vehicle cannot enter the obstacle band the tether keeps clear of.
        if grid.is_in_collision(&next.position, scenario.tether_margin) {
            next.position = vehicle.position;
        }
        vehicle = next;
        let cov = coverage.update_and_ratio(&vehicle.position, &vehicle.heading(), &scenario.camera);

        let (mode, waypoint, soft_limit) = match (&ret, scenario.planner) {
            (Return::React(p), _) => (p.state.mode, mission.waypoints.len(), p.state.soft_limit_active),
            (_, PlannerKind::React) => (planner.state.mode, planner.state.k, planner.state.soft_limit_active),
            (_, PlannerKind::Baseline) => (Mode::Normal, baseline_k, false),
        };
        rows.push(MissionRow {
            tick,
            time: (tick + 1) as f64 * scenario.dt,
            phase,
            position: vehicle.position,
            yaw: vehicle.yaw,
            target,
            tether_length: tether.length(),
            tether_nodes: tether.len(),
            mode,
            waypoint,
            coverage: cov,
            soft_limit,
            search_pivots,
            tether_status: up.status,
        });
    }
    if !done && abort_reason.is_none() {
        abort_reason = Some(format!("time budget of {} s exhausted", scenario.max_time));
    }

    let total_time = rows.last().map_or(0.0, |r| r.time);
    let final_tether = final_tether.unwrap_or_else(|| tether.clone());
    let exceed = rows.iter().filter(|r| r.tether_length > scenario.l_max).count();
    let summary = MissionSummary {
        planner: scenario.planner,
        inspection_time,
        recovery_time: if done { inspection_time.map(|t| total_time - t) } else { None },
        total_time,
        final_coverage: rows.last().map_or(coverage.ratio(), |r| r.coverage),
        max_tether_length: rows.iter().map(|r| r.tether_length).fold(0.0, f64::max),
        exceedance_duration: exceed as f64 * scenario.dt,
        aborted: !done,
        abort_reason,
        final_tether_length: final_tether.length(),
        straight_distance: (final_tether.end() - final_tether.anchor()).norm(),
        searches: events.len(),
        max_search_latency: events.iter().map(|e| e.latency).max().unwrap_or_default(),
    };
    Ok(MissionLog {
        rows,
        events,
        summary,
        final_tether,
        l_max: scenario.l_max,
        dt: scenario.dt,
    })
}

enum Return {
    None,
    React(Box<Planner>),
    Retrace(PathFollower),
}

pub fn planner_config(scenario: &Scenario, tether: TetherConfig) -> PlannerConfig {
    let mut search = SearchConfig::new(scenario.l_max, tether, scenario.seed);
    search.stride = scenario.feasibility_stride;
    search.rrt_step = scenario.rrt_step;
    search.rrt_goal_bias = scenario.rrt_goal_bias;
    search.rrt_max_iterations = scenario.rrt_max_iterations;
    search.rrt_improve_iterations = scenario.rrt_improve_iterations;
    PlannerConfig {
        search,
        refine: scenario.refine,
        vehicle_margin: scenario.vehicle_margin,
        lookahead: scenario.lookahead,
    }
}

/// Baseline return: follow the tether back to the last node before which it
/// runs straight from the anchor, then take a shortest path to `home`.
fn retrace_path(tether: &TetherPath, home: &Vec3, grid: &SdfGrid, scenario: &Scenario, refine: &RefineConfig) -> PathFollower {
    let nodes = tether.nodes();
    let anchor = nodes[0];
    let mut acc = 0.0;
    let mut straight_until = 0;
    for i in 1..nodes.len() {
        acc += (nodes[i] - nodes[i - 1]).norm();
        if acc <= (nodes[i] - anchor).norm() + 0.1 * scenario.spacing {
            straight_until = i;
        }
    }
    let mut path: Vec<Vec3> = nodes[straight_until..].iter().rev().copied().collect();
    let from = nodes[straight_until];
    let query = PathQuery::new(grid, from, *home, scenario.tether_margin, scenario.spacing, scenario.seed);
    match plan_shortest_path(&query, grid) {
        Ok(route) => path.extend(route.into_iter().skip(1)),
        Err(e) => {
            log::warn!("baseline return: no route from the unwound tether to the start ({e})");
            path.push(*home);
        }
    }
    let refine = RefineConfig {
        seed: scenario.seed,
        ..*refine
    };
    let path = match refine_with(&path, grid, scenario.vehicle_margin, &refine) {
        Ok(p) => p,
        Err(Error::RefinementFailed { best_effort }) => best_effort,
        Err(_) => path,
    };
    log::debug!("baseline return path {:.2} m", path_length(&path));
    PathFollower::new(path)
}
