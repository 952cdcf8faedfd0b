//! CSV output.
//!
//! `mission.csv` holds only simulated quantities, so reruns with the same
//! seed are byte-identical. Wall-clock search latencies go to `events.csv`
//! and the summary.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::{Error, Result};

use super::mission::{MissionLog, MissionSummary};

pub const MISSION_HEADER: &str = "tick,time,phase,x,y,z,yaw,target_x,target_y,target_z,\
tether_length,tether_nodes,mode,waypoint,coverage,soft_limit,search_pivots,tether_status";

pub const SUMMARY_HEADER: &str = "planner,inspection_time,recovery_time,total_time,final_coverage,\
max_tether_length,exceedance_duration,final_tether_length,straight_distance,searches,\
max_search_latency_ms,aborted,abort_reason";

pub const EVENTS_HEADER: &str = "tick,time,phase,pivot_index,feasible,predicted_length,pivots_evaluated,latency_ms";

pub fn mission_csv(log: &MissionLog) -> String {
    let mut s = String::with_capacity(64 + 160 * log.rows.len());
    s.push_str(MISSION_HEADER);
    s.push('\n');
    for r in &log.rows {
        let _ = writeln!(
            s,
            "{},{:.3},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{},{},{},{:.6},{},{},{:?}",
            r.tick,
            r.time,
            r.phase.as_str(),
            r.position.x,
            r.position.y,
            r.position.z,
            r.yaw,
            r.target.x,
            r.target.y,
            r.target.z,
            r.tether_length,
            r.tether_nodes,
            r.mode.as_str(),
            r.waypoint,
            r.coverage,
            r.soft_limit as u8,
            r.search_pivots,
            r.tether_status,
        );
    }
    s
}

pub fn summary_row(m: &MissionSummary) -> String {
    let opt = |v: Option<f64>| v.map(|t| format!("{t:.3}")).unwrap_or_default();
    format!(
        "{},{},{},{:.3},{:.6},{:.6},{:.3},{:.6},{:.6},{},{:.3},{},{}",
        m.planner.as_str(),
        opt(m.inspection_time),
        opt(m.recovery_time),
        m.total_time,
        m.final_coverage,
        m.max_tether_length,
        m.exceedance_duration,
        m.final_tether_length,
        m.straight_distance,
        m.searches,
        m.max_search_latency.as_secs_f64() * 1e3,
        m.aborted as u8,
        m.abort_reason.as_deref().unwrap_or("").replace(',', ";"),
    )
}

pub fn events_csv(log: &MissionLog) -> String {
    let mut s = String::from(EVENTS_HEADER);
    s.push('\n');
    for e in &log.events {
        let _ = writeln!(
            s,
            "{},{:.3},{},{},{},{:.6},{},{:.3}",
            e.tick,
            e.time,
            e.phase.as_str(),
            e.pivot_index,
            e.feasible as u8,
            e.predicted_length,
            e.pivots_evaluated,
            e.latency.as_secs_f64() * 1e3
        );
    }
    s
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))
}

/// Writes `mission.csv`, `summary.csv`, `tether_final.csv` and `events.csv`
/// into `dir`, creating it if needed.
pub fn write_log(log: &MissionLog, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(dir, "mission.csv", &mission_csv(log))?;
    write(dir, "summary.csv", &format!("{SUMMARY_HEADER}\n{}\n", summary_row(&log.summary)))?;
    write(dir, "tether_final.csv", &log.final_tether.to_csv())?;
    write(dir, "events.csv", &events_csv(log))
}

/// Writes each log into `dir/<planner>/` and a joint `dir/summary.csv`.
pub fn write_comparison(logs: &[MissionLog], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    let mut joint = format!("{SUMMARY_HEADER}\n");
    for log in logs {
        write_log(log, dir.join(log.summary.planner.as_str()))?;
        joint.push_str(&summary_row(&log.summary));
        joint.push('\n');
    }
    write(dir, "summary.csv", &joint)
}
