//! Mission simulation: scenario loading, a kinematic vehicle, the control
//! loop for both planners and CSV logging.

mod log;
mod mission;
mod scenario;
mod vehicle;

pub use self::log::{write_comparison, write_log};
pub use mission::{planner_config, run_mission, run_mission_in, MissionLog, MissionRow, MissionSummary, Phase, SearchEvent};
pub use scenario::{Helix, MeshSource, PlannerKind, Scenario, WaypointSource, World};
pub use vehicle::{step_vehicle, wrap_angle, VehicleState};
