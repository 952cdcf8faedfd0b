//! Scenario files.
//!
//! Plain text, one `key = value` per line, `#` starts a comment. Vectors are
//! whitespace separated. Relative file paths resolve against the scenario
//! file's directory. See the README for the full key list.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::coverage::CameraModel;
use crate::env_map::{cylinder_mesh, load_obj, load_point_cloud, Primitive, SdfGrid, TriangleMesh};
use crate::geom::Aabb;
use crate::planner::RefineConfig;
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlannerKind {
    React,
    Baseline,
}

impl PlannerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::React => "react",
            PlannerKind::Baseline => "baseline",
        }
    }
}

impl std::str::FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "react" => Ok(PlannerKind::React),
            "baseline" => Ok(PlannerKind::Baseline),
            other => Err(Error::InvalidParameter(format!(
                "unknown planner {other:?}, expected react or baseline"
            ))),
        }
    }
}

/// Helical waypoints around a vertical axis through `(cx, cy)`.
///
/// Waypoint `k` (1-based) sits at angle `phase + 2πk / per_turn` and height
/// `z0 + pitch * k / per_turn`, so the last one completes the final turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Helix {
    pub cx: f64,
    pub cy: f64,
    pub z0: f64,
    pub radius: f64,
    /// Rise per turn (m).
    pub pitch: f64,
    pub turns: f64,
    pub per_turn: usize,
    /// Angle of the zeroth point (degrees, counter-clockwise from +x).
    pub phase: f64,
}

impl Helix {
    pub fn waypoints(&self) -> Vec<Vec3> {
        let n = (self.turns * self.per_turn as f64).round() as usize;
        (1..=n)
            .map(|k| {
                let f = k as f64 / self.per_turn as f64;
                let th = self.phase.to_radians() + std::f64::consts::TAU * f;
                Vec3::new(
                    self.cx + self.radius * th.cos(),
                    self.cy + self.radius * th.sin(),
                    self.z0 + self.pitch * f,
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WaypointSource {
    File(PathBuf),
    Helix(Helix),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    None,
    File(PathBuf),
    Cylinder {
        a: Vec3,
        b: Vec3,
        radius: f64,
        segments: usize,
        rings: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub resolution: f64,
    pub truncation: f64,
    pub bounds: Aabb,
    pub cloud: Option<PathBuf>,
    pub primitives: Vec<Primitive>,
    pub mesh: MeshSource,
    pub anchor: Vec3,
    pub start: Vec3,
    pub waypoints: WaypointSource,
    /// Vertical axis `(x, y)` the camera turns toward; defaults to the
    /// helix axis, otherwise the camera faces the current target.
    pub look_at_axis: Option<(f64, f64)>,
    pub l_max: f64,
    pub spacing: f64,
    pub tether_margin: f64,
    pub vehicle_margin: f64,
    pub max_speed: f64,
    pub max_yaw_rate: f64,
    pub camera: CameraModel,
    pub dt: f64,
    pub max_time: f64,
    pub planner: PlannerKind,
    pub seed: u64,
    pub reach_radius: f64,
    pub lookahead: f64,
    pub refine: RefineConfig,
    pub rrt_step: Option<f64>,
    pub rrt_goal_bias: f64,
    pub rrt_max_iterations: usize,
    pub rrt_improve_iterations: usize,
    pub feasibility_stride: usize,
}

/// Loaded map, mesh and waypoints.
#[derive(Debug, Clone)]
pub struct World {
    pub grid: SdfGrid,
    pub mesh: TriangleMesh,
    pub waypoints: Vec<Vec3>,
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base, path)
    }

    /// Parses scenario text. `base` resolves relative file paths; `path` is
    /// used in error messages only.
    pub fn parse(text: &str, base: &Path, path: &Path) -> Result<Self> {
        let mut kv = Entries::parse(text, path)?;
        let resolution = kv.f64("map.resolution")?.unwrap_or(0.05);
        let bounds = match kv.floats("map.bounds", 6)? {
            Some(b) => Aabb::new(Vec3::new(b[0], b[1], b[2]), Vec3::new(b[3], b[4], b[5])),
            None => return Err(kv.missing("map.bounds")),
        };
        let mut primitives = Vec::new();
        for (line, v) in kv.all("map.box") {
            let b = floats(&v, 6).map_err(|m| kv.err(line, m))?;
            primitives.push(Primitive::Box(Aabb::new(
                Vec3::new(b[0], b[1], b[2]),
                Vec3::new(b[3], b[4], b[5]),
            )));
        }
        for (line, v) in kv.all("map.cylinder") {
            let c = floats(&v, 7).map_err(|m| kv.err(line, m))?;
            primitives.push(Primitive::Cylinder {
                a: Vec3::new(c[0], c[1], c[2]),
                b: Vec3::new(c[3], c[4], c[5]),
                radius: c[6],
            });
        }
        let cloud = kv.string("map.cloud")?.map(|s| base.join(s));

        let mesh = if let Some(f) = kv.string("mesh.file")? {
            MeshSource::File(base.join(f))
        } else if let Some(c) = kv.floats("mesh.cylinder", 9)? {
            MeshSource::Cylinder {
                a: Vec3::new(c[0], c[1], c[2]),
                b: Vec3::new(c[3], c[4], c[5]),
                radius: c[6],
                segments: c[7] as usize,
                rings: c[8] as usize,
            }
        } else {
            MeshSource::None
        };

        let waypoints = if let Some(f) = kv.string("waypoints.file")? {
            WaypointSource::File(base.join(f))
        } else if let Some(h) = kv.floats("waypoints.helix", 6)? {
            WaypointSource::Helix(Helix {
                cx: h[0],
                cy: h[1],
                z0: h[2],
                radius: h[3],
                pitch: h[4],
                turns: h[5],
                per_turn: kv.usize("waypoints.per_turn")?.unwrap_or(12),
                phase: kv.f64("waypoints.phase")?.unwrap_or(0.0),
            })
        } else {
            return Err(kv.missing("waypoints.file or waypoints.helix"));
        };
        let look_at_axis = match kv.floats("look_at.axis", 2)? {
            Some(a) => Some((a[0], a[1])),
            None => match &waypoints {
                WaypointSource::Helix(h) => Some((h.cx, h.cy)),
                WaypointSource::File(_) => None,
            },
        };

        let defaults = RefineConfig::default();
        let scenario = Scenario {
            resolution,
            truncation: kv.f64("map.truncation")?.unwrap_or(2.0),
            bounds,
            cloud,
            primitives,
            mesh,
            anchor: kv.vec3("anchor")?.ok_or_else(|| kv.missing("anchor"))?,
            start: kv.vec3("start")?.ok_or_else(|| kv.missing("start"))?,
            waypoints,
            look_at_axis,
            l_max: kv.f64("tether.l_max")?.unwrap_or(10.0),
            spacing: kv.f64("tether.spacing")?.unwrap_or(2.0 * resolution),
            tether_margin: kv.f64("tether.margin")?.unwrap_or(resolution),
            vehicle_margin: kv.f64("vehicle.margin")?.unwrap_or(0.15),
            max_speed: kv.f64("vehicle.max_speed")?.unwrap_or(0.3),
            max_yaw_rate: kv.f64("vehicle.max_yaw_rate")?.unwrap_or(1.0),
            camera: CameraModel::new(
                kv.f64("camera.fov")?.unwrap_or(70.0),
                kv.f64("camera.range")?.unwrap_or(1.2),
            )?,
            dt: kv.f64("sim.dt")?.unwrap_or(0.1),
            max_time: kv.f64("sim.max_time")?.unwrap_or(3600.0),
            planner: match kv.string("planner")? {
                Some(p) => p.parse()?,
                None => PlannerKind::React,
            },
            seed: kv.u64("seed")?.unwrap_or(0),
            reach_radius: kv.f64("planner.reach_radius")?.unwrap_or(0.15),
            lookahead: kv.f64("planner.lookahead")?.unwrap_or(0.3),
            refine: RefineConfig {
                offset_gain: kv.f64("refine.offset_gain")?.unwrap_or(defaults.offset_gain),
                perturbation_samples: kv.usize("refine.samples")?.unwrap_or(defaults.perturbation_samples),
                window: kv.usize("refine.window")?.unwrap_or(defaults.window),
                max_iterations: kv.usize("refine.max_iter")?.unwrap_or(defaults.max_iterations),
                seed: 0,
            },
            rrt_step: kv.f64("rrt.step")?,
            rrt_goal_bias: kv.f64("rrt.goal_bias")?.unwrap_or(0.1),
            rrt_max_iterations: kv.usize("rrt.max_iter")?.unwrap_or(5000),
            rrt_improve_iterations: kv.usize("rrt.improve_iter")?.unwrap_or(200),
            feasibility_stride: kv.usize("planner.feasibility_stride")?.unwrap_or(10),
        };
        kv.finish()?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("map.resolution", self.resolution),
            ("map.truncation", self.truncation),
            ("tether.l_max", self.l_max),
            ("tether.spacing", self.spacing),
            ("tether.margin", self.tether_margin),
            ("vehicle.margin", self.vehicle_margin),
            ("vehicle.max_speed", self.max_speed),
            ("vehicle.max_yaw_rate", self.max_yaw_rate),
            ("sim.dt", self.dt),
            ("sim.max_time", self.max_time),
            ("planner.reach_radius", self.reach_radius),
            ("planner.lookahead", self.lookahead),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Scenario(format!("{name} must be positive, got {v}")));
            }
        }
        if self.bounds.is_degenerate() {
            return Err(Error::Scenario("map.bounds is degenerate".into()));
        }
        if let WaypointSource::Helix(h) = &self.waypoints {
            if h.per_turn == 0 || !(h.turns > 0.0) || !(h.radius > 0.0) {
                return Err(Error::Scenario("helix needs radius > 0, turns > 0, per_turn > 0".into()));
            }
        }
        Ok(())
    }

    /// Builds the distance map and loads the mesh and waypoints.
    pub fn build(&self) -> Result<World> {
        let cloud = match &self.cloud {
            Some(p) => Some(load_point_cloud(p)?),
            None => None,
        };
        let grid = SdfGrid::from_primitives(&self.bounds, self.resolution, self.truncation, &self.primitives, cloud.as_ref())?;
        let mesh = match &self.mesh {
            MeshSource::None => TriangleMesh::new(Vec::new(), Vec::new())?,
            MeshSource::File(p) => load_obj(p)?,
            MeshSource::Cylinder {
                a,
                b,
                radius,
                segments,
                rings,
            } => cylinder_mesh(a, b, *radius, *segments, *rings)?,
        };
        let waypoints = match &self.waypoints {
            WaypointSource::Helix(h) => h.waypoints(),
            WaypointSource::File(p) => load_point_cloud(p)?.points().to_vec(),
        };
        if waypoints.is_empty() {
            return Err(Error::Scenario("no waypoints".into()));
        }
        Ok(World { grid, mesh, waypoints })
    }
}

struct Entries {
    path: PathBuf,
    map: BTreeMap<String, Vec<(usize, String)>>,
}

impl Entries {
    fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut map: BTreeMap<String, Vec<(usize, String)>> = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: n + 1,
                    message: "expected key = value".into(),
                });
            };
            map.entry(k.trim().to_string())
                .or_default()
                .push((n + 1, v.trim().to_string()));
        }
        Ok(Self {
            path: path.to_path_buf(),
            map,
        })
    }

    fn err(&self, line: usize, message: String) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message,
        }
    }

    fn missing(&self, key: &str) -> Error {
        Error::Scenario(format!("{}: missing {key}", self.path.display()))
    }

    fn all(&mut self, key: &str) -> Vec<(usize, String)> {
        self.map.remove(key).unwrap_or_default()
    }

    fn one(&mut self, key: &str) -> Result<Option<(usize, String)>> {
        let mut v = self.all(key);
        match v.len() {
            0 => Ok(None),
            1 => Ok(v.pop()),
            _ => Err(self.err(v[1].0, format!("{key} given more than once"))),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<String>> {
        Ok(self.one(key)?.map(|(_, v)| v))
    }

    fn floats(&mut self, key: &str, n: usize) -> Result<Option<Vec<f64>>> {
        match self.one(key)? {
            None => Ok(None),
            Some((line, v)) => floats(&v, n)
                .map(Some)
                .map_err(|m| self.err(line, format!("{key}: {m}"))),
        }
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        Ok(self.floats(key, 1)?.map(|v| v[0]))
    }

    fn vec3(&mut self, key: &str) -> Result<Option<Vec3>> {
        Ok(self.floats(key, 3)?.map(|v| Vec3::new(v[0], v[1], v[2])))
    }

    fn u64(&mut self, key: &str) -> Result<Option<u64>> {
        match self.one(key)? {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| self.err(line, format!("{key}: expected a non-negative integer"))),
        }
    }

    fn usize(&mut self, key: &str) -> Result<Option<usize>> {
        Ok(self.u64(key)?.map(|v| v as usize))
    }

    fn finish(self) -> Result<()> {
        match self.map.iter().next() {
            None => Ok(()),
            Some((k, v)) => Err(self.err(v[0].0, format!("unknown key {k:?}"))),
        }
    }
}

fn floats(s: &str, n: usize) -> std::result::Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| format!("invalid number {t:?}")))
        .collect::<std::result::Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} numbers, got {}", v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("numbers must be finite".into());
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
map.bounds = -1 -1 -1 3 1 1
anchor = 0 0 0
start = 0 0 0
waypoints.helix = 1 0 0 0.5 0.2 1
";

    #[test]
    fn parses_with_defaults() {
        let s = Scenario::parse(MINIMAL, Path::new("."), Path::new("t.scn")).unwrap();
        assert_eq!(s.resolution, 0.05);
        assert_eq!(s.tether_margin, 0.05);
        assert_eq!(s.spacing, 0.1);
        assert_eq!(s.l_max, 10.0);
        assert_eq!(s.camera.fov, 70.0);
        assert_eq!(s.planner, PlannerKind::React);
        assert_eq!(s.look_at_axis, Some((1.0, 0.0)));
    }

    #[test]
    fn helix_completes_turns() {
        let h = Helix {
            cx: 0.0,
            cy: 0.0,
            z0: 0.3,
            radius: 0.9,
            pitch: 0.6,
            turns: 3.0,
            per_turn: 12,
            phase: 0.0,
        };
        let w = h.waypoints();
        assert_eq!(w.len(), 36);
        let last = w.last().unwrap();
        assert!((last - Vec3::new(0.9, 0.0, 2.1)).norm() < 1e-9);
        assert!(w.iter().all(|p| ((p.x * p.x + p.y * p.y).sqrt() - 0.9).abs() < 1e-9));
    }

    #[test]
    fn reports_unknown_and_bad_keys() {
        let text = format!("{MINIMAL}bogus = 1\n");
        assert!(matches!(
            Scenario::parse(&text, Path::new("."), Path::new("t.scn")),
            Err(Error::Parse { line: 5, .. })
        ));
        let text = MINIMAL.replace("anchor = 0 0 0", "anchor = 0 0");
        assert!(matches!(
            Scenario::parse(&text, Path::new("."), Path::new("t.scn")),
            Err(Error::Parse { line: 2, .. })
        ));
        let text = MINIMAL.replace("start = 0 0 0\n", "");
        assert!(matches!(
            Scenario::parse(&text, Path::new("."), Path::new("t.scn")),
            Err(Error::Scenario(_))
        ));
    }
}
