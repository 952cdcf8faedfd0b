//! Entanglement-aware path planning for tethered underwater vehicles.
//!
//! The crate is organised as a pipeline:
//!
//! - [`env_map`]: point clouds, triangle meshes and a voxel signed distance
//!   field with distance, collision and line-of-sight queries.
//! - [`tether`]: a geometric taut-tether model that tightens the cable
//!   polyline behind the vehicle by shortcutting and pulling.
//! - [`shortest_path`]: an RRT* planner with line-of-sight simplification.
//! - [`planner`]: the dual-mode (normal / recovery) replanner that keeps the
//!   tether below a maximum length, the backward pivot search and recovery
//!   path refinement.
//! - [`coverage`]: camera visibility and unique-triangle coverage tracking.
//! - [`sim`]: scenario files, a kinematic vehicle, the mission loop and CSV
//!   logging.
//!
//! ```
//! use tetherplan::env_map::{build_sdf, PointCloud};
//! use tetherplan::geom::Aabb;
//! use tetherplan::Vec3;
//!
//! let cloud = PointCloud::new(vec![Vec3::new(0.0, 0.0, 0.0)]);
//! let bounds = Aabb::new(Vec3::new(-1.0, -1.0, -1.0), Vec3::new(1.0, 1.0, 1.0));
//! let grid = build_sdf(&cloud, &bounds, 0.1, 2.0).unwrap();
//! assert!(grid.is_in_collision(&Vec3::new(0.05, 0.05, 0.05), 0.05));
//! assert!(grid.line_of_sight(&Vec3::new(-0.9, 0.5, 0.0), &Vec3::new(0.9, 0.5, 0.0), 0.1));
//! ```

pub mod coverage;
pub mod env_map;
pub mod error;
pub mod geom;
pub mod planner;
pub mod shortest_path;
pub mod sim;
pub mod tether;

pub use error::{Error, Result};

/// 3D position or direction in meters.
pub type Vec3 = nalgebra::Vector3<f64>;
