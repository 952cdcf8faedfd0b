//! Environment representation: raw point clouds, inspection meshes and the
//! voxel signed distance field every collision query runs against.

mod cloud;
mod mesh;
mod primitives;
mod sdf;

pub use cloud::{load_point_cloud, PointCloud};
pub use mesh::{cylinder_mesh, load_obj, TriangleMesh};
pub use primitives::Primitive;
pub use sdf::{build_sdf, OccupancyGrid, SdfGrid, VoxelLayout};
