use crate::geom::{point_segment_distance, Aabb};
use crate::Vec3;

/// Solid obstacle shapes that can be rasterized straight into an occupancy
/// grid, so scenarios and tests need no external point cloud.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    Box(Aabb),
    /// Capped cylinder with axis from `a` to `b`.
    Cylinder { a: Vec3, b: Vec3, radius: f64 },
}

impl Primitive {
    pub fn contains(&self, p: &Vec3) -> bool {
        match self {
            Primitive::Box(b) => b.contains(p),
            Primitive::Cylinder { a, b, radius } => {
                let axis = b - a;
                let t = (p - a).dot(&axis) / axis.norm_squared();
                (0.0..=1.0).contains(&t) && point_segment_distance(p, a, b) <= *radius
            }
        }
    }

    pub fn bounds(&self) -> Aabb {
        match self {
            Primitive::Box(b) => *b,
            Primitive::Cylinder { a, b, radius } => {
                Aabb::from_points(&[*a, *b]).unwrap().inflated(*radius)
            }
        }
    }
}
