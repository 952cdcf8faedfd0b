use crate::geom::{closest_arclength, closest_arclength_in, path_length, point_at_arclength};
use crate::Vec3;

/// Point `lookahead` ahead of the path point closest to `p_rov`, clamped to
/// the path end.
pub fn follow_path(path: &[Vec3], p_rov: &Vec3, lookahead: f64) -> Vec3 {
    let s = closest_arclength(path, p_rov);
    point_at_arclength(path, s + lookahead)
}

pub fn reached_waypoint(p_rov: &Vec3, w: &Vec3, reach_radius: f64) -> bool {
    (p_rov - w).norm() <= reach_radius
}

/// Pure-pursuit follower that only searches forward of its last progress, so
/// paths that double back near themselves are followed in order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PathFollower {
    path: Vec<Vec3>,
    length: f64,
    progress: f64,
}

impl PathFollower {
    pub fn new(path: Vec<Vec3>) -> Self {
        Self {
            length: path_length(&path),
            path,
            progress: 0.0,
        }
    }

    pub fn path(&self) -> &[Vec3] {
        &self.path
    }

    pub fn end(&self) -> Option<Vec3> {
        self.path.last().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    pub fn progress(&self) -> f64 {
        self.progress
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn target(&mut self, p_rov: &Vec3, lookahead: f64) -> Vec3 {
        let window = 4.0 * lookahead.max(1e-3);
        let s = closest_arclength_in(&self.path, p_rov, self.progress, self.progress + window);
        self.progress = self.progress.max(s);
        point_at_arclength(&self.path, self.progress + lookahead)
    }
}
