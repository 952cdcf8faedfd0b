use std::f64::consts::PI;

use crate::Vec3;

/// Kinematic stand-in for the vehicle and its tracking controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub position: Vec3,
    /// Heading in the horizontal plane (rad, counter-clockwise from +x).
    pub yaw: f64,
    pub max_speed: f64,
    pub max_yaw_rate: f64,
}

impl VehicleState {
    /// Unit view direction of the forward camera.
    pub fn heading(&self) -> Vec3 {
        Vec3::new(self.yaw.cos(), self.yaw.sin(), 0.0)
    }
}

/// Moves at most `max_speed * dt` toward `target` and turns at most
/// `max_yaw_rate * dt` toward the bearing of `look_at`.
pub fn step_vehicle(state: &VehicleState, target: &Vec3, look_at: &Vec3, dt: f64) -> VehicleState {
    let mut next = *state;
    let d = target - state.position;
    let dist = d.norm();
    let reach = state.max_speed * dt;
    next.position = if dist <= reach { *target } else { state.position + d * (reach / dist) };

    let dx = look_at.x - next.position.x;
    let dy = look_at.y - next.position.y;
    if dx.hypot(dy) > 1e-9 {
        let want = dy.atan2(dx);
        let err = wrap_angle(want - state.yaw);
        let turn = state.max_yaw_rate * dt;
        next.yaw = wrap_angle(state.yaw + err.clamp(-turn, turn));
    }
    next
}

/// Wraps to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vehicle() -> VehicleState {
        VehicleState {
            position: Vec3::zeros(),
            yaw: 0.0,
            max_speed: 0.5,
            max_yaw_rate: 1.0,
        }
    }

    #[test]
    fn translation_is_rate_limited() {
        let s = vehicle();
        let n = step_vehicle(&s, &Vec3::new(1.0, 0.0, 0.0), &Vec3::new(5.0, 0.0, 0.0), 0.1);
        assert!((n.position - Vec3::new(0.05, 0.0, 0.0)).norm() < 1e-12);
        let n = step_vehicle(&s, &Vec3::zeros(), &Vec3::new(5.0, 0.0, 0.0), 0.1);
        assert_eq!(n.position, Vec3::zeros());
        let n = step_vehicle(&s, &Vec3::new(0.01, 0.0, 0.0), &Vec3::new(5.0, 0.0, 0.0), 0.1);
        assert_eq!(n.position, Vec3::new(0.01, 0.0, 0.0));
    }

    #[test]
    fn yaw_is_rate_limited_and_takes_short_way() {
        let s = VehicleState { yaw: 3.0, ..vehicle() };
        // Bearing of -x is π; the short way from 3.0 is positive.
        let n = step_vehicle(&s, &Vec3::zeros(), &Vec3::new(-1.0, 0.0, 0.0), 0.1);
        assert!((n.yaw - (3.0 + 0.1)).abs() < 1e-12);
        let s = vehicle();
        let n = step_vehicle(&s, &Vec3::zeros(), &Vec3::new(0.0, -1.0, 0.0), 0.1);
        assert!((n.yaw + 0.1).abs() < 1e-12);
    }
}
