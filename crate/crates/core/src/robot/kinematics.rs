//! Differential-drive kinematics and disc collision.

use std::f64::consts::{PI, TAU};

use crate::robot::world::WorldMap;

/// Physical dimensions in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotGeometry {
    pub wheel_radius: f64,
    pub axle_length: f64,
    pub body_radius: f64,
}

impl Default for RobotGeometry {
    fn default() -> Self {
        Self {
            wheel_radius: 0.033,
            axle_length: 0.26,
            body_radius: 0.17,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    pub x: f64,
    pub y: f64,
    /// Radians in (-pi, pi].
    pub heading: f64,
    pub geometry: RobotGeometry,
}

impl RobotState {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self {
            x,
            y,
            heading: wrap_angle(heading),
            geometry: RobotGeometry::default(),
        }
    }

    pub fn with_geometry(mut self, geometry: RobotGeometry) -> Self {
        self.geometry = geometry;
        self
    }

    /// Linear (m/s) and angular (rad/s) body velocity for wheel speeds in rad/s.
    pub fn body_velocity(&self, wl: f64, wr: f64) -> (f64, f64) {
        let g = &self.geometry;
        (g.wheel_radius * (wl + wr) / 2.0, g.wheel_radius * (wr - wl) / g.axle_length)
    }
}

/// Maps any angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// One Euler step of the unicycle model.
pub fn step_kinematics(state: &RobotState, wl: f64, wr: f64, dt: f64) -> RobotState {
    let (v, w) = state.body_velocity(wl, wr);
    RobotState {
        x: state.x + v * state.heading.cos() * dt,
        y: state.y + v * state.heading.sin() * dt,
        heading: wrap_angle(state.heading + w * dt),
        geometry: state.geometry,
    }
}

/// True when the body disc overlaps an obstacle or crosses the bounds.
/// Touching is not a collision.
pub fn detect_collision(map: &WorldMap, state: &RobotState) -> bool {
    disc_collides(map, state.x, state.y, state.geometry.body_radius)
}

pub fn disc_collides(map: &WorldMap, x: f64, y: f64, radius: f64) -> bool {
    let b = &map.bounds;
    if x - radius < b.x_min || x + radius > b.x_max || y - radius < b.y_min || y + radius > b.y_max {
        return true;
    }
    map.obstacles.iter().any(|o| o.distance_to(x, y) < radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robot::world::Rect;

    #[test]
    fn straight_and_spin() {
        let s = RobotState::new(1.0, 1.0, 0.0);
        let n = step_kinematics(&s, 2.0, 2.0, 0.5);
        assert!((n.x - (1.0 + 0.033 * 2.0 * 0.5)).abs() < 1e-15);
        assert_eq!(n.y, 1.0);
        assert_eq!(n.heading, 0.0);

        let spin = step_kinematics(&s, -1.0, 1.0, 1.0);
        assert_eq!((spin.x, spin.y), (1.0, 1.0));
        assert!((spin.heading - 2.0 * 0.033 / 0.26).abs() < 1e-15);
    }

    #[test]
    fn heading_wraps_half_open() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_angle(-7.0) - (-7.0 + TAU)).abs() < 1e-12);
        for k in -20..20 {
            let a = wrap_angle(k as f64 * 0.77);
            assert!(a > -PI && a <= PI);
        }
    }

    #[test]
    fn tangent_is_not_collision() {
        let map = WorldMap::new("t", Rect::new(0.0, 0.0, 4.0, 4.0).unwrap(), vec![Rect::new(2.0, 0.0, 3.0, 4.0).unwrap()]).unwrap();
        let r = 0.17;
        assert!(!disc_collides(&map, 2.0 - 0.25, 2.0, r));
        assert!(disc_collides(&map, 2.0 - 0.1, 2.0, r));
        assert!(!disc_collides(&map, 1.0, 2.0, 0.5));
        assert!(disc_collides(&map, 0.1, 2.0, r));
        assert!(!disc_collides(&map, 0.25, 2.0, 0.25));
    }
}
