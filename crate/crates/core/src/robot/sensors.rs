//! Ray-cast proximity sensors.

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::robot::kinematics::RobotState;
use crate::robot::world::WorldMap;

/// Readings in meters, measured from the body perimeter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorReading {
    pub fs: f64,
    pub rs: f64,
    pub ls: f64,
}

impl SensorReading {
    /// Network input order `(FS, RS, LS)`.
    pub fn as_inputs(&self) -> [f64; 3] {
        [self.fs, self.rs, self.ls]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorRig {
    /// Mount angles relative to the heading, counter-clockwise positive.
    pub front: f64,
    pub right: f64,
    pub left: f64,
    pub max_range: f64,
}

impl Default for SensorRig {
    fn default() -> Self {
        Self {
            front: 0.0,
            right: -FRAC_PI_4,
            left: FRAC_PI_4,
            max_range: 3.0,
        }
    }
}

impl SensorRig {
    pub fn cast(&self, map: &WorldMap, state: &RobotState) -> Result<SensorReading> {
        cast_sensors_with(map, state, self)
    }
}

pub fn cast_sensors(map: &WorldMap, state: &RobotState) -> Result<SensorReading> {
    cast_sensors_with(map, state, &SensorRig::default())
}

pub fn cast_sensors_with(map: &WorldMap, state: &RobotState, rig: &SensorRig) -> Result<SensorReading> {
    if !(state.x.is_finite() && state.y.is_finite()) || !map.bounds.contains_point(state.x, state.y) {
        return Err(Error::OutOfWorld { x: state.x, y: state.y });
    }
    let ray = |offset: f64| {
        let a = state.heading + offset;
        let (dx, dy) = (a.cos(), a.sin());
        let hit = map
            .obstacles
            .iter()
            .filter_map(|o| o.ray_entry(state.x, state.y, dx, dy))
            .fold(map.bounds.ray_exit(state.x, state.y, dx, dy), f64::min);
        (hit - state.geometry.body_radius).clamp(0.0, rig.max_range)
    };
    Ok(SensorReading {
        fs: ray(rig.front),
        rs: ray(rig.right),
        ls: ray(rig.left),
    })
}
