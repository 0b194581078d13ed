//! Differential-drive robot in an axis-aligned world, driven by a network
//! that maps three proximity readings to two wheel speeds.

mod episode;
mod kinematics;
mod sensors;
mod world;

pub use episode::{
    replay_collisions, run_episode, simulate, EpisodeResult, EpisodeSettings, ReplayCount, TrajectoryRow, DEFAULT_DT,
    TRAJECTORY_HEADER,
};
pub use kinematics::{detect_collision, disc_collides, step_kinematics, wrap_angle, RobotGeometry, RobotState};
pub use sensors::{cast_sensors, cast_sensors_with, SensorReading, SensorRig};
pub use world::{Rect, StartPose, WorldMap};

/// Default episode length in seconds.
pub const DEFAULT_DURATION: f64 = 60.0;
