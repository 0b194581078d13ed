//! Closed-loop episodes: sensors, network, wheels.

use crate::data::format_float;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::mlp::{MlpNetwork, TargetCodec};
use crate::robot::kinematics::{detect_collision, disc_collides, step_kinematics, RobotState};
use crate::robot::sensors::{SensorReading, SensorRig};
use crate::robot::world::WorldMap;

/// Default control period in seconds.
pub const DEFAULT_DT: f64 = 0.1;

pub const TRAJECTORY_HEADER: &str = "t,x,y,heading,fs,ls,rs,wl,wr,collision";

/// Upper bound on the distance moved between collision checks, as a fraction
/// of the body radius.
const SWEEP_FRACTION: f64 = 0.25;
const CONTACT_BISECTIONS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub sensors: SensorReading,
    pub wl: f64,
    pub wr: f64,
    /// The move commanded at `t` ran into something.
    pub collision: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeResult {
    pub trajectory: Vec<TrajectoryRow>,
    /// Contiguous contact episodes.
    pub collisions: usize,
    /// False when the start pose already intersects the world.
    pub completed: bool,
    pub final_state: RobotState,
}

impl EpisodeResult {
    /// Sum of per-step displacements.
    pub fn path_length(&self) -> f64 {
        let mut pts: Vec<(f64, f64)> = self.trajectory.iter().map(|r| (r.x, r.y)).collect();
        pts.push((self.final_state.x, self.final_state.y));
        pts.windows(2).map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1)).sum()
    }

    /// Straight-line distance from the start to the final pose.
    pub fn net_displacement(&self) -> f64 {
        match self.trajectory.first() {
            Some(r) => (self.final_state.x - r.x).hypot(self.final_state.y - r.y),
            None => 0.0,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRAJECTORY_HEADER);
        out.push('\n');
        for r in &self.trajectory {
            let cells = [r.t, r.x, r.y, r.heading, r.sensors.fs, r.sensors.ls, r.sensors.rs, r.wl, r.wr]
                .map(format_float);
            out.push_str(&cells.join(","));
            out.push_str(if r.collision { ",1\n" } else { ",0\n" });
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeSettings {
    pub start: RobotState,
    pub rig: SensorRig,
    pub duration: f64,
    pub dt: f64,
}

impl EpisodeSettings {
    /// Default geometry and rig at the map's start pose.
    pub fn for_map(map: &WorldMap, duration: f64, dt: f64) -> Self {
        let s = map.start_pose();
        Self {
            start: RobotState::new(s.x, s.y, s.heading),
            rig: SensorRig::default(),
            duration,
            dt,
        }
    }

    fn steps(&self) -> Result<usize> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return Err(Error::Config(format!("duration must be non-negative, got {}", self.duration)));
        }
        Ok((self.duration / self.dt + 1e-9).floor() as usize)
    }
}

pub fn run_episode(map: &WorldMap, net: &MlpNetwork, codec: &TargetCodec, duration: f64, dt: f64) -> Result<EpisodeResult> {
    simulate(map, net, codec, &EpisodeSettings::for_map(map, duration, dt))
}

pub fn simulate(map: &WorldMap, net: &MlpNetwork, codec: &TargetCodec, settings: &EpisodeSettings) -> Result<EpisodeResult> {
    if net.inputs() != 3 || net.outputs() != 2 {
        return Err(Error::InvalidShape(format!(
            "controller must map 3 sensor inputs to 2 wheel speeds, network widths are {:?}",
            net.widths()
        )));
    }
    let steps = settings.steps()?;
    let mut state = settings.start;
    settings.rig.cast(map, &state)?;
    if detect_collision(map, &state) {
        return Ok(EpisodeResult {
            trajectory: Vec::new(),
            collisions: 0,
            completed: false,
            final_state: state,
        });
    }

    let mut trajectory = Vec::with_capacity(steps);
    let mut collisions = 0;
    let mut in_contact = false;
    for k in 0..steps {
        let sensors = settings.rig.cast(map, &state)?;
        let input = Matrix::new(3, 1, sensors.as_inputs().map(|v| v as f32).to_vec())?;
        let wheels = codec.decode(&net.predict(&input)?);
        let (wl, wr) = (wheels.get(0, 0) as f64, wheels.get(1, 0) as f64);

        let (next, hit) = advance(map, &state, wl, wr, settings.dt);
        if hit && !in_contact {
            collisions += 1;
        }
        in_contact = hit;
        trajectory.push(TrajectoryRow {
            t: k as f64 * settings.dt,
            x: state.x,
            y: state.y,
            heading: state.heading,
            sensors,
            wl,
            wr,
            collision: hit,
        });
        state = next;
    }
    Ok(EpisodeResult {
        trajectory,
        collisions,
        completed: true,
        final_state: state,
    })
}

/// Moves along the commanded segment, stopping just short of the first contact.
/// The heading update always applies.
fn advance(map: &WorldMap, state: &RobotState, wl: f64, wr: f64, dt: f64) -> (RobotState, bool) {
    let target = step_kinematics(state, wl, wr, dt);
    let (dx, dy) = (target.x - state.x, target.y - state.y);
    if !(dx.is_finite() && dy.is_finite()) {
        return (RobotState { heading: state.heading, ..*state }, true);
    }
    let radius = state.geometry.body_radius;
    let at = |f: f64| (state.x + f * dx, state.y + f * dy);
    let hits = |f: f64| {
        let (x, y) = at(f);
        disc_collides(map, x, y, radius)
    };

    let subs = (dx.hypot(dy) / (SWEEP_FRACTION * radius)).ceil().max(1.0) as usize;
    let Some(first) = (1..=subs).find(|&i| hits(i as f64 / subs as f64)) else {
        return (target, false);
    };
    let (mut free, mut blocked) = ((first - 1) as f64 / subs as f64, first as f64 / subs as f64);
    for _ in 0..CONTACT_BISECTIONS {
        let mid = 0.5 * (free + blocked);
        if hits(mid) {
            blocked = mid;
        } else {
            free = mid;
        }
    }
    let (x, y) = at(free);
    let heading = if target.heading.is_finite() { target.heading } else { state.heading };
    (RobotState { x, y, heading, geometry: state.geometry }, true)
}

/// Collision statistics for a fixed sequence of positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayCount {
    /// Positions whose disc intersects the world.
    pub colliding_steps: usize,
    /// Maximal runs of consecutive colliding positions.
    pub contacts: usize,
}

/// Re-scores a recorded path with a different body radius.
pub fn replay_collisions(map: &WorldMap, path: &[(f64, f64)], body_radius: f64) -> ReplayCount {
    let mut count = ReplayCount {
        colliding_steps: 0,
        contacts: 0,
    };
    let mut prev = false;
    for &(x, y) in path {
        let hit = disc_collides(map, x, y, body_radius);
        if hit {
            count.colliding_steps += 1;
            if !prev {
                count.contacts += 1;
            }
        }
        prev = hit;
    }
    count
}
