//! Axis-aligned worlds and their text format.
//!
//! ```text
//! map       := { line "\n" }
//! line      := blank | comment | directive
//! comment   := "#" { any }
//! directive := "name"   ident
//!            | "bounds" num num num num       # x_min y_min x_max y_max
//!            | "rect"   num num num num       # obstacle, same order
//!            | "start"  num num num           # x y heading(rad), optional
//! ```
//!
//! Exactly one `bounds` line is required; tokens are whitespace separated.

use std::fmt;

use crate::data::format_float;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let all_finite = [x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite());
        if !all_finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::Config(format!(
                "degenerate rectangle ({x_min}, {y_min}) - ({x_max}, {y_max})"
            )));
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x_min >= self.x_min && other.x_max <= self.x_max && other.y_min >= self.y_min && other.y_max <= self.y_max
    }

    /// Distance from a point to the rectangle (0 inside).
    pub fn distance_to(&self, x: f64, y: f64) -> f64 {
        let dx = (self.x_min - x).max(0.0).max(x - self.x_max);
        let dy = (self.y_min - y).max(0.0).max(y - self.y_max);
        dx.hypot(dy)
    }

    /// Smallest `t >= 0` where the ray `origin + t·dir` enters the rectangle,
    /// or 0 when the origin is already inside.
    pub fn ray_entry(&self, ox: f64, oy: f64, dx: f64, dy: f64) -> Option<f64> {
        let (mut t_min, mut t_max) = (0.0f64, f64::INFINITY);
        for (o, d, lo, hi) in [(ox, dx, self.x_min, self.x_max), (oy, dy, self.y_min, self.y_max)] {
            if d.abs() < 1e-15 {
                if o < lo || o > hi {
                    return None;
                }
            } else {
                let (a, b) = ((lo - o) / d, (hi - o) / d);
                let (near, far) = if a < b { (a, b) } else { (b, a) };
                t_min = t_min.max(near);
                t_max = t_max.min(far);
                if t_min > t_max {
                    return None;
                }
            }
        }
        Some(t_min)
    }

    /// Distance along the ray from an interior origin to the boundary.
    pub fn ray_exit(&self, ox: f64, oy: f64, dx: f64, dy: f64) -> f64 {
        let axis = |o: f64, d: f64, lo: f64, hi: f64| {
            if d > 1e-15 {
                (hi - o) / d
            } else if d < -1e-15 {
                (lo - o) / d
            } else {
                f64::INFINITY
            }
        };
        axis(ox, dx, self.x_min, self.x_max)
            .min(axis(oy, dy, self.y_min, self.y_max))
            .max(0.0)
    }
}

/// Starting pose stored with a map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartPose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldMap {
    pub name: String,
    pub bounds: Rect,
    pub obstacles: Vec<Rect>,
    pub start: Option<StartPose>,
}

impl WorldMap {
    pub fn new(name: impl Into<String>, bounds: Rect, obstacles: Vec<Rect>) -> Result<Self> {
        if let Some(o) = obstacles.iter().find(|o| !bounds.contains_rect(o)) {
            return Err(Error::Config(format!("obstacle {o:?} lies outside the map bounds")));
        }
        Ok(Self {
            name: name.into(),
            bounds,
            obstacles,
            start: None,
        })
    }

    pub fn with_start(mut self, x: f64, y: f64, heading: f64) -> Self {
        self.start = Some(StartPose { x, y, heading });
        self
    }

    /// The stored start pose, or the centre of the bounds facing +x.
    pub fn start_pose(&self) -> StartPose {
        self.start.unwrap_or(StartPose {
            x: 0.5 * (self.bounds.x_min + self.bounds.x_max),
            y: 0.5 * (self.bounds.y_min + self.bounds.y_max),
            heading: 0.0,
        })
    }

    /// 10 m x 10 m arena with no obstacles.
    pub fn empty_arena() -> Self {
        Self::new("empty", Rect::new(0.0, 0.0, 10.0, 10.0).unwrap(), Vec::new()).unwrap()
    }

    /// 10 m x 10 m arena with two parallel bars across the middle.
    pub fn parallel_bars() -> Self {
        let bars = vec![
            Rect::new(3.0, 3.4, 7.0, 3.8).unwrap(),
            Rect::new(3.0, 6.2, 7.0, 6.6).unwrap(),
        ];
        Self::new("bordered", Rect::new(0.0, 0.0, 10.0, 10.0).unwrap(), bars)
            .unwrap()
            .with_start(1.5, 5.0, 0.0)
    }

    /// 6 m x 6 m arena with scattered blocks.
    pub fn cluttered() -> Self {
        let blocks = vec![
            Rect::new(1.0, 1.0, 1.6, 1.6).unwrap(),
            Rect::new(2.6, 0.6, 3.2, 1.8).unwrap(),
            Rect::new(4.3, 1.2, 5.2, 1.7).unwrap(),
            Rect::new(0.8, 3.0, 1.8, 3.4).unwrap(),
            Rect::new(3.2, 3.3, 3.7, 4.5).unwrap(),
            Rect::new(4.6, 3.6, 5.4, 4.1).unwrap(),
            Rect::new(1.6, 4.6, 2.2, 5.4).unwrap(),
        ];
        Self::new("cluttered", Rect::new(0.0, 0.0, 6.0, 6.0).unwrap(), blocks)
            .unwrap()
            .with_start(2.3, 2.5, 0.3)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "empty" => Some(Self::empty_arena()),
            "bordered" => Some(Self::parallel_bars()),
            "cluttered" => Some(Self::cluttered()),
            _ => None,
        }
    }

    pub const BUILTIN_NAMES: [&'static str; 3] = ["empty", "bordered", "cluttered"];

    pub fn parse(text: &str) -> Result<Self> {
        let mut name = String::from("unnamed");
        let mut bounds = None;
        let mut obstacles = Vec::new();
        let mut start = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: line_no, msg };
            let mut tokens = line.split_whitespace();
            let keyword = tokens.next().unwrap();
            let rest: Vec<&str> = tokens.collect();
            let nums = |n: usize| -> Result<Vec<f64>> {
                if rest.len() != n {
                    return Err(bad(format!("{keyword} takes {n} values, got {}", rest.len())));
                }
                rest.iter()
                    .map(|t| t.parse::<f64>().map_err(|_| bad(format!("not a number: {t:?}"))))
                    .collect()
            };
            match keyword {
                "name" => {
                    if rest.len() != 1 {
                        return Err(bad("name takes a single token".into()));
                    }
                    name = rest[0].to_string();
                }
                "bounds" => {
                    if bounds.is_some() {
                        return Err(bad("duplicate bounds".into()));
                    }
                    let v = nums(4)?;
                    bounds = Some(Rect::new(v[0], v[1], v[2], v[3]).map_err(|e| bad(e.to_string()))?);
                }
                "rect" => {
                    let v = nums(4)?;
                    obstacles.push(Rect::new(v[0], v[1], v[2], v[3]).map_err(|e| bad(e.to_string()))?);
                }
                "start" => {
                    let v = nums(3)?;
                    start = Some(StartPose {
                        x: v[0],
                        y: v[1],
                        heading: v[2],
                    });
                }
                other => return Err(bad(format!("unknown directive {other:?}"))),
            }
        }
        let bounds = bounds.ok_or_else(|| Error::Parse {
            line: text.lines().count().max(1),
            msg: "missing bounds".into(),
        })?;
        let mut map = Self::new(name, bounds, obstacles)?;
        map.start = start;
        Ok(map)
    }
}

impl fmt::Display for WorldMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = |r: &Rect| {
            [r.x_min, r.y_min, r.x_max, r.y_max]
                .map(format_float)
                .join(" ")
        };
        writeln!(f, "name {}", self.name)?;
        writeln!(f, "bounds {}", r(&self.bounds))?;
        for o in &self.obstacles {
            writeln!(f, "rect {}", r(o))?;
        }
        if let Some(s) = self.start {
            writeln!(f, "start {} {} {}", format_float(s.x), format_float(s.y), format_float(s.heading))?;
        }
        Ok(())
    }
}
