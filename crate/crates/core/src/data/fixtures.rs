//! The four reference training sets, embedded verbatim and checksummed.
//!
//! Robot sets use inputs `(FS, RS, LS)` in meters and targets `(LW, RW)` wheel
//! speeds in rad/s.

use std::fmt;
use std::str::FromStr;

use crate::data::csv::parse_dataset_csv;
use crate::error::{Error, Result};
use crate::mlp::Dataset;

/// Proximity sensor range in meters.
pub const SENSOR_RANGE_M: f32 = 3.0;

const XOR: &str = "\
in1,in2,out1
0,0,0
0,1,1
1,0,1
1,1,0
";

const ROBOT1: &str = "\
in1,in2,in3,out1,out2
0.00,0.00,0.00,0.50,-0.50
0.00,0.00,1.00,-0.50,0.50
0.00,1.00,0.00,0.50,-0.50
0.00,1.00,1.00,0.50,-0.50
1.00,0.00,0.00,0.50,0.50
1.00,0.00,1.00,0.50,0.50
1.00,1.00,0.00,0.50,0.50
1.00,1.00,1.00,0.50,0.50
";

// Row 16 reads LS = 10.00, past the sensor range; kept as published.
const ROBOT2: &str = "\
in1,in2,in3,out1,out2
0.00,0.00,0.00,-0.20,0.20
1.00,0.00,0.00,-0.20,0.20
2.00,0.00,1.00,-0.20,0.20
0.00,1.00,1.00,0.10,0.10
1.00,1.00,2.00,0.20,-0.10
2.00,1.00,2.00,0.20,-0.10
0.00,2.00,0.00,0.50,0.50
1.00,2.00,0.00,0.50,0.50
2.00,2.00,1.00,0.50,0.50
0.00,0.00,1.00,0.20,0.20
1.00,0.00,2.00,0.20,-0.20
2.00,0.00,2.00,0.20,-0.20
0.00,1.00,0.00,0.10,0.10
1.00,1.00,0.00,0.10,0.10
2.00,1.00,1.00,-0.10,0.10
0.00,2.00,10.00,0.50,0.50
1.00,2.00,2.00,0.50,0.50
2.00,2.00,2.00,0.50,0.50
";

const ROBOT3: &str = "\
in1,in2,in3,out1,out2
0.50,0.50,0.50,0.30,0.30
0.50,0.50,1.00,0.20,-0.20
0.50,0.50,2.50,0.20,-0.20
0.50,1.00,0.50,0.30,0.30
0.50,1.00,1.00,0.20,-0.20
0.50,1.00,2.50,0.20,-0.20
0.50,2.50,0.50,0.30,0.30
0.50,2.50,1.00,0.30,0.30
0.50,2.50,2.50,0.30,0.30
1.00,0.50,0.50,-0.20,0.20
1.00,0.50,2.50,0.20,-0.20
1.00,1.00,0.50,-0.20,0.20
0.50,1.00,0.50,0.30,-0.30
1.00,1.00,1.00,0.30,0.30
1.00,1.00,2.50,0.20,-0.20
1.00,2.50,0.50,-0.20,0.20
1.00,2.50,1.00,0.30,0.30
1.00,2.50,2.50,0.20,-0.20
2.50,0.50,0.50,-0.20,0.20
2.50,0.50,1.00,-0.20,0.20
2.50,0.50,2.50,-0.20,0.20
2.50,1.00,0.50,-0.20,0.20
2.50,1.00,1.00,-0.20,0.20
2.50,1.00,2.50,0.20,-0.20
2.50,2.50,0.50,-0.20,0.20
2.50,2.50,1.00,-0.20,0.20
2.50,2.50,2.50,0.30,0.30
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    Xor,
    Robot1,
    Robot2,
    Robot3,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [Fixture::Xor, Fixture::Robot1, Fixture::Robot2, Fixture::Robot3];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Xor => "xor",
            Fixture::Robot1 => "robot1",
            Fixture::Robot2 => "robot2",
            Fixture::Robot3 => "robot3",
        }
    }

    /// The embedded CSV text.
    pub fn source(self) -> &'static str {
        match self {
            Fixture::Xor => XOR,
            Fixture::Robot1 => ROBOT1,
            Fixture::Robot2 => ROBOT2,
            Fixture::Robot3 => ROBOT3,
        }
    }

    fn crc(self) -> u32 {
        match self {
            Fixture::Xor => 0xc76f_f037,
            Fixture::Robot1 => 0x47ae_443a,
            Fixture::Robot2 => 0x1da7_7b5f,
            Fixture::Robot3 => 0x33b0_9a5e,
        }
    }

    pub fn dataset(self) -> Result<Dataset> {
        verify_and_parse(self.source(), self.crc(), self.name())
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown fixture {s:?} (expected xor, robot1, robot2 or robot3)")))
    }
}

fn verify_and_parse(text: &str, expected: u32, name: &str) -> Result<Dataset> {
    let crc = crc32fast::hash(text.as_bytes());
    if crc != expected {
        return Err(Error::Integrity(format!(
            "fixture {name}: checksum {crc:08x} != {expected:08x}"
        )));
    }
    parse_dataset_csv(text)
}

/// Shorthand for [`Fixture::dataset`].
pub fn fixture(f: Fixture) -> Result<Dataset> {
    f.dataset()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LintWarning {
    /// 1-based sample index.
    pub sample: usize,
    /// 1-based input column.
    pub input: usize,
    pub value: f32,
}

impl fmt::Display for LintWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sample {} input {}: {} outside sensor range [0, {}]",
            self.sample, self.input, self.value, SENSOR_RANGE_M
        )
    }
}

/// Flags inputs outside `[0, max_range]`. Never modifies the data.
pub fn lint_dataset(data: &Dataset, max_range: f32) -> Vec<LintWarning> {
    let mut out = Vec::new();
    for s in 0..data.len() {
        for i in 0..data.input_width() {
            let v = data.inputs.get(i, s);
            if !(0.0..=max_range).contains(&v) {
                out.push(LintWarning {
                    sample: s + 1,
                    input: i + 1,
                    value: v,
                });
            }
        }
    }
    out
}
