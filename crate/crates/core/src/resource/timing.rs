//! Per-module timing samples, their CSV form and the reference measurement table.

use std::fmt;
use std::str::FromStr;

use crate::data::format_float;
use crate::error::{Error, Result};
use crate::resource::fit::{fit_linear, LinearFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModuleTag {
    /// Feedforward of the hidden layer.
    Ffm1,
    /// Feedforward of the output layer.
    Ffm2,
    /// Output error.
    Em,
    /// Update of the output layer.
    Bpm1,
    /// Update of the hidden layer, including the back-projected gradient.
    Bpm2,
}

impl ModuleTag {
    pub const ALL: [ModuleTag; 5] = [
        ModuleTag::Ffm1,
        ModuleTag::Ffm2,
        ModuleTag::Em,
        ModuleTag::Bpm1,
        ModuleTag::Bpm2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModuleTag::Ffm1 => "FFM-1",
            ModuleTag::Ffm2 => "FFM-2",
            ModuleTag::Em => "EM",
            ModuleTag::Bpm1 => "BPM-1",
            ModuleTag::Bpm2 => "BPM-2",
        }
    }
}

impl fmt::Display for ModuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModuleTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| *c != '-' && *c != '_').collect();
        match key.to_ascii_lowercase().as_str() {
            "ffm1" => Ok(ModuleTag::Ffm1),
            "ffm2" => Ok(ModuleTag::Ffm2),
            "em" => Ok(ModuleTag::Em),
            "bpm1" => Ok(ModuleTag::Bpm1),
            "bpm2" => Ok(ModuleTag::Bpm2),
            _ => Err(Error::Config(format!("unknown module tag {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingSample {
    pub module: ModuleTag,
    pub h1: usize,
    /// Median over `trials`, in milliseconds.
    pub duration_ms: f64,
    pub trials: usize,
}

pub const TIMING_CSV_HEADER: &str = "module,h1,duration_ms,trials";

pub fn timing_csv(samples: &[TimingSample]) -> String {
    let mut out = String::from(TIMING_CSV_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.module,
            s.h1,
            format_float(s.duration_ms),
            s.trials
        ));
    }
    out
}

pub fn parse_timing_csv(text: &str) -> Result<Vec<TimingSample>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == TIMING_CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header {TIMING_CSV_HEADER:?}"),
            })
        }
    }
    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: line_no, msg };
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 4 {
            return Err(bad(format!("expected 4 fields, got {}", cells.len())));
        }
        let module = cells[0].parse().map_err(|e: Error| bad(e.to_string()))?;
        let h1 = cells[1].parse().map_err(|_| bad(format!("bad h1 {:?}", cells[1])))?;
        let duration_ms: f64 = cells[2]
            .parse()
            .map_err(|_| bad(format!("bad duration {:?}", cells[2])))?;
        let trials: usize = cells[3].parse().map_err(|_| bad(format!("bad trials {:?}", cells[3])))?;
        if !(duration_ms > 0.0) || trials == 0 {
            return Err(bad("duration must be > 0 and trials >= 1".into()));
        }
        samples.push(TimingSample {
            module,
            h1,
            duration_ms,
            trials,
        });
    }
    Ok(samples)
}

/// Samples of one module as `(h1, ms)` points.
pub fn points(samples: &[TimingSample], module: ModuleTag) -> Vec<(f64, f64)> {
    samples
        .iter()
        .filter(|s| s.module == module)
        .map(|s| (s.h1 as f64, s.duration_ms))
        .collect()
}

pub fn fit_module(samples: &[TimingSample], module: ModuleTag) -> Result<LinearFit> {
    fit_linear(&points(samples, module))
}

/// Oscilloscope measurements on an ATmega2560 at 16 MHz, XOR network
/// (P = 2, M = 1, ℕ = 4), in milliseconds.
const REFERENCE_TABLE: &str = "\
h1,ffm1,ffm2,em,bpm1,bpm2
2,0.59,0.31,0.06,0.46,1.30
4,4.28,0.61,0.06,0.66,2.23
6,6.21,0.77,0.06,0.88,3.22
8,8.11,1.00,0.06,1.11,4.11
10,10.50,1.82,0.06,1.70,6.14
12,12.30,2.02,0.06,1.91,6.90
14,14.50,1.49,0.06,1.80,7.06
16,16.30,1.72,0.06,2.03,8.02
18,18.60,2.57,0.06,2.65,10.60
20,20.70,2.71,0.06,2.47,11.20
22,22.60,2.95,0.06,3.07,12.40
24,25.20,3.15,0.06,3.36,13.60
26,27.30,3.31,0.06,3.71,14.70
28,29.30,3.51,0.06,3.95,16.50
30,30.90,3.67,0.06,4.03,16.20
32,32.90,3.76,0.06,3.83,15.80
34,34.60,3.36,0.06,4.05,16.70
36,36.50,4.22,0.06,4.82,19.40
38,38.50,4.41,0.06,5.17,21.80
";

/// CRC-32 of [`REFERENCE_TABLE`].
const REFERENCE_TABLE_CRC: u32 = 0xccfd_e142;

pub fn load_paper_timing_fixture() -> Result<Vec<TimingSample>> {
    parse_reference_table(REFERENCE_TABLE, REFERENCE_TABLE_CRC)
}

/// Parses the wide `h1,ffm1,ffm2,em,bpm1,bpm2` table after checking its CRC-32.
pub fn parse_reference_table(text: &str, expected_crc: u32) -> Result<Vec<TimingSample>> {
    let crc = crc32fast::hash(text.as_bytes());
    if crc != expected_crc {
        return Err(Error::Integrity(format!(
            "timing fixture checksum {crc:08x} != {expected_crc:08x}"
        )));
    }
    let mut samples = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let bad = || Error::Integrity(format!("malformed fixture row {}", idx + 1));
        if cells.len() != 6 {
            return Err(bad());
        }
        let h1: usize = cells[0].parse().map_err(|_| bad())?;
        for (tag, cell) in ModuleTag::ALL.iter().zip(&cells[1..]) {
            samples.push(TimingSample {
                module: *tag,
                h1,
                duration_ms: cell.parse().map_err(|_| bad())?,
                trials: 1,
            });
        }
    }
    Ok(samples)
}

/// A cost law as printed alongside the reference table: `t(H) = slope·H + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedLaw {
    pub module: ModuleTag,
    pub slope: f64,
    pub intercept: f64,
}

pub const PRINTED_LAWS: [PrintedLaw; 4] = [
    PrintedLaw { module: ModuleTag::Ffm1, slope: 11.6, intercept: 20.52 },
    PrintedLaw { module: ModuleTag::Ffm2, slope: 1.22, intercept: 2.49 },
    PrintedLaw { module: ModuleTag::Bpm1, slope: 1.41, intercept: 2.72 },
    PrintedLaw { module: ModuleTag::Bpm2, slope: 6.03, intercept: 10.94 },
];

/// Refit of one module next to its printed law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawComparison {
    pub printed: PrintedLaw,
    pub refit: LinearFit,
    /// Mean measured duration of the module over the table.
    pub column_mean: f64,
    /// Printed slope differs from the refit by more than 10 %.
    pub slope_mismatch: bool,
    /// Printed intercept matches the column mean to its printed precision.
    pub intercept_is_mean: bool,
}

pub fn compare_printed_laws(samples: &[TimingSample]) -> Result<Vec<LawComparison>> {
    PRINTED_LAWS
        .iter()
        .map(|law| {
            let pts = points(samples, law.module);
            let refit = fit_linear(&pts)?;
            let column_mean = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
            Ok(LawComparison {
                printed: *law,
                refit,
                column_mean,
                slope_mismatch: (law.slope - refit.slope).abs() > 0.1 * refit.slope.abs(),
                intercept_is_mean: (law.intercept - column_mean).abs() < 0.005,
            })
        })
        .collect()
}
