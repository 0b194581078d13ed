//! Embedded datasets, CSV input/output and the binary weights format.

mod csv;
mod fixtures;
mod weights;

pub use self::csv::{load_dataset_csv, parse_dataset_csv, save_dataset_csv, write_dataset_csv};
pub use fixtures::{fixture, lint_dataset, Fixture, LintWarning, SENSOR_RANGE_M};
pub use weights::{read_weights, write_weights, WeightsFile, MAGIC, VERSION};

use std::fs;
use std::io::Write;
use std::path::Path;

/// Formats a float with 17 significant digits in positional notation, which
/// round-trips every binary32 (and binary64) value.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (16 - exp).clamp(0, 64) as usize;
    format!("{v:.decimals$}")
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(format_float(0.5), "0.50000000000000000");
        assert_eq!(format_float(10.0), "10.000000000000000");
        assert_eq!(format_float(-2.5), "-2.5000000000000000");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(0.1f32 as f64), "0.10000000149011612");
    }

    #[test]
    fn float_format_round_trips_f32() {
        for v in [0.1f32, -3.3e-7, 1.0e20, 123456.79, f32::MIN_POSITIVE, 0.99999994] {
            let s = format_float(v as f64);
            assert_eq!(s.parse::<f32>().unwrap(), v, "{s}");
        }
    }
}
