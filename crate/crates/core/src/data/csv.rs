//! Dataset CSV: header `in1..inP,out1..outM`, one sample per line.

use std::fs;
use std::path::Path;

use crate::data::{format_float, write_atomic};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::mlp::Dataset;

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let bad = |msg: String| Error::Parse { line: 1, msg };
    let cells: Vec<&str> = line.split(',').map(str::trim).collect();
    let inputs = cells.iter().take_while(|c| c.starts_with("in")).count();
    let outputs = cells.len() - inputs;
    if inputs == 0 || outputs == 0 {
        return Err(bad(format!("expected in1..inP,out1..outM header, got {line:?}")));
    }
    for (i, c) in cells[..inputs].iter().enumerate() {
        if *c != format!("in{}", i + 1) {
            return Err(bad(format!("column {} should be in{}, got {c:?}", i + 1, i + 1)));
        }
    }
    for (j, c) in cells[inputs..].iter().enumerate() {
        if *c != format!("out{}", j + 1) {
            return Err(bad(format!(
                "column {} should be out{}, got {c:?}",
                inputs + j + 1,
                j + 1
            )));
        }
    }
    Ok((inputs, outputs))
}

pub fn parse_dataset_csv(text: &str) -> Result<Dataset> {
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, h)) if !h.trim().is_empty() => h,
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing header".into(),
            })
        }
    };
    let (p, m) = parse_header(header)?;
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != p + m {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {} fields, got {}", p + m, cells.len()),
            });
        }
        let mut row = Vec::with_capacity(p + m);
        for c in cells {
            let v: f32 = c.parse().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("not a number: {c:?}"),
            })?;
            row.push(v);
        }
        outs.push(row.split_off(p));
        ins.push(row);
    }
    if ins.is_empty() {
        return Err(Error::Parse {
            line: 2,
            msg: "no samples".into(),
        });
    }
    Dataset::new(Matrix::from_rows(&ins)?.transpose(), Matrix::from_rows(&outs)?.transpose())
}

pub fn write_dataset_csv(data: &Dataset) -> String {
    let header: Vec<String> = (1..=data.input_width())
        .map(|i| format!("in{i}"))
        .chain((1..=data.target_width()).map(|j| format!("out{j}")))
        .collect();
    let mut out = header.join(",");
    out.push('\n');
    for s in 0..data.len() {
        let row: Vec<String> = data
            .inputs
            .column(s)
            .into_iter()
            .chain(data.targets.column(s))
            .map(|v| format_float(v as f64))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn load_dataset_csv(path: &Path) -> Result<Dataset> {
    parse_dataset_csv(&fs::read_to_string(path)?)
}

pub fn save_dataset_csv(path: &Path, data: &Dataset) -> Result<()> {
    write_atomic(path, write_dataset_csv(data).as_bytes())?;
    Ok(())
}
