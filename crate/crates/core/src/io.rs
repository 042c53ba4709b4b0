//! CSV (RFC 4180, decimal-17) and JSON serialization.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Field, LatticeWindow, Site, MAX_DIM};

/// 17 significant digits: enough for an exact f64 round trip.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Write an RFC 4180 table (CRLF line ends) with a header row.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)
        .map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `t, j1[, j2, j3], re, im`, one row per window site.
pub fn field_to_csv_string(f: &Field) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(vec![]);
    let d = f.window().dim();
    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|k| format!("j{k}")));
    header.push("re".into());
    header.push("im".into());
    w.write_record(&header).map_err(csv_err)?;
    for (i, v) in f.values().iter().enumerate() {
        let s = f.window().site(i);
        let mut row = vec![fmt_f64(f.time())];
        row.extend(s[..d].iter().map(|c| c.to_string()));
        row.push(fmt_f64(v.re));
        row.push(fmt_f64(v.im));
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Inverse of [`field_to_csv_string`]; the window is the bounding box of
/// the listed sites, and unlisted sites are zero.
pub fn field_from_csv_str(text: &str) -> Result<Field> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_err)?.clone();
    let d = header.len().checked_sub(3).filter(|d| (1..=MAX_DIM).contains(d)).ok_or_else(|| {
        Error::Io(format!("expected columns t, j1..jd, re, im; got {}", header.len()))
    })?;
    let mut rows: Vec<(Site, Complex64)> = Vec::new();
    let mut time = 0.0;
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Io(format!("{s:?}: {e}")));
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        time = parse(&rec[0])?;
        let mut s = [0i64; MAX_DIM];
        for k in 0..d {
            s[k] = rec[1 + k].trim().parse().map_err(|e| Error::Io(format!("site: {e}")))?;
        }
        rows.push((s, Complex64::new(parse(&rec[1 + d])?, parse(&rec[2 + d])?)));
    }
    let radius: Vec<usize> = (0..d)
        .map(|k| rows.iter().map(|(s, _)| s[k].unsigned_abs() as usize).max().unwrap_or(0))
        .collect();
    let window = LatticeWindow::new(radius)?;
    let mut values = vec![Complex64::new(0.0, 0.0); window.len()];
    for (s, v) in rows {
        let i = window.index(&s).ok_or_else(|| Error::Io("site outside bounding box".into()))?;
        values[i] = v;
    }
    Field::from_values(window, values, time)
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    radius: Vec<usize>,
    time: f64,
    /// [re, im] per site in window order (last axis fastest).
    values: Vec<[f64; 2]>,
}

pub fn field_to_json_string(f: &Field) -> Result<String> {
    let j = FieldJson {
        radius: f.window().radius().to_vec(),
        time: f.time(),
        values: f.values().iter().map(|v| [v.re, v.im]).collect(),
    };
    serde_json::to_string(&j).map_err(|e| Error::Io(e.to_string()))
}

pub fn field_from_json_str(text: &str) -> Result<Field> {
    let j: FieldJson = serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))?;
    let window = LatticeWindow::new(j.radius)?;
    let values = j.values.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
    Field::from_values(window, values, j.time)
}

pub fn write_field_csv(path: &Path, f: &Field) -> Result<()> {
    std::fs::write(path, field_to_csv_string(f)?)?;
    Ok(())
}

pub fn read_field_csv(path: &Path) -> Result<Field> {
    field_from_csv_str(&std::fs::read_to_string(path)?)
}

pub fn write_field_json(path: &Path, f: &Field) -> Result<()> {
    std::fs::write(path, field_to_json_string(f)?)?;
    Ok(())
}

pub fn read_field_json(path: &Path) -> Result<Field> {
    field_from_json_str(&std::fs::read_to_string(path)?)
}
