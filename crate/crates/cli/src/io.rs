//! Flat-CSV ingestion and emission.
//!
//! Fingerprint schema: `loc_id,x_m,y_m,rss_0,...,rss_{M-1}`; test schema:
//! `x_m,y_m,rss_0,...`. RSS values are raw dBm; a missing reading is an
//! empty field. Loaded vectors are preprocessed and normalized according to
//! the configured policy and floor, so both matchers see identical inputs.

use std::fs;
use std::path::Path;

use qloc_core::{
    normalize, preprocess_rss, Fingerprint, FingerprintRow, LocationId, PreprocessPolicy, RssVector,
};

use crate::error::HarnessError;

/// dBm-to-amplitude mapping configuration shared by every loader.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreprocessConfig {
    pub policy: PreprocessPolicy,
    pub floor_dbm: f64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            policy: PreprocessPolicy::MinShift,
            floor_dbm: -110.0,
        }
    }
}

/// One fingerprint CSV row before preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFingerprintRow {
    pub loc_id: u32,
    pub x_m: f64,
    pub y_m: f64,
    pub rss_dbm: Vec<Option<f64>>,
}

/// One test CSV row before preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTestRow {
    pub x_m: f64,
    pub y_m: f64,
    pub rss_dbm: Vec<Option<f64>>,
}

/// A test sample ready for matching: true coordinates plus the normalized
/// RSS vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSample {
    pub x_m: f64,
    pub y_m: f64,
    pub rss: RssVector,
}

fn parse_error(path: &Path, line: usize, message: String) -> HarnessError {
    HarnessError::Parse {
        path: path.display().to_string(),
        line,
        message,
    }
}

fn split_header(header: &str) -> Vec<&str> {
    header
        .trim_end_matches('\r')
        .split(',')
        .map(str::trim)
        .collect()
}

fn check_rss_names(fields: &[&str], from: usize) -> Result<usize, String> {
    let rss = &fields[from..];
    if rss.is_empty() {
        return Err("header declares no rss_* columns".to_string());
    }
    for (k, name) in rss.iter().enumerate() {
        let expected = format!("rss_{k}");
        if *name != expected {
            return Err(format!("expected column '{expected}', found '{name}'"));
        }
    }
    Ok(rss.len())
}

fn parse_f64(field: &str, what: &str) -> Result<f64, String> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("bad {what} value '{field}'"))
}

fn parse_rss_fields(fields: &[&str]) -> Result<Vec<Option<f64>>, String> {
    fields
        .iter()
        .map(|f| {
            let f = f.trim();
            if f.is_empty() {
                Ok(None)
            } else {
                f.parse::<f64>()
                    .map(Some)
                    .map_err(|_| format!("bad rss value '{f}'"))
            }
        })
        .collect()
}

/// Preprocess + normalize one raw vector; `line` feeds error reporting.
fn prepare_vector(
    rss_dbm: &[Option<f64>],
    cfg: &PreprocessConfig,
) -> Result<RssVector, qloc_core::Error> {
    let raw = RssVector::raw_with_missing(rss_dbm.to_vec());
    let pre = preprocess_rss(&raw, cfg.policy, cfg.floor_dbm)?;
    normalize(&pre)
}

/// Build a fingerprint from raw rows; shared by the CSV loader and the
/// synthetic generator so both paths preprocess identically.
pub fn fingerprint_from_raw(
    rows: &[RawFingerprintRow],
    cfg: &PreprocessConfig,
) -> Result<Fingerprint, HarnessError> {
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let rss = prepare_vector(&row.rss_dbm, cfg).map_err(|e| HarnessError::Sample {
            index: i,
            source: e,
        })?;
        out.push(FingerprintRow {
            location: LocationId(row.loc_id),
            x_m: row.x_m,
            y_m: row.y_m,
            rss,
        });
    }
    Ok(Fingerprint::new(out)?)
}

/// Build test samples from raw rows.
pub fn tests_from_raw(
    rows: &[RawTestRow],
    cfg: &PreprocessConfig,
) -> Result<Vec<TestSample>, HarnessError> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let rss = prepare_vector(&row.rss_dbm, cfg).map_err(|e| HarnessError::Sample {
                index: i,
                source: e,
            })?;
            Ok(TestSample {
                x_m: row.x_m,
                y_m: row.y_m,
                rss,
            })
        })
        .collect()
}

/// Load and prepare a fingerprint CSV.
pub fn load_fingerprint(path: &Path, cfg: &PreprocessConfig) -> Result<Fingerprint, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| HarnessError::Schema(format!("{}: empty file", path.display())))?;
    let fields = split_header(header);
    if fields.len() < 4 || fields[0] != "loc_id" || fields[1] != "x_m" || fields[2] != "y_m" {
        return Err(HarnessError::Schema(format!(
            "{}: fingerprint header must start with loc_id,x_m,y_m,rss_0",
            path.display()
        )));
    }
    let rp_count = check_rss_names(&fields, 3).map_err(|m| parse_error(path, 1, m))?;

    let mut rows = Vec::new();
    for (idx, raw_line) in lines {
        let line_no = idx + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 + rp_count {
            return Err(parse_error(
                path,
                line_no,
                format!("expected {} fields, found {}", 3 + rp_count, fields.len()),
            ));
        }
        let loc_id: u32 = fields[0]
            .trim()
            .parse()
            .map_err(|_| parse_error(path, line_no, format!("bad loc_id '{}'", fields[0])))?;
        let x_m = parse_f64(fields[1], "x_m").map_err(|m| parse_error(path, line_no, m))?;
        let y_m = parse_f64(fields[2], "y_m").map_err(|m| parse_error(path, line_no, m))?;
        let rss_dbm = parse_rss_fields(&fields[3..]).map_err(|m| parse_error(path, line_no, m))?;
        if rss_dbm.iter().all(Option::is_none) {
            return Err(parse_error(
                path,
                line_no,
                "row rejected: all RSS readings missing".to_string(),
            ));
        }
        rows.push(RawFingerprintRow {
            loc_id,
            x_m,
            y_m,
            rss_dbm,
        });
    }
    if rows.is_empty() {
        return Err(HarnessError::Schema(format!(
            "{}: no fingerprint rows",
            path.display()
        )));
    }
    fingerprint_from_raw(&rows, cfg)
}

/// Load and prepare a test-set CSV.
pub fn load_tests(path: &Path, cfg: &PreprocessConfig) -> Result<Vec<TestSample>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| HarnessError::Schema(format!("{}: empty file", path.display())))?;
    let fields = split_header(header);
    if fields.len() < 3 || fields[0] != "x_m" || fields[1] != "y_m" {
        return Err(HarnessError::Schema(format!(
            "{}: test header must start with x_m,y_m,rss_0",
            path.display()
        )));
    }
    let rp_count = check_rss_names(&fields, 2).map_err(|m| parse_error(path, 1, m))?;

    let mut rows = Vec::new();
    for (idx, raw_line) in lines {
        let line_no = idx + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 + rp_count {
            return Err(parse_error(
                path,
                line_no,
                format!("expected {} fields, found {}", 2 + rp_count, fields.len()),
            ));
        }
        let x_m = parse_f64(fields[0], "x_m").map_err(|m| parse_error(path, line_no, m))?;
        let y_m = parse_f64(fields[1], "y_m").map_err(|m| parse_error(path, line_no, m))?;
        let rss_dbm = parse_rss_fields(&fields[2..]).map_err(|m| parse_error(path, line_no, m))?;
        if rss_dbm.iter().all(Option::is_none) {
            return Err(parse_error(
                path,
                line_no,
                "row rejected: all RSS readings missing".to_string(),
            ));
        }
        rows.push(RawTestRow { x_m, y_m, rss_dbm });
    }
    if rows.is_empty() {
        return Err(HarnessError::Schema(format!(
            "{}: no test rows",
            path.display()
        )));
    }
    tests_from_raw(&rows, cfg)
}

fn rss_field(v: &Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

pub fn write_fingerprint_csv(path: &Path, rows: &[RawFingerprintRow]) -> Result<(), HarnessError> {
    let rp_count = rows.first().map_or(0, |r| r.rss_dbm.len());
    let mut text = String::from("loc_id,x_m,y_m");
    for k in 0..rp_count {
        text.push_str(&format!(",rss_{k}"));
    }
    text.push('\n');
    for row in rows {
        text.push_str(&format!("{},{},{}", row.loc_id, row.x_m, row.y_m));
        for v in &row.rss_dbm {
            text.push(',');
            text.push_str(&rss_field(v));
        }
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

pub fn write_tests_csv(path: &Path, rows: &[RawTestRow]) -> Result<(), HarnessError> {
    let rp_count = rows.first().map_or(0, |r| r.rss_dbm.len());
    let mut text = String::from("x_m,y_m");
    for k in 0..rp_count {
        text.push_str(&format!(",rss_{k}"));
    }
    text.push('\n');
    for row in rows {
        text.push_str(&format!("{},{}", row.x_m, row.y_m));
        for v in &row.rss_dbm {
            text.push(',');
            text.push_str(&rss_field(v));
        }
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}
