//! CSV formats: per-step trajectory logs and the labeled-sample manifest.
//!
//! Floats are written with the shortest round-trip representation, so
//! parsing a written file reproduces the values bit for bit.

use thiserror::Error;

use crate::control::CommandSource;
use crate::fallback::{LabeledSample, ViewClass};
use crate::sim::StepRecord;

pub const EPISODE_CSV_HEADER: &str = "t,x,y,theta,v,omega,source,d";
pub const MANIFEST_CSV_HEADER: &str = "path,label,offset_px,sharpness,timestamp";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CsvError {
    #[error("missing or wrong header, expected '{expected}'")]
    BadHeader { expected: &'static str },
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: field '{field}' is invalid")]
    BadField { line: usize, field: &'static str },
}

fn parse_source(s: &str) -> Option<CommandSource> {
    match s {
        "Depth" => Some(CommandSource::Depth),
        "Fallback" => Some(CommandSource::Fallback),
        "EmergencyStop" => Some(CommandSource::EmergencyStop),
        _ => None,
    }
}

/// Writes the per-step log with header `t,x,y,theta,v,omega,source,d`; an
/// absent lateral offset leaves the last field empty.
pub fn write_episode_csv(steps: &[StepRecord]) -> String {
    let mut out = String::from(EPISODE_CSV_HEADER);
    out.push('\n');
    for s in steps {
        let d = s.offset.map(|d| d.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            s.t,
            s.x,
            s.y,
            s.theta,
            s.linear,
            s.angular,
            s.source.as_str(),
            d
        ));
    }
    out
}

pub fn read_episode_csv(text: &str) -> Result<Vec<StepRecord>, CsvError> {
    let mut lines = text.lines();
    if lines.next() != Some(EPISODE_CSV_HEADER) {
        return Err(CsvError::BadHeader {
            expected: EPISODE_CSV_HEADER,
        });
    }
    let mut steps = Vec::new();
    for (idx, raw) in lines.enumerate() {
        let line = idx + 2;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 8 {
            return Err(CsvError::FieldCount {
                line,
                expected: 8,
                found: fields.len(),
            });
        }
        let num = |i: usize, name: &'static str| -> Result<f64, CsvError> {
            fields[i]
                .parse()
                .map_err(|_| CsvError::BadField { line, field: name })
        };
        let source = parse_source(fields[6]).ok_or(CsvError::BadField {
            line,
            field: "source",
        })?;
        let offset = if fields[7].is_empty() {
            None
        } else {
            Some(num(7, "d")?)
        };
        steps.push(StepRecord {
            t: num(0, "t")?,
            x: num(1, "x")?,
            y: num(2, "y")?,
            theta: num(3, "theta")?,
            linear: num(4, "v")?,
            angular: num(5, "omega")?,
            source,
            offset,
        });
    }
    Ok(steps)
}

/// Writes the labeled-sample manifest with header
/// `path,label,offset_px,sharpness,timestamp`.
pub fn write_manifest_csv(samples: &[LabeledSample]) -> String {
    let mut out = String::from(MANIFEST_CSV_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.path,
            s.label.as_str(),
            s.offset_px,
            s.sharpness,
            s.timestamp
        ));
    }
    out
}

pub fn read_manifest_csv(text: &str) -> Result<Vec<LabeledSample>, CsvError> {
    let mut lines = text.lines();
    if lines.next() != Some(MANIFEST_CSV_HEADER) {
        return Err(CsvError::BadHeader {
            expected: MANIFEST_CSV_HEADER,
        });
    }
    let mut samples = Vec::new();
    for (idx, raw) in lines.enumerate() {
        let line = idx + 2;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 5 {
            return Err(CsvError::FieldCount {
                line,
                expected: 5,
                found: fields.len(),
            });
        }
        let num = |i: usize, name: &'static str| -> Result<f64, CsvError> {
            fields[i]
                .parse()
                .map_err(|_| CsvError::BadField { line, field: name })
        };
        let label = ViewClass::parse(fields[1]).ok_or(CsvError::BadField {
            line,
            field: "label",
        })?;
        samples.push(LabeledSample {
            path: fields[0].to_string(),
            label,
            offset_px: num(2, "offset_px")?,
            sharpness: num(3, "sharpness")?,
            timestamp: num(4, "timestamp")?,
        });
    }
    Ok(samples)
}
