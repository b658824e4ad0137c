//! CSV emission and parsing with reproducible number formatting.

use crate::error::{Error, Result};
use crate::sim::{SweepRow, Trajectory};

/// Formats a float to at most `sig` significant digits, then re-renders
/// the rounded value in its shortest decimal form, so emitted files are
/// identical across runs and platforms and re-parse to the same double.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{:.*e}", sig - 1, x).parse().unwrap();
    format!("{rounded}")
}

/// Nine significant digits, the repository-wide file precision.
pub fn fmt9(x: f64) -> String {
    fmt_sig(x, 9)
}

pub const TRAJECTORY_HEADER: &str =
    "time_s,phase,rear_x_mm,rear_y_mm,front_x_mm,front_y_mm,heading_deg,front_tile,rear_tile";

pub fn write_trajectory_csv(trajectory: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * (trajectory.samples.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for s in &trajectory.samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt9(s.time_s),
            s.phase.as_str(),
            fmt9(s.rear_mm.x),
            fmt9(s.rear_mm.y),
            fmt9(s.front_mm.x),
            fmt9(s.front_mm.y),
            fmt9(s.heading_deg),
            s.front_tile,
            s.rear_tile,
        ));
    }
    out
}

pub const SWEEP_HEADER: &str = "groove_angle_deg,final_heading_deg,cycles_to_half_alignment";

pub fn write_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let half = row
            .cycles_to_half_alignment
            .map(|c| c.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{half}\n",
            fmt9(row.angle_deg),
            fmt9(row.final_heading_deg)
        ));
    }
    out
}

pub const OBSERVATION_HEADER: &str = "time_s,heading_deg";

/// Parses `time_s,heading_deg` observation rows.
pub fn parse_observation_csv(path: &str, source: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = source.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == OBSERVATION_HEADER => {}
        _ => {
            return Err(parse_err(
                path,
                1,
                format!("expected header `{OBSERVATION_HEADER}`"),
            ));
        }
    }
    let mut points = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let text = line.trim_end();
        if text.is_empty() {
            continue;
        }
        let Some((t, h)) = text.split_once(',') else {
            return Err(parse_err(path, line_no, "expected two comma-separated fields"));
        };
        let t: f64 = t
            .trim()
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("`{}` is not a number", t.trim())))?;
        let h: f64 = h
            .trim()
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("`{}` is not a number", h.trim())))?;
        points.push((t, h));
    }
    Ok(points)
}

pub fn write_observation_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::new();
    out.push_str(OBSERVATION_HEADER);
    out.push('\n');
    for (t, h) in points {
        out.push_str(&format!("{},{}\n", fmt9(*t), fmt9(*h)));
    }
    out
}

/// The columns of a trajectory CSV row that plotting needs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub time_s: f64,
    pub heading_deg: f64,
    pub front_tile: String,
    pub rear_tile: String,
}

pub fn parse_trajectory_csv(path: &str, source: &str) -> Result<Vec<TrajectoryRow>> {
    let mut lines = source.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == TRAJECTORY_HEADER => {}
        _ => {
            return Err(parse_err(
                path,
                1,
                format!("expected header `{TRAJECTORY_HEADER}`"),
            ));
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let text = line.trim_end();
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        if fields.len() != 9 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 9 fields, found {}", fields.len()),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .trim()
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("`{}` is not a number", fields[i])))
        };
        rows.push(TrajectoryRow {
            time_s: num(0)?,
            heading_deg: num(6)?,
            front_tile: fields[7].trim().to_string(),
            rear_tile: fields[8].trim().to_string(),
        });
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "no data rows"));
    }
    Ok(rows)
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}
