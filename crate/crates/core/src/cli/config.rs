//! Loaders for the tool's text input files.
//!
//! All inputs share one small line-oriented dialect: `[section]` headers,
//! `[[section]]` for repeatable sections, `key = value` entries, and `#`
//! comments. Values are numbers, booleans, double-quoted strings, or
//! flat numeric arrays. Every diagnostic carries the offending line
//! number, unknown sections and keys are rejected, and omitted keys with
//! defaults are reported as notes so a run documents what it assumed.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fit::FreeParam;
use crate::gait::GaitParams;
use crate::geom::Vec2;
use crate::plan::{PathTarget, PlannedTile, TilePalette};
use crate::sim::Scenario;
use crate::substrate::{GrooveSpec, SubstrateTile, WorldMap};

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Number(f64),
    Bool(bool),
    Text(String),
    Array(Vec<f64>),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Number(_) => "a number",
            Value::Bool(_) => "a boolean",
            Value::Text(_) => "a string",
            Value::Array(_) => "an array",
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    key: String,
    line: usize,
    value: Value,
}

#[derive(Debug, Clone)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

fn parse_err(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// Strips a trailing comment, leaving quoted strings intact.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_value(path: &str, line: usize, raw: &str) -> Result<Value> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(parse_err(path, line, "missing value"));
    }
    if raw == "true" {
        return Ok(Value::Bool(true));
    }
    if raw == "false" {
        return Ok(Value::Bool(false));
    }
    if let Some(body) = raw.strip_prefix('"') {
        let Some(body) = body.strip_suffix('"') else {
            return Err(parse_err(path, line, "unterminated string"));
        };
        if body.contains('"') {
            return Err(parse_err(path, line, "stray quote inside string"));
        }
        return Ok(Value::Text(body.to_string()));
    }
    if let Some(body) = raw.strip_prefix('[') {
        let Some(body) = body.strip_suffix(']') else {
            return Err(parse_err(path, line, "unterminated array"));
        };
        let mut items = Vec::new();
        for piece in body.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                return Err(parse_err(path, line, "empty array element"));
            }
            let x: f64 = piece
                .parse()
                .map_err(|_| parse_err(path, line, format!("`{piece}` is not a number")))?;
            items.push(x);
        }
        if items.is_empty() {
            return Err(parse_err(path, line, "empty array"));
        }
        return Ok(Value::Array(items));
    }
    let x: f64 = raw
        .parse()
        .map_err(|_| parse_err(path, line, format!("`{raw}` is not a number")))?;
    Ok(Value::Number(x))
}

fn parse_document(path: &str, source: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw_line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let text = strip_comment(raw_line).trim();
        if text.is_empty() {
            continue;
        }
        if let Some(header) = text.strip_prefix("[[").and_then(|t| t.strip_suffix("]]")) {
            let name = header.trim();
            if !valid_name(name) {
                return Err(parse_err(path, line_no, format!("bad section name `{name}`")));
            }
            sections.push(Section {
                name: name.to_string(),
                line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        if let Some(header) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let name = header.trim();
            if !valid_name(name) {
                return Err(parse_err(path, line_no, format!("bad section name `{name}`")));
            }
            if sections.iter().any(|s| s.name == name) {
                return Err(parse_err(path, line_no, format!("duplicate section [{name}]")));
            }
            sections.push(Section {
                name: name.to_string(),
                line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let Some((key, value)) = text.split_once('=') else {
            return Err(parse_err(path, line_no, "expected `key = value` or a [section] header"));
        };
        let key = key.trim();
        if !valid_name(key) {
            return Err(parse_err(path, line_no, format!("bad key `{key}`")));
        }
        let Some(section) = sections.last_mut() else {
            return Err(parse_err(path, line_no, "entry before any [section] header"));
        };
        if section.entries.iter().any(|e| e.key == key) {
            return Err(parse_err(path, line_no, format!("duplicate key `{key}`")));
        }
        let value = parse_value(path, line_no, value)?;
        section.entries.push(Entry {
            key: key.to_string(),
            line: line_no,
            value,
        });
    }
    Ok(sections)
}

/// Typed, checked access to one section's entries. `finish` rejects any
/// key the loader did not consume.
struct Fields<'a> {
    path: &'a str,
    section: &'a Section,
    used: Vec<bool>,
}

impl<'a> Fields<'a> {
    fn new(path: &'a str, section: &'a Section) -> Self {
        Fields {
            path,
            section,
            used: vec![false; section.entries.len()],
        }
    }

    fn take(&mut self, key: &str) -> Option<&'a Entry> {
        for (i, e) in self.section.entries.iter().enumerate() {
            if e.key == key {
                self.used[i] = true;
                return Some(e);
            }
        }
        None
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => match e.value {
                Value::Number(x) => Ok(Some(x)),
                ref other => Err(parse_err(
                    self.path,
                    e.line,
                    format!("{key} must be a number, found {}", other.kind()),
                )),
            },
        }
    }

    fn boolean(&mut self, key: &str) -> Result<Option<bool>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => match e.value {
                Value::Bool(b) => Ok(Some(b)),
                ref other => Err(parse_err(
                    self.path,
                    e.line,
                    format!("{key} must be true or false, found {}", other.kind()),
                )),
            },
        }
    }

    fn text(&mut self, key: &str) -> Result<Option<&'a str>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => match e.value {
                Value::Text(ref s) => Ok(Some(s)),
                ref other => Err(parse_err(
                    self.path,
                    e.line,
                    format!("{key} must be a quoted string, found {}", other.kind()),
                )),
            },
        }
    }

    fn array(&mut self, key: &str) -> Result<Option<&'a [f64]>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => match e.value {
                Value::Array(ref xs) => Ok(Some(xs)),
                ref other => Err(parse_err(
                    self.path,
                    e.line,
                    format!("{key} must be an array, found {}", other.kind()),
                )),
            },
        }
    }

    fn pair(&mut self, key: &str) -> Result<Option<(f64, f64)>> {
        match self.array(key)? {
            None => Ok(None),
            Some([x, y]) => Ok(Some((*x, *y))),
            Some(other) => Err(parse_err(
                self.path,
                self.line_of(key),
                format!("{key} must be a two-element array, found {} elements", other.len()),
            )),
        }
    }

    fn integer(&mut self, key: &str) -> Result<Option<u64>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => match e.value {
                Value::Number(x) if x >= 0.0 && x.fract() == 0.0 && x <= 9.0e15 => Ok(Some(x as u64)),
                Value::Number(x) => Err(parse_err(
                    self.path,
                    e.line,
                    format!("{key} must be a non-negative integer, found {x}"),
                )),
                ref other => Err(parse_err(
                    self.path,
                    e.line,
                    format!("{key} must be a non-negative integer, found {}", other.kind()),
                )),
            },
        }
    }

    fn require_number(&mut self, key: &str) -> Result<f64> {
        self.number(key)?.ok_or_else(|| {
            parse_err(
                self.path,
                self.section.line,
                format!("[{}] is missing required key `{key}`", self.section.name),
            )
        })
    }

    fn line_of(&self, key: &str) -> usize {
        self.section
            .entries
            .iter()
            .find(|e| e.key == key)
            .map(|e| e.line)
            .unwrap_or(self.section.line)
    }

    fn finish(self) -> Result<()> {
        for (i, e) in self.section.entries.iter().enumerate() {
            if !self.used[i] {
                return Err(parse_err(
                    self.path,
                    e.line,
                    format!("unknown key `{}` in [{}]", e.key, self.section.name),
                ));
            }
        }
        Ok(())
    }
}

/// Rewrites a field-level invariant violation into a line-numbered
/// diagnostic pointing at the entry that set the value.
fn attach_line(err: Error, path: &str, section: &Section) -> Error {
    let Error::Invalid { field, message } = err else {
        return err;
    };
    let key = match field {
        "angle_deg" => "groove_angle_deg",
        other => other,
    };
    let line = section
        .entries
        .iter()
        .find(|e| e.key == key)
        .map(|e| e.line)
        .unwrap_or(section.line);
    parse_err(path, line, format!("{field}: {message}"))
}

/// A scenario plus the defaulting notes produced while loading it.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub notes: Vec<String>,
}

pub fn load_scenario(path: &Path) -> Result<LoadedScenario> {
    let source = read_input(path)?;
    scenario_from_str(&path.display().to_string(), &source)
}

pub fn scenario_from_str(path: &str, source: &str) -> Result<LoadedScenario> {
    let sections = parse_document(path, source)?;
    for s in &sections {
        if !matches!(s.name.as_str(), "gait" | "tiles" | "initial" | "run" | "background") {
            return Err(parse_err(path, s.line, format!("unknown section [{}]", s.name)));
        }
    }
    scenario_from_sections(path, &sections)
}

fn scenario_from_sections(path: &str, sections: &[Section]) -> Result<LoadedScenario> {
    let mut notes = Vec::new();
    let empty = Section {
        name: String::new(),
        line: 0,
        entries: Vec::new(),
    };

    let gait_section = sections.iter().find(|s| s.name == "gait").unwrap_or(&empty);
    let params = load_gait(path, gait_section, &mut notes)?;

    let mut tiles = Vec::new();
    for (index, section) in sections.iter().filter(|s| s.name == "tiles").enumerate() {
        tiles.push(load_tile(path, section, index as u32, &mut notes)?);
    }

    let background = match sections.iter().find(|s| s.name == "background") {
        Some(section) => load_groove_section(path, section, "background", &mut notes)?,
        None => {
            notes.push(format!(
                "note: no [background] section, using a {} degree groove off the tiles",
                GrooveSpec::default().angle_deg
            ));
            GrooveSpec::default()
        }
    };

    let initial_section = sections.iter().find(|s| s.name == "initial").unwrap_or(&empty);
    let mut fields = Fields::new(path, initial_section);
    let rear = match fields.pair("rear_mm")? {
        Some(p) => p,
        None => {
            notes.push("note: initial.rear_mm not set, using default [0, 0]".to_string());
            (0.0, 0.0)
        }
    };
    let heading = match fields.number("heading_deg")? {
        Some(h) => h,
        None => {
            notes.push("note: initial.heading_deg not set, using default 0".to_string());
            0.0
        }
    };
    if !initial_section.name.is_empty() {
        fields.finish()?;
    }

    let Some(run_section) = sections.iter().find(|s| s.name == "run") else {
        return Err(parse_err(path, 1, "missing [run] section with `cycles`"));
    };
    let mut fields = Fields::new(path, run_section);
    let cycles = fields.integer("cycles")?.ok_or_else(|| {
        parse_err(path, run_section.line, "[run] is missing required key `cycles`")
    })?;
    fields.finish()?;

    let world = WorldMap::new(tiles, background)?;
    let scenario = Scenario {
        world,
        params,
        initial_rear_mm: Vec2::new(rear.0, rear.1),
        initial_heading_deg: heading,
        cycles,
    };
    scenario.validate()?;
    Ok(LoadedScenario { scenario, notes })
}

fn load_gait(path: &str, section: &Section, notes: &mut Vec<String>) -> Result<GaitParams> {
    let defaults = GaitParams::default();
    let mut fields = Fields::new(path, section);
    let mut params = defaults;
    macro_rules! field {
        ($key:literal, $slot:ident, number) => {
            match fields.number($key)? {
                Some(v) => params.$slot = v,
                None => notes.push(format!(
                    "note: gait.{} not set, using default {}",
                    $key, defaults.$slot
                )),
            }
        };
        ($key:literal, $slot:ident, boolean) => {
            match fields.boolean($key)? {
                Some(v) => params.$slot = v,
                None => notes.push(format!(
                    "note: gait.{} not set, using default {}",
                    $key, defaults.$slot
                )),
            }
        };
    }
    field!("l_min_mm", l_min_mm, number);
    field!("l_max_mm", l_max_mm, number);
    field!("v_max_kv", v_max_kv, number);
    field!("frequency_hz", frequency_hz, number);
    field!("k_front", k_front, number);
    field!("k_rear", k_rear, number);
    field!("beta", beta, number);
    field!("snap_to_ridge", snap_to_ridge, boolean);
    if !section.name.is_empty() {
        fields.finish()?;
        params.validate().map_err(|e| attach_line(e, path, section))?;
    }
    Ok(params)
}

fn load_tile(
    path: &str,
    section: &Section,
    id: u32,
    notes: &mut Vec<String>,
) -> Result<SubstrateTile> {
    let mut fields = Fields::new(path, section);
    let x_min = fields.require_number("x_min_mm")?;
    let x_max = fields.require_number("x_max_mm")?;
    let y_min = fields.require_number("y_min_mm")?;
    let y_max = fields.require_number("y_max_mm")?;
    let groove = load_groove(&mut fields, &format!("tiles[{id}]"), notes)?;
    fields.finish()?;
    SubstrateTile::new(id, x_min, x_max, y_min, y_max, groove)
        .map_err(|e| attach_line(e, path, section))
}

fn load_groove_section(
    path: &str,
    section: &Section,
    label: &str,
    notes: &mut Vec<String>,
) -> Result<GrooveSpec> {
    let mut fields = Fields::new(path, section);
    let groove = load_groove(&mut fields, label, notes)?;
    fields.finish()?;
    groove.validate().map_err(|e| attach_line(e, path, section))?;
    Ok(groove)
}

fn load_groove(fields: &mut Fields, label: &str, notes: &mut Vec<String>) -> Result<GrooveSpec> {
    let defaults = GrooveSpec::default();
    let angle = fields.require_number("groove_angle_deg")?;
    let pitch = match fields.number("pitch_mm")? {
        Some(v) => v,
        None => {
            notes.push(format!(
                "note: {label}.pitch_mm not set, using default {}",
                defaults.pitch_mm
            ));
            defaults.pitch_mm
        }
    };
    let ridge = match fields.number("ridge_height_mm")? {
        Some(v) => v,
        None => {
            notes.push(format!(
                "note: {label}.ridge_height_mm not set, using default {}",
                defaults.ridge_height_mm
            ));
            defaults.ridge_height_mm
        }
    };
    Ok(GrooveSpec {
        angle_deg: angle,
        pitch_mm: pitch,
        ridge_height_mm: ridge,
    })
}

/// Which scalar minimizer a calibration run should use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizerKind {
    Golden,
    NelderMead,
}

impl OptimizerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerKind::Golden => "golden",
            OptimizerKind::NelderMead => "nelder-mead",
        }
    }
}

/// A calibration problem: the scenario to replay, the free parameters
/// with bounds, and the optimizer choice.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub scenario: Scenario,
    pub free: Vec<(FreeParam, (f64, f64))>,
    pub optimizer: OptimizerKind,
    pub notes: Vec<String>,
}

pub fn load_problem(path: &Path) -> Result<LoadedProblem> {
    let source = read_input(path)?;
    problem_from_str(&path.display().to_string(), &source)
}

pub fn problem_from_str(path: &str, source: &str) -> Result<LoadedProblem> {
    let sections = parse_document(path, source)?;
    let mut scenario_sections = Vec::new();
    let mut fit_section = None;
    let mut free_sections = Vec::new();
    for s in sections {
        match s.name.as_str() {
            "gait" | "tiles" | "initial" | "run" | "background" => scenario_sections.push(s),
            "fit" => fit_section = Some(s),
            "free" => free_sections.push(s),
            other => {
                return Err(parse_err(path, s.line, format!("unknown section [{other}]")));
            }
        }
    }
    let LoadedScenario { scenario, mut notes } = scenario_from_sections(path, &scenario_sections)?;

    let optimizer = match &fit_section {
        Some(section) => {
            let mut fields = Fields::new(path, section);
            let kind = match fields.text("optimizer")? {
                Some("golden") => OptimizerKind::Golden,
                Some("nelder-mead") => OptimizerKind::NelderMead,
                Some(other) => {
                    return Err(parse_err(
                        path,
                        fields.line_of("optimizer"),
                        format!("unknown optimizer `{other}` (expected `golden` or `nelder-mead`)"),
                    ));
                }
                None => {
                    notes.push("note: fit.optimizer not set, using nelder-mead".to_string());
                    OptimizerKind::NelderMead
                }
            };
            fields.finish()?;
            kind
        }
        None => {
            notes.push("note: no [fit] section, using nelder-mead".to_string());
            OptimizerKind::NelderMead
        }
    };

    let mut free = Vec::new();
    for section in &free_sections {
        let mut fields = Fields::new(path, section);
        let name_line = fields.line_of("param");
        let name = fields.text("param")?.ok_or_else(|| {
            parse_err(path, section.line, "[[free]] is missing required key `param`")
        })?;
        let param = FreeParam::parse(name).ok_or_else(|| {
            parse_err(
                path,
                name_line,
                format!("unknown parameter `{name}` (expected k_front, k_rear, or beta)"),
            )
        })?;
        let lo = fields.require_number("lo")?;
        let hi = fields.require_number("hi")?;
        fields.finish()?;
        free.push((param, (lo, hi)));
    }
    if free.is_empty() {
        return Err(parse_err(path, 1, "no [[free]] section: nothing to fit"));
    }

    Ok(LoadedProblem {
        scenario,
        free,
        optimizer,
        notes,
    })
}

/// A planning target: waypoints, tolerance, and the gait to plan for.
#[derive(Debug, Clone)]
pub struct LoadedTarget {
    pub target: PathTarget,
    pub params: GaitParams,
    pub notes: Vec<String>,
}

pub fn load_target(path: &Path) -> Result<LoadedTarget> {
    let source = read_input(path)?;
    target_from_str(&path.display().to_string(), &source)
}

pub fn target_from_str(path: &str, source: &str) -> Result<LoadedTarget> {
    let sections = parse_document(path, source)?;
    let mut notes = Vec::new();
    let mut target_section = None;
    let mut gait_section = None;
    let mut waypoint_sections = Vec::new();
    for s in sections {
        match s.name.as_str() {
            "target" => target_section = Some(s),
            "waypoints" => waypoint_sections.push(s),
            "gait" => gait_section = Some(s),
            other => {
                return Err(parse_err(path, s.line, format!("unknown section [{other}]")));
            }
        }
    }
    let Some(target_section) = target_section else {
        return Err(parse_err(path, 1, "missing [target] section with `tolerance_mm`"));
    };
    let mut fields = Fields::new(path, &target_section);
    let tolerance = fields.require_number("tolerance_mm")?;
    fields.finish()?;

    let mut waypoints = Vec::new();
    for section in &waypoint_sections {
        let mut fields = Fields::new(path, section);
        let x = fields.require_number("x_mm")?;
        let y = fields.require_number("y_mm")?;
        fields.finish()?;
        waypoints.push(Vec2::new(x, y));
    }

    let params = match &gait_section {
        Some(section) => load_gait(path, section, &mut notes)?,
        None => {
            notes.push("note: no [gait] section, planning with default gait parameters".to_string());
            GaitParams::default()
        }
    };

    let target = PathTarget {
        waypoints,
        tolerance_mm: tolerance,
    };
    target.validate().map_err(|e| attach_line(e, path, &target_section))?;
    Ok(LoadedTarget {
        target,
        params,
        notes,
    })
}

/// A tile palette for planning.
#[derive(Debug, Clone)]
pub struct LoadedPalette {
    pub palette: TilePalette,
}

pub fn load_palette(path: &Path) -> Result<LoadedPalette> {
    let source = read_input(path)?;
    palette_from_str(&path.display().to_string(), &source)
}

pub fn palette_from_str(path: &str, source: &str) -> Result<LoadedPalette> {
    let sections = parse_document(path, source)?;
    let mut palette_section = None;
    for s in sections {
        match s.name.as_str() {
            "palette" => palette_section = Some(s),
            other => {
                return Err(parse_err(path, s.line, format!("unknown section [{other}]")));
            }
        }
    }
    let Some(section) = palette_section else {
        return Err(parse_err(path, 1, "missing [palette] section"));
    };
    let mut fields = Fields::new(path, &section);
    let angles = fields
        .array("angles_deg")?
        .ok_or_else(|| {
            parse_err(path, section.line, "[palette] is missing required key `angles_deg`")
        })?
        .to_vec();
    let tile_length = fields.require_number("tile_length_mm")?;
    let max_tiles_line = fields.line_of("max_tiles");
    let max_tiles = fields.integer("max_tiles")?.ok_or_else(|| {
        parse_err(path, section.line, "[palette] is missing required key `max_tiles`")
    })?;
    if max_tiles > u32::MAX as u64 {
        return Err(parse_err(path, max_tiles_line, "max_tiles is too large"));
    }
    fields.finish()?;
    let palette = TilePalette {
        angles_deg: angles,
        tile_length_mm: tile_length,
        max_tiles: max_tiles as u32,
    };
    palette.validate().map_err(|e| attach_line(e, path, &section))?;
    Ok(LoadedPalette { palette })
}

/// Reads a course plan written by the plan command: one `angle,length`
/// line per tile, `#` comment lines ignored.
pub fn read_plan_file(path: &Path) -> Result<Vec<PlannedTile>> {
    let source = read_input(path)?;
    plan_from_str(&path.display().to_string(), &source)
}

pub fn plan_from_str(path: &str, source: &str) -> Result<Vec<PlannedTile>> {
    let mut tiles = Vec::new();
    for (idx, raw_line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let text = raw_line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let Some((angle, length)) = text.split_once(',') else {
            return Err(parse_err(path, line_no, "expected `angle_deg,length_mm`"));
        };
        let angle: f64 = angle
            .trim()
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("`{}` is not a number", angle.trim())))?;
        let length: f64 = length.trim().parse().map_err(|_| {
            parse_err(path, line_no, format!("`{}` is not a number", length.trim()))
        })?;
        tiles.push(PlannedTile {
            angle_deg: angle,
            length_mm: length,
        });
    }
    if tiles.is_empty() {
        return Err(parse_err(path, 1, "no tiles in plan file"));
    }
    Ok(tiles)
}

/// True when the file looks like a sectioned scenario rather than a
/// plan: its first meaningful line is a section header.
pub fn looks_like_scenario(source: &str) -> bool {
    for raw_line in source.lines() {
        let text = strip_comment(raw_line).trim();
        if text.is_empty() {
            continue;
        }
        return text.starts_with('[') && !text.starts_with("[[")
            || text.starts_with("[[");
    }
    false
}

pub fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}
