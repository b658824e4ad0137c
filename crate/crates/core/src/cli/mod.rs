//! Command implementations behind the `groove-gait` binary.
//!
//! Each command reads text inputs, runs the corresponding library
//! operation, and writes byte-reproducible outputs. Defaulting notes and
//! progress reports go to stderr; data only ever goes to files.

pub mod config;
pub mod csv;
pub mod plot;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fit::{fit_golden, fit_nelder_mead, FitProblem, NelderMeadOptions, ObservationSeries};

use crate::mesh::{substrate_mesh, write_stl};
use crate::plan::{course_start, evaluate, plan_greedy, refine, PlannedTile};
use crate::sim;
use crate::substrate::{GrooveSpec, SubstrateTile};

use config::OptimizerKind;
use plot::PlotSeries;

/// First step size of plan refinement, degrees. Halving from here ends
/// the schedule at 0.125, so refined angles stay on a lattice whose
/// decimal form survives the nine-digit file precision exactly.
pub const REFINE_STEP_DEG: f64 = 4.0;

fn emit_notes(notes: &[String]) {
    for note in notes {
        eprintln!("{note}");
    }
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes.as_ref()).map_err(|e| io_at(path, e))
}

fn io_at(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

/// Runs a scenario and writes its trajectory CSV.
pub fn simulate(scenario_path: &Path, output: &Path) -> Result<()> {
    let loaded = config::load_scenario(scenario_path)?;
    emit_notes(&loaded.notes);
    let trajectory = sim::run(&loaded.scenario)?;
    write_file(output, csv::write_trajectory_csv(&trajectory))
}

/// Re-runs a scenario under a list of uniform groove angles and writes
/// one summary row per angle.
pub fn sweep(scenario_path: &Path, angles_deg: &[f64], output: &Path) -> Result<()> {
    if angles_deg.is_empty() {
        return Err(Error::invalid("angles", "empty angle list"));
    }
    let loaded = config::load_scenario(scenario_path)?;
    emit_notes(&loaded.notes);
    let rows = sim::sweep(&loaded.scenario, angles_deg)?;
    write_file(output, csv::write_sweep_csv(&rows))
}

/// Fits the problem's free parameters to observed headings and writes a
/// plain-text report.
pub fn calibrate(problem_path: &Path, observations_path: &Path, output: &Path) -> Result<()> {
    let problem = config::load_problem(problem_path)?;
    emit_notes(&problem.notes);
    let source = config::read_input(observations_path)?;
    let points =
        csv::parse_observation_csv(&observations_path.display().to_string(), &source)?;
    let series = ObservationSeries {
        scenario: problem.scenario,
        points,
    };
    let fit_problem = FitProblem {
        series: vec![series],
        free: problem.free,
    };
    let fit = match problem.optimizer {
        OptimizerKind::Golden => fit_golden(&fit_problem)?,
        OptimizerKind::NelderMead => fit_nelder_mead(&fit_problem, &NelderMeadOptions::default())?,
    };
    let mut report = String::new();
    report.push_str(&format!("optimizer: {}\n", problem.optimizer.as_str()));
    for (param, value) in &fit.params {
        report.push_str(&format!("{}: {}\n", param.name(), csv::fmt9(*value)));
    }
    report.push_str(&format!("sse: {:.8e}\n", fit.sse));
    report.push_str(&format!("evaluations: {}\n", fit.evaluations));
    report.push_str(&format!("converged: {}\n", fit.converged));
    write_file(output, report)
}

/// Where the predicted-trajectory CSV for a plan output lands: next to
/// the plan, `<stem>_predicted.csv`.
pub fn predicted_csv_path(plan_output: &Path) -> PathBuf {
    let stem = plan_output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "plan".to_string());
    plan_output.with_file_name(format!("{stem}_predicted.csv"))
}

/// Designs a groove course for a waypoint target and writes the plan
/// file plus the predicted trajectory CSV beside it.
pub fn plan(target_path: &Path, palette_path: &Path, output: &Path) -> Result<()> {
    let target = config::load_target(target_path)?;
    emit_notes(&target.notes);
    let palette = config::load_palette(palette_path)?;
    let initial = course_start(&target.params);
    let greedy = plan_greedy(&target.target, &palette.palette, &target.params, &initial)?;
    let refined = refine(&greedy, &target.target, &target.params, REFINE_STEP_DEG)?;
    let metrics = evaluate(&refined, &target.target)?;

    let mut text = String::new();
    for tile in &refined.tiles {
        text.push_str(&format!(
            "{},{}\n",
            csv::fmt9(tile.angle_deg),
            csv::fmt9(tile.length_mm)
        ));
    }
    text.push_str(&format!(
        "# final_miss_mm={} max_waypoint_miss_mm={} total_course_length_mm={} converged={}\n",
        csv::fmt9(metrics.final_miss_mm),
        csv::fmt9(metrics.max_waypoint_miss_mm),
        csv::fmt9(metrics.total_course_length_mm),
        refined.converged
    ));
    write_file(output, text)?;
    write_file(
        &predicted_csv_path(output),
        csv::write_trajectory_csv(&refined.predicted),
    )
}

/// Exports every substrate tile of a scenario, or every strip of a plan,
/// as `tile_<id>.stl` in the output directory.
pub fn mesh(
    input: &Path,
    outdir: &Path,
    thickness_mm: f64,
    strip_width_mm: f64,
) -> Result<()> {
    let source = config::read_input(input)?;
    let label = input.display().to_string();
    let tiles = if config::looks_like_scenario(&source) {
        let loaded = config::scenario_from_str(&label, &source)?;
        emit_notes(&loaded.notes);
        loaded.scenario.world.tiles().to_vec()
    } else {
        let planned = config::plan_from_str(&label, &source)?;
        plan_strips(&planned, strip_width_mm)?
    };
    if tiles.is_empty() {
        return Err(Error::invalid("tiles", "nothing to mesh: no tiles"));
    }
    fs::create_dir_all(outdir).map_err(|e| io_at(outdir, e))?;
    for tile in &tiles {
        let mesh = substrate_mesh(tile, thickness_mm)?;
        let path = outdir.join(format!("tile_{}.stl", tile.id));
        let file = fs::File::create(&path).map_err(|e| io_at(&path, e))?;
        let mut writer = std::io::BufWriter::new(file);
        write_stl(&mesh, &mut writer)?;
        writer.flush().map_err(|e| io_at(&path, e))?;
    }
    Ok(())
}

/// Lays a plan's tiles out as printable strips: consecutive along +x
/// from the origin, centred on the course line, `strip_width_mm` deep.
fn plan_strips(planned: &[PlannedTile], strip_width_mm: f64) -> Result<Vec<SubstrateTile>> {
    if !(strip_width_mm.is_finite() && strip_width_mm > 0.0) {
        return Err(Error::invalid("strip_width_mm", "must be > 0"));
    }
    let half = strip_width_mm / 2.0;
    let mut tiles = Vec::with_capacity(planned.len());
    let mut x = 0.0;
    for (i, tile) in planned.iter().enumerate() {
        let groove = GrooveSpec {
            angle_deg: tile.angle_deg,
            ..GrooveSpec::default()
        };
        tiles.push(SubstrateTile::new(
            i as u32,
            x,
            x + tile.length_mm,
            -half,
            half,
            groove,
        )?);
        x += tile.length_mm;
    }
    Ok(tiles)
}

/// Draws heading-versus-time curves from trajectory CSVs into one SVG.
/// With `markers` set, vertical dashed lines mark samples where either
/// foot changed tiles.
pub fn plot(inputs: &[PathBuf], output: &Path, markers: bool) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::invalid("inputs", "no trajectory files given"));
    }
    let mut series = Vec::with_capacity(inputs.len());
    for input in inputs {
        let source = config::read_input(input)?;
        let rows = csv::parse_trajectory_csv(&input.display().to_string(), &source)?;
        let label = input
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| input.display().to_string());
        let points = rows.iter().map(|r| (r.time_s, r.heading_deg)).collect();
        let mut marks = Vec::new();
        if markers {
            for pair in rows.windows(2) {
                if pair[0].front_tile != pair[1].front_tile
                    || pair[0].rear_tile != pair[1].rear_tile
                {
                    marks.push(pair[1].time_s);
                }
            }
            marks.dedup();
        }
        series.push(PlotSeries {
            label,
            points,
            markers: marks,
        });
    }
    write_file(output, plot::render_heading_plot(&series))
}
