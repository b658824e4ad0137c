//! Python bindings for the groove-gait simulator. The module mirrors the
//! command-line surface: load or build scenarios, run them, sweep groove
//! angles, calibrate gains against observations, design courses, and
//! export substrate meshes.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use groove_gait::cli::{self, config};
use groove_gait::fit::{fit_golden, fit_nelder_mead, FitProblem, NelderMeadOptions, ObservationSeries};
use groove_gait::gait::GaitParams;
use groove_gait::geom::Vec2;
use groove_gait::plan::{course_start, evaluate, plan_greedy, refine};
use groove_gait::sim;
use groove_gait::substrate::{GrooveSpec, SubstrateTile, TileRef, WorldMap};

fn to_py(err: groove_gait::Error) -> PyErr {
    if err.is_input_error() {
        PyValueError::new_err(err.to_string())
    } else {
        PyRuntimeError::new_err(err.to_string())
    }
}

fn tile_ref_to_py(t: TileRef) -> Option<u32> {
    match t {
        TileRef::Tile(id) => Some(id),
        TileRef::Background => None,
    }
}

/// Gait parameters of the crawler.
#[pyclass(name = "GaitParams", module = "groove_gait_py", from_py_object)]
#[derive(Clone)]
struct PyGaitParams {
    inner: GaitParams,
}

#[pymethods]
impl PyGaitParams {
    #[new]
    #[pyo3(signature = (
        l_min_mm=25.0, l_max_mm=27.0, v_max_kv=1.9, frequency_hz=0.4,
        k_front=0.5, k_rear=0.0, beta=1.0, snap_to_ridge=false
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        l_min_mm: f64,
        l_max_mm: f64,
        v_max_kv: f64,
        frequency_hz: f64,
        k_front: f64,
        k_rear: f64,
        beta: f64,
        snap_to_ridge: bool,
    ) -> PyResult<Self> {
        let inner = GaitParams {
            l_min_mm,
            l_max_mm,
            v_max_kv,
            frequency_hz,
            k_front,
            k_rear,
            beta,
            snap_to_ridge,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyGaitParams { inner })
    }

    #[getter]
    fn l_min_mm(&self) -> f64 {
        self.inner.l_min_mm
    }

    #[getter]
    fn l_max_mm(&self) -> f64 {
        self.inner.l_max_mm
    }

    #[getter]
    fn k_front(&self) -> f64 {
        self.inner.k_front
    }

    #[getter]
    fn k_rear(&self) -> f64 {
        self.inner.k_rear
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "GaitParams(l_min_mm={}, l_max_mm={}, v_max_kv={}, frequency_hz={}, \
             k_front={}, k_rear={}, beta={}, snap_to_ridge={})",
            p.l_min_mm,
            p.l_max_mm,
            p.v_max_kv,
            p.frequency_hz,
            p.k_front,
            p.k_rear,
            p.beta,
            if p.snap_to_ridge { "True" } else { "False" }
        )
    }
}

/// A world, start pose, and cycle budget, ready to run.
#[pyclass(name = "Scenario", module = "groove_gait_py", skip_from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: sim::Scenario,
}

#[pymethods]
impl PyScenario {
    /// Loads a scenario file. Unset keys fall back to defaults silently.
    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        let loaded = config::load_scenario(&path).map_err(to_py)?;
        Ok(PyScenario {
            inner: loaded.scenario,
        })
    }

    /// A borderless world with one groove angle everywhere.
    #[staticmethod]
    #[pyo3(signature = (angle_deg, cycles, heading_deg=0.0, params=None))]
    fn uniform(
        angle_deg: f64,
        cycles: u64,
        heading_deg: f64,
        params: Option<PyGaitParams>,
    ) -> PyResult<Self> {
        let groove = GrooveSpec::new(angle_deg, 0.45, 0.15).map_err(to_py)?;
        let inner = sim::Scenario {
            world: WorldMap::new(Vec::new(), groove).map_err(to_py)?,
            params: params.map_or_else(GaitParams::default, |p| p.inner),
            initial_rear_mm: Vec2::new(0.0, 0.0),
            initial_heading_deg: heading_deg,
            cycles,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyScenario { inner })
    }

    #[getter]
    fn cycles(&self) -> u64 {
        self.inner.cycles
    }

    #[getter]
    fn tile_count(&self) -> usize {
        self.inner.world.tiles().len()
    }

    /// Runs the gait and returns the sampled trajectory.
    fn run(&self) -> PyResult<PyTrajectory> {
        let trajectory = sim::run(&self.inner).map_err(to_py)?;
        Ok(PyTrajectory { inner: trajectory })
    }

    /// Final headings after re-running with each uniform groove angle.
    /// Returns `(angle_deg, final_heading_deg, cycles_to_half_alignment)`
    /// rows.
    fn sweep(&self, angles_deg: Vec<f64>) -> PyResult<Vec<(f64, f64, Option<u64>)>> {
        let rows = sim::sweep(&self.inner, &angles_deg).map_err(to_py)?;
        Ok(rows
            .into_iter()
            .map(|r| (r.angle_deg, r.final_heading_deg, r.cycles_to_half_alignment))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(tiles={}, cycles={})",
            self.inner.world.tiles().len(),
            self.inner.cycles
        )
    }
}

/// A recorded run: one sample per half-cycle plus the start pose.
#[pyclass(name = "Trajectory", module = "groove_gait_py")]
struct PyTrajectory {
    inner: sim::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }

    #[getter]
    fn final_heading_deg(&self) -> f64 {
        self.inner.final_sample().heading_deg
    }

    fn times_s(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.time_s).collect()
    }

    fn headings_deg(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.heading_deg).collect()
    }

    fn front_positions_mm(&self) -> Vec<(f64, f64)> {
        self.inner
            .samples
            .iter()
            .map(|s| (s.front_mm.x, s.front_mm.y))
            .collect()
    }

    fn rear_positions_mm(&self) -> Vec<(f64, f64)> {
        self.inner
            .samples
            .iter()
            .map(|s| (s.rear_mm.x, s.rear_mm.y))
            .collect()
    }

    /// Tile id under the front foot at each sample; None on the background.
    fn front_tiles(&self) -> Vec<Option<u32>> {
        self.inner
            .samples
            .iter()
            .map(|s| tile_ref_to_py(s.front_tile))
            .collect()
    }

    /// Aggregate statistics of the run.
    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let summary = sim::summarize(&self.inner);
        let out = PyDict::new(py);
        out.set_item("final_heading_deg", summary.final_heading_deg)?;
        out.set_item("net_displacement_mm", summary.net_displacement_mm)?;
        out.set_item("path_length_mm", summary.path_length_mm)?;
        let per_tile: Vec<(Option<u32>, f64)> = summary
            .per_tile_mean_heading
            .into_iter()
            .map(|(t, h)| (tile_ref_to_py(t), h))
            .collect();
        out.set_item("per_tile_mean_heading", per_tile)?;
        Ok(out)
    }

    /// Writes the trajectory in the same CSV dialect as the CLI.
    fn to_csv(&self, path: PathBuf) -> PyResult<()> {
        std::fs::write(&path, groove_gait::cli::csv::write_trajectory_csv(&self.inner))
            .map_err(|e| PyRuntimeError::new_err(format!("{}: {e}", path.display())))
    }

    fn __repr__(&self) -> String {
        format!(
            "Trajectory(samples={}, final_heading_deg={})",
            self.inner.samples.len(),
            self.inner.final_sample().heading_deg
        )
    }
}

/// Fits a calibration problem file against an observation CSV and returns
/// the fitted values as a dict.
#[pyfunction]
fn calibrate<'py>(
    py: Python<'py>,
    problem_path: PathBuf,
    observations_path: PathBuf,
) -> PyResult<Bound<'py, PyDict>> {
    let problem = config::load_problem(&problem_path).map_err(to_py)?;
    let source = config::read_input(&observations_path).map_err(to_py)?;
    let points = groove_gait::cli::csv::parse_observation_csv(
        &observations_path.display().to_string(),
        &source,
    )
    .map_err(to_py)?;
    let fit_problem = FitProblem {
        series: vec![ObservationSeries {
            scenario: problem.scenario,
            points,
        }],
        free: problem.free,
    };
    let fit = match problem.optimizer {
        config::OptimizerKind::Golden => fit_golden(&fit_problem).map_err(to_py)?,
        config::OptimizerKind::NelderMead => {
            fit_nelder_mead(&fit_problem, &NelderMeadOptions::default()).map_err(to_py)?
        }
    };
    let out = PyDict::new(py);
    out.set_item("optimizer", problem.optimizer.as_str())?;
    for (param, value) in &fit.params {
        out.set_item(param.name(), *value)?;
    }
    out.set_item("sse", fit.sse)?;
    out.set_item("evaluations", fit.evaluations)?;
    out.set_item("converged", fit.converged)?;
    Ok(out)
}

/// Designs a groove course for a target file and palette file. Returns the
/// placed tiles and the plan metrics as a dict.
#[pyfunction]
fn plan_course<'py>(
    py: Python<'py>,
    target_path: PathBuf,
    palette_path: PathBuf,
) -> PyResult<Bound<'py, PyDict>> {
    let target = config::load_target(&target_path).map_err(to_py)?;
    let palette = config::load_palette(&palette_path).map_err(to_py)?;
    let initial = course_start(&target.params);
    let greedy =
        plan_greedy(&target.target, &palette.palette, &target.params, &initial).map_err(to_py)?;
    let refined = refine(&greedy, &target.target, &target.params, cli::REFINE_STEP_DEG)
        .map_err(to_py)?;
    let metrics = evaluate(&refined, &target.target).map_err(to_py)?;

    let tiles: Vec<(f64, f64)> = refined
        .tiles
        .iter()
        .map(|t| (t.angle_deg, t.length_mm))
        .collect();
    let out = PyDict::new(py);
    out.set_item("tiles", tiles)?;
    out.set_item("cycles_per_tile", refined.cycles_per_tile.clone())?;
    out.set_item("converged", refined.converged)?;
    out.set_item("final_miss_mm", metrics.final_miss_mm)?;
    out.set_item("max_waypoint_miss_mm", metrics.max_waypoint_miss_mm)?;
    out.set_item("total_course_length_mm", metrics.total_course_length_mm)?;
    out.set_item(
        "predicted_final_heading_deg",
        refined.predicted.final_sample().heading_deg,
    )?;
    Ok(out)
}

/// Writes one binary STL per substrate tile of a scenario file (or per
/// strip of a plan file) into `outdir`. Returns the written file names.
#[pyfunction]
#[pyo3(signature = (input_path, outdir, thickness_mm=2.0, strip_width_mm=150.0))]
fn export_meshes(
    input_path: PathBuf,
    outdir: PathBuf,
    thickness_mm: f64,
    strip_width_mm: f64,
) -> PyResult<Vec<String>> {
    cli::mesh(&input_path, &outdir, thickness_mm, strip_width_mm).map_err(to_py)?;
    let mut names: Vec<String> = std::fs::read_dir(&outdir)
        .map_err(|e| PyRuntimeError::new_err(format!("{}: {e}", outdir.display())))?
        .filter_map(|entry| {
            let name = entry.ok()?.file_name().into_string().ok()?;
            name.ends_with(".stl").then_some(name)
        })
        .collect();
    names.sort();
    Ok(names)
}

/// Writes an STL of a single rectangular grooved tile.
#[pyfunction]
#[pyo3(signature = (
    path, width_mm, height_mm, angle_deg,
    pitch_mm=0.45, ridge_height_mm=0.15, thickness_mm=2.0
))]
fn write_tile_stl(
    path: PathBuf,
    width_mm: f64,
    height_mm: f64,
    angle_deg: f64,
    pitch_mm: f64,
    ridge_height_mm: f64,
    thickness_mm: f64,
) -> PyResult<u64> {
    let groove = GrooveSpec::new(angle_deg, pitch_mm, ridge_height_mm).map_err(to_py)?;
    let tile =
        SubstrateTile::new(0, 0.0, width_mm, 0.0, height_mm, groove).map_err(to_py)?;
    let mesh = groove_gait::mesh::substrate_mesh(&tile, thickness_mm).map_err(to_py)?;
    let mut sink = std::io::BufWriter::new(
        std::fs::File::create(&path)
            .map_err(|e| PyRuntimeError::new_err(format!("{}: {e}", path.display())))?,
    );
    let bytes = groove_gait::mesh::write_stl(&mesh, &mut sink).map_err(to_py)?;
    use std::io::Write;
    sink.flush()
        .map_err(|e| PyRuntimeError::new_err(format!("{}: {e}", path.display())))?;
    Ok(bytes)
}

/// Convenience wrapper: simulate a scenario file straight to a CSV, like
/// the `simulate` subcommand (without the stderr notes).
#[pyfunction]
fn simulate_to_csv(scenario_path: PathBuf, output_path: PathBuf) -> PyResult<()> {
    let loaded = config::load_scenario(&scenario_path).map_err(to_py)?;
    let trajectory = sim::run(&loaded.scenario).map_err(to_py)?;
    std::fs::write(
        &output_path,
        groove_gait::cli::csv::write_trajectory_csv(&trajectory),
    )
    .map_err(|e| PyRuntimeError::new_err(format!("{}: {e}", output_path.display())))
}

#[pymodule]
fn groove_gait_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGaitParams>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(plan_course, m)?)?;
    m.add_function(wrap_pyfunction!(export_meshes, m)?)?;
    m.add_function(wrap_pyfunction!(write_tile_stl, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_to_csv, m)?)?;
    Ok(())
}
