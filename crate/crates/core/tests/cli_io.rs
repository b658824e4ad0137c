//! Tests of the command binary's observable contract: output bytes, exit
//! codes, stderr diagnostics, and the files each subcommand leaves behind.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_groove-gait");

fn scenario_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// A background-only straight course, two cycles long.
const STRAIGHT: &str = "\
[gait]
l_min_mm = 25.0
l_max_mm = 27.0
v_max_kv = 1.9
frequency_hz = 0.4
k_front = 0.5
k_rear = 0.0
beta = 1.0
snap_to_ridge = false

[background]
groove_angle_deg = 0.0
pitch_mm = 0.45
ridge_height_mm = 0.15

[initial]
rear_mm = [0.0, 0.0]
heading_deg = 0.0

[run]
cycles = 2
";

#[test]
fn simulate_emits_the_exact_trajectory_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("straight.toml");
    fs::write(&scenario, STRAIGHT).unwrap();
    let csv = dir.path().join("out.csv");
    let output = run_cli(&[
        "simulate",
        scenario.to_str().unwrap(),
        csv.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert_eq!(
        fs::read_to_string(&csv).unwrap(),
        "time_s,phase,rear_x_mm,rear_y_mm,front_x_mm,front_y_mm,heading_deg,front_tile,rear_tile\n\
         0,contracted,0,0,25,0,0,background,background\n\
         1.25,extended,0,0,27,0,0,background,background\n\
         2.5,contracted,2,0,27,0,0,background,background\n\
         3.75,extended,2,0,29,0,0,background,background\n\
         5,contracted,4,0,29,0,0,background,background\n"
    );
}

#[test]
fn omitted_keys_are_reported_as_notes_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("sparse.toml");
    fs::write(&scenario, "[run]\ncycles = 1\n").unwrap();
    let csv = dir.path().join("out.csv");
    let output = run_cli(&[
        "simulate",
        scenario.to_str().unwrap(),
        csv.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let notes = stderr_of(&output);
    assert!(
        notes.contains("note: gait.l_min_mm not set, using default 25"),
        "stderr was: {notes}"
    );
    assert!(
        notes.contains("note: no [background] section"),
        "stderr was: {notes}"
    );
}

#[test]
fn missing_input_file_exits_with_the_internal_code() {
    let output = run_cli(&["simulate", "/nonexistent/input.toml", "/tmp/unused.csv"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).starts_with("error:"), "{}", stderr_of(&output));
}

#[test]
fn malformed_scenarios_exit_with_the_input_code_and_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[gait]\nl_min_mm = what\n[run]\ncycles = 1\n").unwrap();
    let output = run_cli(&[
        "simulate",
        bad.to_str().unwrap(),
        dir.path().join("out.csv").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    let message = stderr_of(&output);
    assert!(message.contains("bad.toml:2"), "stderr was: {message}");
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("typo.toml");
    fs::write(&bad, "[run]\ncycles = 1\ncycels = 2\n").unwrap();
    let output = run_cli(&[
        "simulate",
        bad.to_str().unwrap(),
        dir.path().join("out.csv").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("cycels"), "{}", stderr_of(&output));
}

#[test]
fn usage_errors_exit_with_the_input_code() {
    let output = run_cli(&["sweep", "only-one-arg"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn help_and_version_exit_cleanly() {
    let help = run_cli(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("Usage"));
    let version = run_cli(&["--version"]);
    assert_eq!(version.status.code(), Some(0));
}

#[test]
fn sweep_writes_one_row_per_angle() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let output = run_cli(&[
        "sweep",
        scenario_file("fig8a.toml").to_str().unwrap(),
        "--angles=-15,0,15",
        csv.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(
        lines[0],
        "groove_angle_deg,final_heading_deg,cycles_to_half_alignment"
    );
    assert!(lines[1].starts_with("-15,"));
    assert!(lines[2].starts_with("0,0,"));
}

#[test]
fn the_shipped_calibration_problem_reproduces_the_shipped_gain() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("fit.txt");
    let output = run_cli(&[
        "calibrate",
        scenario_file("fig9a_problem.toml").to_str().unwrap(),
        scenario_file("fig9a_anchor.csv").to_str().unwrap(),
        report.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert_eq!(
        fs::read_to_string(&report).unwrap(),
        "optimizer: golden\n\
         k_front: 0.232459169\n\
         sse: 3.62252209e-7\n\
         evaluations: 23\n\
         converged: true\n"
    );
}

#[test]
fn plan_emits_a_course_its_prediction_and_meshable_tiles() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("target.toml");
    fs::write(
        &target,
        "[target]\ntolerance_mm = 2.0\n\n\
         [[waypoints]]\nx_mm = 60.0\ny_mm = 0.0\n\n\
         [[waypoints]]\nx_mm = 120.0\ny_mm = 0.0\n",
    )
    .unwrap();
    let palette = dir.path().join("palette.toml");
    fs::write(
        &palette,
        "[palette]\nangles_deg = [-10.0, 0.0, 10.0]\ntile_length_mm = 60.0\nmax_tiles = 4\n",
    )
    .unwrap();

    let plan = dir.path().join("course.txt");
    let output = run_cli(&[
        "plan",
        target.to_str().unwrap(),
        palette.to_str().unwrap(),
        plan.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));

    let first = fs::read(&plan).unwrap();
    let tile_lines = String::from_utf8(first.clone())
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
        .count();
    assert!(tile_lines >= 1);
    let predicted = dir.path().join("course_predicted.csv");
    assert!(
        fs::read_to_string(&predicted)
            .unwrap()
            .starts_with("time_s,phase,rear_x_mm"),
        "prediction CSV missing or malformed"
    );

    let rerun = run_cli(&[
        "plan",
        target.to_str().unwrap(),
        palette.to_str().unwrap(),
        plan.to_str().unwrap(),
    ]);
    assert!(rerun.status.success());
    assert_eq!(first, fs::read(&plan).unwrap(), "plan file not reproducible");

    let meshes = dir.path().join("meshes");
    let output = run_cli(&[
        "mesh",
        plan.to_str().unwrap(),
        meshes.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let stl_count = fs::read_dir(&meshes)
        .unwrap()
        .filter(|e| {
            e.as_ref().unwrap().path().extension().map_or(false, |x| x == "stl")
        })
        .count();
    assert_eq!(stl_count, tile_lines);
}

#[test]
fn mesh_writes_one_branded_stl_per_scenario_tile() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("stl");
    let output = run_cli(&[
        "mesh",
        scenario_file("fig8a.toml").to_str().unwrap(),
        outdir.to_str().unwrap(),
        "--thickness-mm",
        "1.5",
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    for id in 0..2 {
        let bytes = fs::read(outdir.join(format!("tile_{id}.stl"))).unwrap();
        assert!(bytes.len() > 84);
        assert!(bytes.starts_with(b"groove-gait substrate"));
        let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
        assert_eq!(bytes.len(), 84 + 50 * count);
    }
}

#[test]
fn plot_renders_the_requested_series() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let output = run_cli(&[
        "simulate",
        scenario_file("fig8b.toml").to_str().unwrap(),
        csv.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));

    let svg = dir.path().join("plot.svg");
    let output = run_cli(&[
        "plot",
        "--markers",
        "-o",
        svg.to_str().unwrap(),
        csv.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.trim_end().ends_with("</svg>"));
    assert!(text.contains("run.csv"), "legend label missing");
    assert!(text.contains("stroke-dasharray"), "crossing markers missing");
}
