//! End-to-end acceptance gate. Each test checks one numbered criterion and
//! prints a single `criterion N: PASS` line; a failed assertion is the
//! corresponding FAIL. Run with `--nocapture` to see the lines.

use std::path::Path;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use groove_gait::cli;
use groove_gait::cli::config::load_scenario;
use groove_gait::fit::{
    fit_golden, fit_nelder_mead, FitProblem, FitResult, FreeParam, NelderMeadOptions,
    ObservationSeries,
};
use groove_gait::gait::GaitParams;
use groove_gait::geom::Vec2;
use groove_gait::mesh::{substrate_mesh, write_stl};
use groove_gait::plan::{course_start, evaluate, plan_greedy, refine, simulate_course, PathTarget, Plan, TilePalette};
use groove_gait::sim::{run, summarize, sweep, Scenario};
use groove_gait::substrate::{GrooveSpec, SubstrateTile, WorldMap};

/// Serializes the wall-clock-sensitive tests so they never contend with
/// each other for cores.
static TIMING: Mutex<()> = Mutex::new(());

fn scenario_file(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn groove(angle_deg: f64) -> GrooveSpec {
    GrooveSpec::new(angle_deg, 0.45, 0.15).unwrap()
}

/// Unbounded world with one groove direction everywhere.
fn uniform_scenario(angle_deg: f64, cycles: u64) -> Scenario {
    Scenario {
        world: WorldMap::new(Vec::new(), groove(angle_deg)).unwrap(),
        params: GaitParams::default(),
        initial_rear_mm: Vec2::new(0.0, 0.0),
        initial_heading_deg: 0.0,
        cycles,
    }
}

#[test]
fn criterion_01_zero_angle_course_runs_dead_straight() {
    let _guard = TIMING.lock().unwrap_or_else(|e| e.into_inner());
    let scenario = uniform_scenario(0.0, 500);
    let started = Instant::now();
    let trajectory = run(&scenario).unwrap();
    let elapsed = started.elapsed();
    for sample in &trajectory.samples {
        assert!(
            sample.heading_deg.abs() < 1e-12,
            "heading {} at t={}",
            sample.heading_deg,
            sample.time_s
        );
    }
    assert!(
        elapsed < Duration::from_millis(100),
        "500 cycles took {elapsed:?}"
    );
    println!(
        "criterion 1: PASS - 500 aligned cycles stay under 1e-12 deg in {:?}",
        elapsed
    );
}

#[test]
fn criterion_02_steeper_grooves_turn_the_robot_further() {
    let base = uniform_scenario(0.0, 100);
    let rows = sweep(&base, &[0.0, 5.0, 15.0, 30.0]).unwrap();
    assert_eq!(rows[0].final_heading_deg, 0.0, "aligned start must not turn");
    let mut previous = 0.0;
    for row in &rows[1..] {
        let net = row.final_heading_deg.abs();
        assert!(
            net > previous,
            "net turn {} at {} deg does not exceed {}",
            net,
            row.angle_deg,
            previous
        );
        previous = net;
    }
    println!("criterion 2: PASS - net reorientation grows strictly with groove angle");
}

#[test]
fn criterion_03_heading_settles_onto_the_groove_normal_axis() {
    let scenario = uniform_scenario(30.0, 2000);
    let trajectory = run(&scenario).unwrap();
    let final_heading = trajectory.final_sample().heading_deg;
    assert!(
        (final_heading - 30.0).abs() < 0.01,
        "final heading {final_heading}"
    );
    let mut previous = f64::INFINITY;
    for cycle_end in trajectory.samples.iter().step_by(2) {
        let deflection = (30.0 - cycle_end.heading_deg).abs();
        assert!(
            deflection <= previous,
            "deflection grew to {} at t={}",
            deflection,
            cycle_end.time_s
        );
        previous = deflection;
    }
    println!("criterion 3: PASS - 30 deg run converges to the groove angle monotonically");
}

#[test]
fn criterion_04_turn_sign_follows_the_groove_sign() {
    let positive = run(&load_scenario(&scenario_file("fig8a.toml")).unwrap().scenario).unwrap();
    let negative = run(&load_scenario(&scenario_file("fig8b.toml")).unwrap().scenario).unwrap();
    let p = positive.final_sample().heading_deg;
    let n = negative.final_sample().heading_deg;
    assert!(p > 0.0, "positive-angle course ended at {p}");
    assert!(n < 0.0, "negative-angle course ended at {n}");
    println!("criterion 4: PASS - course fig8a ends at {p:.2} deg, fig8b at {n:.2} deg");
}

#[test]
fn criterion_05_earlier_tiles_change_where_the_course_ends() {
    let scenario = load_scenario(&scenario_file("fig9a.toml")).unwrap().scenario;
    let staged = run(&scenario).unwrap().final_sample().heading_deg;
    assert!(
        (-20.0..=-10.0).contains(&staged),
        "three-stage course ended at {staged}"
    );
    let direct = sweep(&scenario, &[-35.0]).unwrap()[0].final_heading_deg;
    assert!(
        (staged - direct).abs() >= 5.0,
        "staged {staged} vs direct {direct}"
    );
    println!(
        "criterion 5: PASS - staged course ends at {staged:.2} deg, single-angle course at {direct:.2} deg"
    );
}

#[test]
fn criterion_06_exact_symmetries_and_conservation() {
    // Mirror: flipping the groove sign mirrors the run about the x axis.
    let left = run(&uniform_scenario(20.0, 300)).unwrap();
    let right = run(&uniform_scenario(-20.0, 300)).unwrap();
    for (a, b) in left.samples.iter().zip(&right.samples) {
        assert!((a.rear_mm.x - b.rear_mm.x).abs() < 1e-12);
        assert!((a.rear_mm.y + b.rear_mm.y).abs() < 1e-12);
        assert!((a.front_mm.x - b.front_mm.x).abs() < 1e-12);
        assert!((a.front_mm.y + b.front_mm.y).abs() < 1e-12);
        assert!((a.heading_deg + b.heading_deg).abs() < 1e-12);
    }

    // Rotation: turning the world, start pose, and groove together by phi
    // rotates every later pose by phi. Angles here are right-turn-positive,
    // so a mathematically counter-clockwise frame rotation subtracts phi.
    let phi_deg: f64 = 25.0;
    let (sin_phi, cos_phi) = phi_deg.to_radians().sin_cos();
    let rotate = |p: Vec2| Vec2::new(p.x * cos_phi - p.y * sin_phi, p.x * sin_phi + p.y * cos_phi);
    let base = Scenario {
        initial_rear_mm: Vec2::new(3.0, 4.0),
        initial_heading_deg: 9.0,
        ..uniform_scenario(17.0, 1000)
    };
    let turned = Scenario {
        world: WorldMap::new(Vec::new(), groove(17.0 - phi_deg)).unwrap(),
        initial_rear_mm: rotate(base.initial_rear_mm),
        initial_heading_deg: base.initial_heading_deg - phi_deg,
        ..base.clone()
    };
    let base_run = run(&base).unwrap();
    for (a, b) in base_run.samples.iter().zip(&run(&turned).unwrap().samples) {
        assert!(rotate(a.rear_mm).distance(b.rear_mm) < 1e-9);
        assert!(rotate(a.front_mm).distance(b.front_mm) < 1e-9);
    }

    // Translation: shifting the start shifts the whole trajectory.
    let shift = Vec2::new(12.5, -7.25);
    let shifted = Scenario {
        initial_rear_mm: base.initial_rear_mm + shift,
        ..base.clone()
    };
    for (a, b) in base_run.samples.iter().zip(&run(&shifted).unwrap().samples) {
        assert!((a.rear_mm + shift).distance(b.rear_mm) < 1e-9);
        assert!((a.front_mm + shift).distance(b.front_mm) < 1e-9);
    }

    // Body length snaps to the phase endpoints, and the front foot travels
    // exactly its share of the stroke each cycle.
    let params = GaitParams::default();
    for sample in &base_run.samples {
        let length = sample.front_mm.distance(sample.rear_mm);
        let expected = match sample.phase {
            groove_gait::gait::Phase::Contracted => params.l_min_mm,
            groove_gait::gait::Phase::Extended => params.l_max_mm,
        };
        assert!(
            (length - expected).abs() < 1e-12,
            "length {length} in phase {:?}",
            sample.phase
        );
    }
    let expected_path = params.beta * (params.l_max_mm - params.l_min_mm) * 1000.0;
    let path = summarize(&base_run).path_length_mm;
    assert!(
        (path - expected_path).abs() / expected_path < 1e-9,
        "path length {path} vs {expected_path}"
    );
    println!("criterion 6: PASS - mirror, rotation, translation, length, and path-length hold");
}

#[test]
fn criterion_07_small_deflections_decay_at_the_predicted_rate() {
    let scenario = Scenario {
        initial_heading_deg: 1.0,
        ..uniform_scenario(0.0, 1)
    };
    let params = &scenario.params;
    let predicted =
        params.k_front * (params.l_max_mm - params.l_min_mm) / params.l_max_mm * 1.0;
    let trajectory = run(&scenario).unwrap();
    let measured = trajectory.samples[0].heading_deg - trajectory.samples[2].heading_deg;
    assert!(
        (measured - predicted).abs() / predicted < 0.01,
        "per-cycle change {measured} vs {predicted}"
    );
    println!(
        "criterion 7: PASS - per-cycle decay {measured:.6} deg within 1% of {predicted:.6} deg"
    );
}

#[test]
fn criterion_08_both_optimizers_recover_a_known_gain() {
    let truth = Scenario {
        params: GaitParams {
            k_front: 0.35,
            ..GaitParams::default()
        },
        ..uniform_scenario(20.0, 60)
    };
    let reference = run(&truth).unwrap();
    let points: Vec<(f64, f64)> = [10usize, 30, 60, 80, 100, 120]
        .iter()
        .map(|&i| {
            let s = &reference.samples[i];
            (s.time_s, s.heading_deg)
        })
        .collect();
    let problem = FitProblem {
        series: vec![ObservationSeries {
            scenario: uniform_scenario(20.0, 60),
            points,
        }],
        free: vec![(FreeParam::KFront, (0.05, 0.95))],
    };

    let fitted = |result: &FitResult| result.params[0].1;
    let golden = fit_golden(&problem).unwrap();
    let simplex = fit_nelder_mead(&problem, &NelderMeadOptions::default()).unwrap();
    assert!(
        (fitted(&golden) - 0.35).abs() < 1e-3,
        "golden recovered {}",
        fitted(&golden)
    );
    assert!(
        (fitted(&simplex) - 0.35).abs() < 1e-3,
        "simplex recovered {}",
        fitted(&simplex)
    );

    let golden_again = fit_golden(&problem).unwrap();
    let simplex_again = fit_nelder_mead(&problem, &NelderMeadOptions::default()).unwrap();
    assert_eq!(fitted(&golden).to_bits(), fitted(&golden_again).to_bits());
    assert_eq!(golden.sse.to_bits(), golden_again.sse.to_bits());
    assert_eq!(golden.evaluations, golden_again.evaluations);
    assert_eq!(fitted(&simplex).to_bits(), fitted(&simplex_again).to_bits());
    assert_eq!(simplex.sse.to_bits(), simplex_again.sse.to_bits());
    assert_eq!(simplex.evaluations, simplex_again.evaluations);
    println!(
        "criterion 8: PASS - golden {:.6} and simplex {:.6} both recover 0.35, reruns bit-identical",
        fitted(&golden),
        fitted(&simplex)
    );
}

#[test]
fn criterion_09_planned_courses_survive_re_simulation() {
    let params = GaitParams::default();
    let turn = 30f64.to_radians();
    let elbow = Vec2::new(140.0, 0.0);
    let goal = elbow + Vec2::new(160.0 * turn.cos(), -160.0 * turn.sin());
    let target = PathTarget {
        waypoints: vec![elbow, goal],
        tolerance_mm: 2.0,
    };
    let palette = TilePalette {
        angles_deg: (-9..=9).map(|i| 5.0 * i as f64).collect(),
        tile_length_mm: 50.0,
        max_tiles: 12,
    };
    let initial = course_start(&params);
    let rough = plan_greedy(&target, &palette, &params, &initial).unwrap();
    let plan = refine(&rough, &target, &params, cli::REFINE_STEP_DEG).unwrap();
    let metrics = evaluate(&plan, &target).unwrap();
    assert!(
        metrics.final_miss_mm < 2.0,
        "final miss {}",
        metrics.final_miss_mm
    );

    let (resim, resim_cycles) = simulate_course(&plan.tiles, &params, &initial).unwrap();
    let replay = Plan {
        tiles: plan.tiles.clone(),
        predicted: resim,
        cycles_per_tile: resim_cycles,
        converged: plan.converged,
    };
    let replayed = evaluate(&replay, &target).unwrap();
    assert!(
        (replayed.final_miss_mm - metrics.final_miss_mm).abs()
            <= 1e-9 * metrics.final_miss_mm.max(1.0),
        "replayed miss {} vs {}",
        replayed.final_miss_mm,
        metrics.final_miss_mm
    );
    println!(
        "criterion 9: PASS - 30 deg turn planned to {:.3} mm miss, re-simulation agrees",
        metrics.final_miss_mm
    );
}

#[test]
fn criterion_10_meshes_are_watertight_and_sized_exactly() {
    let tile = |angle: f64, ridge: f64| {
        SubstrateTile::new(
            0,
            0.0,
            4.5,
            0.0,
            10.0,
            GrooveSpec::new(angle, 0.45, ridge).unwrap(),
        )
        .unwrap()
    };
    for angle in [0.0, 30.0, -77.3, 90.0] {
        for ridge in [0.0, 0.15] {
            let mesh = substrate_mesh(&tile(angle, ridge), 2.0).unwrap();
            assert!(mesh.watertight(), "angle {angle} ridge {ridge}");
            let mut bytes = Vec::new();
            let written = write_stl(&mesh, &mut bytes).unwrap();
            assert_eq!(written as usize, bytes.len());
            assert_eq!(bytes.len(), 84 + 50 * mesh.triangle_count());
        }
    }

    // Grooves along the tile with a whole number of pitches: the ridges add
    // exactly half their height over the full area.
    let slab_and_ridge = 4.5 * 10.0 * (2.0 + 0.15 / 2.0);
    let volume = substrate_mesh(&tile(0.0, 0.15), 2.0).unwrap().signed_volume_mm3();
    assert!(
        (volume - slab_and_ridge).abs() / slab_and_ridge < 1e-6,
        "volume {volume} vs {slab_and_ridge}"
    );
    let flat = substrate_mesh(&tile(45.0, 0.0), 2.0).unwrap().signed_volume_mm3();
    assert!((flat - 90.0).abs() / 90.0 < 1e-6, "flat volume {flat}");
    println!("criterion 10: PASS - meshes watertight, STL bytes exact, volumes match closed form");
}

#[test]
fn criterion_11_simulation_throughput() {
    let _guard = TIMING.lock().unwrap_or_else(|e| e.into_inner());
    let long = uniform_scenario(30.0, 500_000);
    let started = Instant::now();
    let trajectory = run(&long).unwrap();
    let half_cycle_time = started.elapsed();
    assert_eq!(trajectory.samples.len(), 1_000_001);
    assert!(
        half_cycle_time < Duration::from_secs(1),
        "1e6 half-cycles took {half_cycle_time:?}"
    );

    let base = uniform_scenario(0.0, 200);
    let angles: Vec<f64> = (0..1000).map(|i| -45.0 + 90.0 * i as f64 / 999.0).collect();
    let started = Instant::now();
    let rows = sweep(&base, &angles).unwrap();
    let sweep_time = started.elapsed();
    assert_eq!(rows.len(), 1000);
    assert!(
        sweep_time < Duration::from_secs(5),
        "1000-course sweep took {sweep_time:?}"
    );
    println!(
        "criterion 11: PASS - 1e6 half-cycles in {half_cycle_time:?}, 1000-course sweep in {sweep_time:?}"
    );
}

#[test]
fn criterion_12_every_output_format_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    let bytes = |name: &str| std::fs::read(path(name)).unwrap();

    let scenario = scenario_file("fig8a.toml");
    cli::simulate(&scenario, &path("a.csv")).unwrap();
    cli::simulate(&scenario, &path("b.csv")).unwrap();
    assert_eq!(bytes("a.csv"), bytes("b.csv"), "trajectory CSV differs");

    cli::sweep(&scenario, &[-30.0, -15.0, 0.0, 15.0, 30.0], &path("a_sweep.csv")).unwrap();
    cli::sweep(&scenario, &[-30.0, -15.0, 0.0, 15.0, 30.0], &path("b_sweep.csv")).unwrap();
    assert_eq!(bytes("a_sweep.csv"), bytes("b_sweep.csv"), "sweep CSV differs");

    cli::plot(&[path("a.csv")], &path("a.svg"), true).unwrap();
    cli::plot(&[path("a.csv")], &path("b.svg"), true).unwrap();
    assert_eq!(bytes("a.svg"), bytes("b.svg"), "SVG differs");

    for pass in ["ma", "mb"] {
        cli::mesh(&scenario, &path(pass), 2.0, 150.0).unwrap();
    }
    let stls: Vec<_> = std::fs::read_dir(path("ma"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert!(!stls.is_empty());
    for name in &stls {
        assert_eq!(
            std::fs::read(path("ma").join(name)).unwrap(),
            std::fs::read(path("mb").join(name)).unwrap(),
            "STL {name:?} differs"
        );
    }
    println!("criterion 12: PASS - CSV, SVG, and STL outputs byte-identical across reruns");
}
