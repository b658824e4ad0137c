//! Inverse substrate design: choose a sequence of grooved tiles that walks
//! the robot through a set of waypoints.
//!
//! Tiles are realized as fixed-length, axis-aligned strips laid one after
//! another along +x, starting at the robot's initial front-foot position.
//! Because strip rectangles are axis-aligned, the planner requires the
//! initial pose to head along +x; waypoints share the world frame of that
//! pose. A tile's groove angle is right-turn-positive, like every other
//! file-facing angle.
//!
//! The designer is a receding-horizon greedy search over a palette of
//! angles, optionally followed by a coordinate-descent polish that treats
//! the chosen angles as continuous.

use crate::error::{Error, Result};
use crate::gait::{full_cycle, GaitParams, Phase, RobotState};
use crate::geom::{deg_atan2, point_segment_distance, unit_from_deg, wrap_degrees, Vec2};
use crate::sim::{run, Scenario, Trajectory};
use crate::substrate::{GrooveSpec, SubstrateTile, WorldMap};

/// Waypoints the course must pass through, in order. The final waypoint is
/// the goal; a plan converges when the front-foot path comes within
/// `tolerance_mm` of it.
#[derive(Clone, Debug, PartialEq)]
pub struct PathTarget {
    pub waypoints: Vec<Vec2>,
    pub tolerance_mm: f64,
}

impl PathTarget {
    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(Error::invalid("waypoints", "need at least two"));
        }
        for w in &self.waypoints {
            if !w.x.is_finite() || !w.y.is_finite() {
                return Err(Error::invalid("waypoints", "non-finite coordinate"));
            }
        }
        for pair in self.waypoints.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::invalid(
                    "waypoints",
                    format!("consecutive duplicates at ({}, {})", pair[0].x, pair[0].y),
                ));
            }
        }
        if !(self.tolerance_mm.is_finite() && self.tolerance_mm > 0.0) {
            return Err(Error::invalid("tolerance_mm", "must be > 0"));
        }
        Ok(())
    }
}

/// What the designer may build with.
#[derive(Clone, Debug, PartialEq)]
pub struct TilePalette {
    /// Candidate groove angles, right-turn-positive, each in [-90, 90].
    pub angles_deg: Vec<f64>,
    /// Length of every placed tile along the course axis, > 0.
    pub tile_length_mm: f64,
    /// Hard cap on placed tiles.
    pub max_tiles: u32,
}

impl TilePalette {
    pub fn validate(&self) -> Result<()> {
        if self.angles_deg.is_empty() {
            return Err(Error::invalid("palette", "no candidate angles"));
        }
        for &a in &self.angles_deg {
            if !a.is_finite() || !(-90.0..=90.0).contains(&a) {
                return Err(Error::invalid(
                    "palette",
                    format!("angle {a} outside [-90, 90]"),
                ));
            }
        }
        if !(self.tile_length_mm.is_finite() && self.tile_length_mm > 0.0) {
            return Err(Error::invalid("tile_length_mm", "must be > 0"));
        }
        if self.max_tiles == 0 {
            return Err(Error::invalid("max_tiles", "must be >= 1"));
        }
        Ok(())
    }
}

/// One placed tile of the course.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannedTile {
    pub angle_deg: f64,
    pub length_mm: f64,
}

/// A designed course with its predicted run.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub tiles: Vec<PlannedTile>,
    /// Forward simulation of the finished course from the initial pose.
    pub predicted: Trajectory,
    /// Gait cycles spent on each tile, aligned with `tiles`.
    pub cycles_per_tile: Vec<u64>,
    /// Whether the path reached the final waypoint within tolerance.
    pub converged: bool,
}

/// Quality metrics of a plan against its target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanMetrics {
    /// Closest approach of the front-foot path to the final waypoint.
    pub final_miss_mm: f64,
    /// Worst closest approach over all waypoints.
    pub max_waypoint_miss_mm: f64,
    /// Total length of the placed tiles.
    pub total_course_length_mm: f64,
}

/// Canonical start pose for course planning: contracted, front foot at the
/// origin, heading along +x.
pub fn course_start(params: &GaitParams) -> RobotState {
    RobotState::contracted(Vec2::new(-params.l_min_mm, 0.0), 0.0, params)
}

fn validate_initial(initial: &RobotState, params: &GaitParams) -> Result<()> {
    if initial.phase != Phase::Contracted
        || initial.heading_deg != 0.0
        || (initial.body_length_mm() - params.l_min_mm).abs() > 1e-9
    {
        return Err(Error::invalid(
            "initial state",
            "planner tiles are laid along +x; start from a contracted pose heading 0",
        ));
    }
    if !(initial.front_mm.x.is_finite() && initial.front_mm.y.is_finite()) {
        return Err(Error::invalid("initial state", "non-finite position"));
    }
    Ok(())
}

fn validate_tiles(tiles: &[PlannedTile]) -> Result<()> {
    for t in tiles {
        if !t.angle_deg.is_finite() || !(-90.0..=90.0).contains(&t.angle_deg) {
            return Err(Error::invalid(
                "planned tile",
                format!("angle {} outside [-90, 90]", t.angle_deg),
            ));
        }
        if !(t.length_mm.is_finite() && t.length_mm > 0.0) {
            return Err(Error::invalid("planned tile", "length must be > 0"));
        }
    }
    Ok(())
}

/// World map realizing a tile sequence in front of `origin` (the initial
/// front-foot position): strip `i` spans the course axis from the summed
/// length of its predecessors to that sum plus its own length, wide enough
/// in y that the robot cannot leave it sideways.
pub fn course_world(tiles: &[PlannedTile], origin: Vec2) -> Result<WorldMap> {
    validate_tiles(tiles)?;
    let total: f64 = tiles.iter().map(|t| t.length_mm).sum();
    let band = 10.0 * total + 1000.0;
    let mut strips = Vec::with_capacity(tiles.len());
    let mut x = origin.x;
    for (i, t) in tiles.iter().enumerate() {
        strips.push(SubstrateTile::new(
            i as u32,
            x,
            x + t.length_mm,
            origin.y - band,
            origin.y + band,
            GrooveSpec::new(
                t.angle_deg,
                crate::substrate::DEFAULT_PITCH_MM,
                crate::substrate::DEFAULT_RIDGE_HEIGHT_MM,
            )?,
        )?);
        x += t.length_mm;
    }
    WorldMap::new(strips, GrooveSpec::default())
}

fn course_scenario(
    tiles: &[PlannedTile],
    params: &GaitParams,
    initial: &RobotState,
    cycles: u64,
) -> Result<Scenario> {
    Ok(Scenario {
        world: course_world(tiles, initial.front_mm)?,
        params: *params,
        initial_rear_mm: initial.rear_mm,
        initial_heading_deg: 0.0,
        cycles,
    })
}

fn per_tile_cycle_cap(length_mm: f64, params: &GaitParams) -> u64 {
    let per_cycle = params.beta * params.stroke_mm();
    (4.0 * length_mm / per_cycle).ceil() as u64 + 16
}

/// Steps from `state` until the front foot passes `x_end` or the cycle cap
/// runs out. Returns the end state, the cycle count, and the front-foot
/// positions after each cycle.
fn traverse_until(
    state: &RobotState,
    world: &WorldMap,
    params: &GaitParams,
    x_end: f64,
    cap: u64,
) -> Result<(RobotState, u64, Vec<Vec2>)> {
    let mut s = *state;
    let mut cycles = 0;
    let mut fronts = Vec::new();
    while s.front_mm.x < x_end && cycles < cap {
        s = full_cycle(&s, world, params)?;
        cycles += 1;
        fronts.push(s.front_mm);
    }
    Ok((s, cycles, fronts))
}

fn closest_approach(path: &[Vec2], p: Vec2) -> f64 {
    if path.is_empty() {
        return f64::INFINITY;
    }
    let mut best = path[0].distance(p);
    for pair in path.windows(2) {
        best = best.min(point_segment_distance(p, pair[0], pair[1]));
    }
    best
}

/// Designs a course greedily: tiles are placed one at a time, and each
/// placement simulates every palette angle across the new strip, keeping
/// the one whose exit heading points most directly at the next unreached
/// waypoint. Score ties prefer the smaller angle magnitude, then the more
/// negative angle. Placement stops once the path reaches the final
/// waypoint within tolerance or the tile budget is exhausted; running out
/// of tiles clears the plan's `converged` flag.
pub fn plan_greedy(
    target: &PathTarget,
    palette: &TilePalette,
    params: &GaitParams,
    initial: &RobotState,
) -> Result<Plan> {
    target.validate()?;
    palette.validate()?;
    params.validate()?;
    validate_initial(initial, params)?;

    let goal = *target.waypoints.last().unwrap();
    let origin = initial.front_mm;
    let mut state = *initial;
    let mut tiles: Vec<PlannedTile> = Vec::new();
    let mut cycles_per_tile: Vec<u64> = Vec::new();
    let mut path = vec![state.front_mm];
    let mut wp_idx = 0usize;
    let cap = per_tile_cycle_cap(palette.tile_length_mm, params);

    let mut converged = closest_approach(&path, goal) <= target.tolerance_mm;
    while !converged && (tiles.len() as u32) < palette.max_tiles {
        // Skip waypoints already satisfied or no longer ahead of the robot.
        while wp_idx + 1 < target.waypoints.len() {
            let wp = target.waypoints[wp_idx];
            let reached = closest_approach(&path, wp) <= target.tolerance_mm;
            let behind = (wp - state.front_mm).dot(unit_from_deg(state.heading_deg)) < 0.0;
            if reached || behind {
                wp_idx += 1;
            } else {
                break;
            }
        }
        let aim = target.waypoints[wp_idx];
        let x_end: f64 =
            origin.x + tiles.iter().map(|t| t.length_mm).sum::<f64>() + palette.tile_length_mm;

        let mut best: Option<(f64, f64, f64, (RobotState, u64, Vec<Vec2>))> = None;
        for &angle in &palette.angles_deg {
            let mut trial = tiles.clone();
            trial.push(PlannedTile {
                angle_deg: angle,
                length_mm: palette.tile_length_mm,
            });
            let world = course_world(&trial, origin)?;
            let outcome = traverse_until(&state, &world, params, x_end, cap)?;
            let to_wp = aim - outcome.0.front_mm;
            let error = if to_wp.norm() < 1e-12 {
                0.0
            } else {
                wrap_degrees(deg_atan2(to_wp.y, to_wp.x) - outcome.0.heading_deg).abs()
            };
            let key = (error, angle.abs(), angle);
            let better = match &best {
                None => true,
                Some((e, m, a, _)) => key < (*e, *m, *a),
            };
            if better {
                best = Some((key.0, key.1, key.2, outcome));
            }
        }

        let (_, _, angle, (end, cycles, fronts)) = best.expect("palette is non-empty");
        tiles.push(PlannedTile {
            angle_deg: angle,
            length_mm: palette.tile_length_mm,
        });
        cycles_per_tile.push(cycles);
        state = end;
        path.extend(fronts);
        converged = closest_approach(&path, goal) <= target.tolerance_mm;
    }

    let total_cycles = cycles_per_tile.iter().sum();
    let predicted = run(&course_scenario(&tiles, params, initial, total_cycles)?)?;
    Ok(Plan {
        tiles,
        predicted,
        cycles_per_tile,
        converged,
    })
}

/// Simulates a finished course from `initial` until the front foot passes
/// the course end (or a safety cap). Returns the trajectory and the
/// per-tile cycle counts.
pub fn simulate_course(
    tiles: &[PlannedTile],
    params: &GaitParams,
    initial: &RobotState,
) -> Result<(Trajectory, Vec<u64>)> {
    validate_tiles(tiles)?;
    params.validate()?;
    validate_initial(initial, params)?;
    let world = course_world(tiles, initial.front_mm)?;
    let mut state = *initial;
    let mut cycles_per_tile = Vec::with_capacity(tiles.len());
    let mut x_end = initial.front_mm.x;
    for t in tiles {
        x_end += t.length_mm;
        let cap = per_tile_cycle_cap(t.length_mm, params);
        let (end, cycles, _) = traverse_until(&state, &world, params, x_end, cap)?;
        state = end;
        cycles_per_tile.push(cycles);
    }
    let total = cycles_per_tile.iter().sum();
    let predicted = run(&course_scenario(tiles, params, initial, total)?)?;
    Ok((predicted, cycles_per_tile))
}

/// Scores a plan's predicted path against the target.
pub fn evaluate(plan: &Plan, target: &PathTarget) -> Result<PlanMetrics> {
    target.validate()?;
    let path: Vec<Vec2> = plan.predicted.samples.iter().map(|s| s.front_mm).collect();
    let goal = *target.waypoints.last().unwrap();
    let mut worst: f64 = 0.0;
    for &wp in &target.waypoints {
        worst = worst.max(closest_approach(&path, wp));
    }
    Ok(PlanMetrics {
        final_miss_mm: closest_approach(&path, goal),
        max_waypoint_miss_mm: worst,
        total_course_length_mm: plan.tiles.iter().map(|t| t.length_mm).sum(),
    })
}

/// Polishes a plan by coordinate descent on its tile angles, holding the
/// tile lengths fixed. Each pass perturbs every angle by the current step
/// in both directions (clamped to [-90, 90]) and keeps a strict
/// improvement of the final miss; a pass with no improvement halves the
/// step, and the search stops once the step drops below 0.1 degrees.
pub fn refine(
    plan: &Plan,
    target: &PathTarget,
    params: &GaitParams,
    initial_step_deg: f64,
) -> Result<Plan> {
    target.validate()?;
    if !(initial_step_deg.is_finite() && initial_step_deg > 0.0) {
        return Err(Error::invalid("initial_step_deg", "must be > 0"));
    }
    let initial = RobotState::contracted(plan.predicted.scenario.initial_rear_mm, 0.0, params);
    let goal = *target.waypoints.last().unwrap();
    let mut tiles = plan.tiles.clone();
    if tiles.is_empty() {
        return Ok(plan.clone());
    }

    let miss_of = |tiles: &[PlannedTile]| -> Result<f64> {
        let (trajectory, _) = simulate_course(tiles, params, &initial)?;
        let path: Vec<Vec2> = trajectory.samples.iter().map(|s| s.front_mm).collect();
        Ok(closest_approach(&path, goal))
    };

    let mut best_miss = miss_of(&tiles)?;
    let mut step = initial_step_deg;
    while step >= 0.1 {
        let mut improved = false;
        for i in 0..tiles.len() {
            let base = tiles[i].angle_deg;
            let mut candidate: Option<(f64, f64, f64)> = None;
            for trial in [base + step, base - step] {
                let trial = trial.clamp(-90.0, 90.0);
                if trial == base {
                    continue;
                }
                tiles[i].angle_deg = trial;
                let miss = miss_of(&tiles)?;
                let key = (miss, trial.abs(), trial);
                if candidate.map_or(true, |c| key < c) {
                    candidate = Some(key);
                }
            }
            match candidate {
                Some((miss, _, trial)) if miss < best_miss => {
                    tiles[i].angle_deg = trial;
                    best_miss = miss;
                    improved = true;
                }
                _ => tiles[i].angle_deg = base,
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    let (predicted, cycles_per_tile) = simulate_course(&tiles, params, &initial)?;
    Ok(Plan {
        tiles,
        predicted,
        cycles_per_tile,
        converged: best_miss <= target.tolerance_mm,
    })
}
