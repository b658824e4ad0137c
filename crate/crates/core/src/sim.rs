//! Scenario-level simulation: many cycles over a tiled world, with sampled
//! trajectories, tile-crossing events, and summary statistics.
//!
//! Headings in [`Scenario`], [`Sample`], and [`Summary`] use the
//! right-turn-positive file convention; conversion to the internal
//! counter-clockwise convention happens on entry and exit of this module.

use crate::error::{Error, Result};
use crate::gait::{contraction_step, extension_step, GaitParams, Phase, RobotState};
use crate::geom::Vec2;
use crate::substrate::{
    groove_relative_angle, internal_angle_to_reported, reported_angle_to_internal, TileRef, WorldMap,
};

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub world: WorldMap,
    pub params: GaitParams,
    pub initial_rear_mm: Vec2,
    /// Initial body-axis direction, right-turn-positive.
    pub initial_heading_deg: f64,
    pub cycles: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !self.initial_rear_mm.x.is_finite() || !self.initial_rear_mm.y.is_finite() {
            return Err(Error::invalid("initial_rear_mm", "must be finite"));
        }
        if !self.initial_heading_deg.is_finite() {
            return Err(Error::invalid("initial_heading_deg", "must be finite"));
        }
        Ok(())
    }

    /// Starting pose in internal conventions.
    pub fn initial_state(&self) -> RobotState {
        RobotState::contracted(
            self.initial_rear_mm,
            reported_angle_to_internal(self.initial_heading_deg),
            &self.params,
        )
    }
}

/// One recorded pose. Runs record the initial pose and the pose after every
/// half-cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub time_s: f64,
    pub phase: Phase,
    pub rear_mm: Vec2,
    pub front_mm: Vec2,
    /// Right-turn-positive.
    pub heading_deg: f64,
    pub front_tile: TileRef,
    pub rear_tile: TileRef,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub scenario: Scenario,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn final_sample(&self) -> &Sample {
        self.samples.last().expect("runs record at least one sample")
    }
}

fn sample_of(state: &RobotState, world: &WorldMap) -> Sample {
    Sample {
        time_s: state.time_s,
        phase: state.phase,
        rear_mm: state.rear_mm,
        front_mm: state.front_mm,
        heading_deg: internal_angle_to_reported(state.heading_deg),
        front_tile: world.locate(state.front_mm),
        rear_tile: world.locate(state.rear_mm),
    }
}

/// Runs the scenario for its full cycle count. The trajectory holds
/// `2 * cycles + 1` samples; sample `i` sits at time `i / (2 f)`.
pub fn run(scenario: &Scenario) -> Result<Trajectory> {
    scenario.validate()?;
    let world = &scenario.world;
    let params = &scenario.params;
    let mut state = scenario.initial_state();
    let mut samples = Vec::with_capacity(2 * scenario.cycles as usize + 1);
    samples.push(sample_of(&state, world));
    for _ in 0..scenario.cycles {
        state = extension_step(&state, world, params)?;
        samples.push(sample_of(&state, world));
        state = contraction_step(&state, world, params)?;
        samples.push(sample_of(&state, world));
    }
    Ok(Trajectory {
        scenario: scenario.clone(),
        samples,
    })
}

/// Which foot crossed a tile boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Foot {
    Front,
    Rear,
}

/// A foot resolving to a different patch than at the previous sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingEvent {
    /// Index of the first sample on the new patch.
    pub sample_index: usize,
    pub foot: Foot,
    pub from: TileRef,
    pub to: TileRef,
}

/// Lists tile-crossing events in sample order, front foot first when both
/// feet cross at the same sample. Tile membership is re-resolved against
/// `world`, which must be the map the trajectory was produced on.
pub fn crossings(trajectory: &Trajectory, world: &WorldMap) -> Vec<CrossingEvent> {
    let mut events = Vec::new();
    let located: Vec<(TileRef, TileRef)> = trajectory
        .samples
        .iter()
        .map(|s| (world.locate(s.front_mm), world.locate(s.rear_mm)))
        .collect();
    for i in 1..located.len() {
        let (front, rear) = located[i];
        let (prev_front, prev_rear) = located[i - 1];
        if front != prev_front {
            events.push(CrossingEvent {
                sample_index: i,
                foot: Foot::Front,
                from: prev_front,
                to: front,
            });
        }
        if rear != prev_rear {
            events.push(CrossingEvent {
                sample_index: i,
                foot: Foot::Rear,
                from: prev_rear,
                to: rear,
            });
        }
    }
    events
}

/// Aggregate statistics of one trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    /// Right-turn-positive heading at the final sample.
    pub final_heading_deg: f64,
    /// Straight-line distance between first and last front-foot positions.
    pub net_displacement_mm: f64,
    /// Arc length of the front-foot polyline.
    pub path_length_mm: f64,
    /// Mean heading over the samples whose front foot sat on each patch,
    /// ordered by tile id with the background last.
    pub per_tile_mean_heading: Vec<(TileRef, f64)>,
}

pub fn summarize(trajectory: &Trajectory) -> Summary {
    let samples = &trajectory.samples;
    assert!(!samples.is_empty(), "trajectory has no samples");
    let first = &samples[0];
    let last = samples.last().unwrap();

    let mut path_length = 0.0;
    for pair in samples.windows(2) {
        path_length += pair[1].front_mm.distance(pair[0].front_mm);
    }

    let mut groups: Vec<(TileRef, f64, u64)> = Vec::new();
    for s in samples {
        match groups.iter_mut().find(|(t, _, _)| *t == s.front_tile) {
            Some((_, sum, n)) => {
                *sum += s.heading_deg;
                *n += 1;
            }
            None => groups.push((s.front_tile, s.heading_deg, 1)),
        }
    }
    groups.sort_by_key(|(t, _, _)| *t);

    Summary {
        final_heading_deg: last.heading_deg,
        net_displacement_mm: last.front_mm.distance(first.front_mm),
        path_length_mm: path_length,
        per_tile_mean_heading: groups
            .into_iter()
            .map(|(t, sum, n)| (t, sum / n as f64))
            .collect(),
    }
}

/// One row of an angle sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    /// Groove angle applied uniformly to the whole world, right-turn-positive.
    pub angle_deg: f64,
    pub final_heading_deg: f64,
    /// First cycle at which the groove-relative angle has dropped to half
    /// its initial magnitude. Empty when the run starts aligned, or when the
    /// run ends before halving.
    pub cycles_to_half_alignment: Option<u64>,
}

/// Re-runs the scenario once per angle with every groove in the world set
/// to that angle. Rows come back in input order.
pub fn sweep(base: &Scenario, angles_deg: &[f64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(angles_deg.len());
    for &angle in angles_deg {
        let scenario = Scenario {
            world: base.world.with_uniform_angle(angle),
            ..base.clone()
        };
        let trajectory = run(&scenario)?;
        let groove = *scenario.world.background();

        let delta_at = |sample: &Sample| {
            groove_relative_angle(&groove, reported_angle_to_internal(sample.heading_deg))
        };
        let initial = delta_at(&trajectory.samples[0]).abs();
        let mut half = None;
        if initial != 0.0 {
            for cycle in 1..=scenario.cycles {
                let s = &trajectory.samples[2 * cycle as usize];
                if delta_at(s).abs() <= initial / 2.0 {
                    half = Some(cycle);
                    break;
                }
            }
        }
        rows.push(SweepRow {
            angle_deg: angle,
            final_heading_deg: trajectory.final_sample().heading_deg,
            cycles_to_half_alignment: half,
        });
    }
    Ok(rows)
}
