//! Two-anchor crawling gait with groove-coupled steering.
//!
//! The robot is modelled as a segment between a rear and a front foot. A
//! cycle is one extension half-cycle (rear anchored, front slides out)
//! followed by one contraction half-cycle (front anchored, rear drags in).
//! While a foot slides, ridges under it deflect its travel direction toward
//! the local groove normal; the coupling gains `k_front` and `k_rear` give
//! the fraction of the groove-relative angle the foot actually turns by.
//!
//! Heading is updated by composing each half-cycle's body-frame rotation
//! onto the stored heading rather than by re-deriving it from foot
//! coordinates. Both agree to round-off, but the composed form is exact in
//! the two cases the model's guarantees depend on: zero deflection leaves
//! the heading bit-identical, and a constant-sign deflection sequence turns
//! the heading monotonically. Foot positions are then renormalized from the
//! heading, so the body length is exact by construction after every step.

use crate::error::{Error, Result};
use crate::geom::{deg_atan2, unit_from_deg, wrap_degrees, Vec2};
use crate::substrate::{groove_relative_angle, snap_to_ridge, TileRef, WorldMap};

/// Which half of the cycle the state sits at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Contracted,
    Extended,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Contracted => "contracted",
            Phase::Extended => "extended",
        }
    }
}

/// Geometry, actuation, and steering parameters of the crawler.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaitParams {
    /// Body length at zero drive voltage, mm.
    pub l_min_mm: f64,
    /// Body length at peak drive voltage, mm.
    pub l_max_mm: f64,
    /// Peak drive voltage, kV.
    pub v_max_kv: f64,
    /// Gait cycle frequency, Hz.
    pub frequency_hz: f64,
    /// Front-foot steering gain in [0, 1].
    pub k_front: f64,
    /// Rear-foot steering gain in [0, 1].
    pub k_rear: f64,
    /// Fraction of the stroke realized as front-foot travel, in (0, 1].
    /// The remainder is rear-foot backslip during extension.
    pub beta: f64,
    /// Quantize the front foot onto ridge crests after each extension.
    pub snap_to_ridge: bool,
}

impl Default for GaitParams {
    fn default() -> Self {
        GaitParams {
            l_min_mm: 25.0,
            l_max_mm: 27.0,
            v_max_kv: 1.9,
            frequency_hz: 0.4,
            k_front: 0.5,
            k_rear: 0.0,
            beta: 1.0,
            snap_to_ridge: false,
        }
    }
}

impl GaitParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("l_min_mm", self.l_min_mm),
            ("l_max_mm", self.l_max_mm),
            ("v_max_kv", self.v_max_kv),
            ("frequency_hz", self.frequency_hz),
            ("k_front", self.k_front),
            ("k_rear", self.k_rear),
            ("beta", self.beta),
        ] {
            if !v.is_finite() {
                return Err(Error::Invalid {
                    field: "gait parameters",
                    message: format!("{name} is not finite"),
                });
            }
        }
        if self.l_min_mm <= 0.0 {
            return Err(Error::invalid("l_min_mm", "must be > 0"));
        }
        if self.l_max_mm <= self.l_min_mm {
            return Err(Error::invalid("l_max_mm", "must be > l_min_mm"));
        }
        if self.v_max_kv <= 0.0 {
            return Err(Error::invalid("v_max_kv", "must be > 0"));
        }
        if self.frequency_hz <= 0.0 {
            return Err(Error::invalid("frequency_hz", "must be > 0"));
        }
        if !(0.0..=1.0).contains(&self.k_front) {
            return Err(Error::invalid("k_front", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.k_rear) {
            return Err(Error::invalid("k_rear", "must lie in [0, 1]"));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::invalid("beta", "must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Stroke length: how much the body lengthens per extension, mm.
    pub fn stroke_mm(&self) -> f64 {
        self.l_max_mm - self.l_min_mm
    }

    /// Body length at drive voltage `v_kv`: linear between the two length
    /// endpoints. Voltages outside [0, v_max_kv] are rejected.
    pub fn length_at_voltage(&self, v_kv: f64) -> Result<f64> {
        if !v_kv.is_finite() || v_kv < 0.0 || v_kv > self.v_max_kv {
            return Err(Error::VoltageOutOfRange {
                v_kv,
                v_max_kv: self.v_max_kv,
            });
        }
        Ok(self.l_min_mm + (v_kv / self.v_max_kv) * self.stroke_mm())
    }

    /// First-order per-cycle heading change (degrees) for a constant
    /// groove-relative angle `delta_deg`, with the rear gain at zero.
    pub fn linearized_turn_per_cycle(&self, delta_deg: f64) -> f64 {
        self.k_front * self.beta * self.stroke_mm() / self.l_max_mm * delta_deg
    }

    /// Factor by which the groove-relative angle shrinks each cycle near
    /// alignment (rear gain zero). Defaults give 1 - 1/27.
    pub fn alignment_ratio(&self) -> f64 {
        1.0 - self.k_front * self.beta * self.stroke_mm() / self.l_max_mm
    }
}

/// Robot pose between half-cycles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobotState {
    pub rear_mm: Vec2,
    pub front_mm: Vec2,
    /// Body axis direction, internal convention. Kept in lockstep with the
    /// foot positions by the steppers; see the module docs.
    pub heading_deg: f64,
    pub phase: Phase,
    /// Completed full cycles.
    pub cycle_index: u64,
    pub time_s: f64,
}

impl RobotState {
    /// Contracted rest pose at the start of a run.
    pub fn contracted(rear_mm: Vec2, heading_deg: f64, params: &GaitParams) -> Self {
        let heading = wrap_degrees(heading_deg);
        RobotState {
            rear_mm,
            front_mm: rear_mm + unit_from_deg(heading) * params.l_min_mm,
            heading_deg: heading,
            phase: Phase::Contracted,
            cycle_index: 0,
            time_s: 0.0,
        }
    }

    pub fn body_length_mm(&self) -> f64 {
        self.front_mm.distance(self.rear_mm)
    }
}

/// Direction of the body axis implied by the foot positions alone.
pub fn heading_between(rear_mm: Vec2, front_mm: Vec2) -> Result<f64> {
    let d = front_mm - rear_mm;
    if d.x == 0.0 && d.y == 0.0 {
        return Err(Error::invalid("state", "feet coincide, heading undefined"));
    }
    Ok(deg_atan2(d.y, d.x))
}

fn check_not_degenerate(state: &RobotState) -> Result<()> {
    if state.front_mm == state.rear_mm {
        return Err(Error::DegenerateState {
            cycle: state.cycle_index,
        });
    }
    Ok(())
}

/// Steering deflections for the two feet at the current pose, degrees.
/// Each foot reads the groove under its own position at the start of the
/// half-cycle.
fn deflections(state: &RobotState, world: &WorldMap, params: &GaitParams) -> (f64, f64) {
    let psi = state.heading_deg;
    let front = params.k_front * groove_relative_angle(world.groove_at(state.front_mm), psi);
    let rear = params.k_rear * groove_relative_angle(world.groove_at(state.rear_mm), psi);
    (front, rear)
}

/// Extension half-cycle: the rear foot anchors, the front foot slides out
/// by `beta * stroke` along the deflected heading, and any remaining stroke
/// shows up as rear backslip along its own deflected direction. Afterwards
/// the body is renormalized to `l_max_mm` behind the new front position.
pub fn extension_step(state: &RobotState, world: &WorldMap, params: &GaitParams) -> Result<RobotState> {
    if state.phase != Phase::Contracted {
        return Err(Error::PhaseOrder {
            expected: Phase::Contracted,
            found: state.phase,
        });
    }
    check_not_degenerate(state)?;

    let psi = state.heading_deg;
    let stroke = params.stroke_mm();
    let (da_front, da_rear) = deflections(state, world, params);
    let front_travel = params.beta * stroke;
    let rear_travel = (1.0 - params.beta) * stroke;

    let mut front = state.front_mm + unit_from_deg(psi + da_front) * front_travel;

    let heading = if params.snap_to_ridge {
        if let TileRef::Tile(id) = world.locate(front) {
            front = snap_to_ridge(world.tile(id).expect("tile id from locate"), front)?;
        }
        let rear = state.rear_mm - unit_from_deg(psi + da_rear) * rear_travel;
        wrap_degrees(heading_between(rear, front).map_err(|_| Error::DegenerateState {
            cycle: state.cycle_index,
        })?)
    } else {
        // Body-frame form of the same geometry: the pre-step body vector is
        // (l_min, 0), so the new axis direction follows from the two foot
        // displacements alone. Exact when both deflections are zero.
        let fa = da_front.to_radians();
        let ra = da_rear.to_radians();
        let bx = params.l_min_mm + front_travel * fa.cos() + rear_travel * ra.cos();
        let by = front_travel * fa.sin() + rear_travel * ra.sin();
        wrap_degrees(psi + by.atan2(bx).to_degrees())
    };

    Ok(RobotState {
        rear_mm: front - unit_from_deg(heading) * params.l_max_mm,
        front_mm: front,
        heading_deg: heading,
        phase: Phase::Extended,
        cycle_index: state.cycle_index,
        time_s: (2 * state.cycle_index + 1) as f64 / (2.0 * params.frequency_hz),
    })
}

/// Contraction half-cycle: the front foot anchors and the rear foot drags
/// forward by the full stroke along its deflected direction, then the body
/// is renormalized to `l_min_mm` behind the front foot.
pub fn contraction_step(
    state: &RobotState,
    world: &WorldMap,
    params: &GaitParams,
) -> Result<RobotState> {
    if state.phase != Phase::Extended {
        return Err(Error::PhaseOrder {
            expected: Phase::Extended,
            found: state.phase,
        });
    }
    check_not_degenerate(state)?;

    let psi = state.heading_deg;
    let stroke = params.stroke_mm();
    let da_rear = params.k_rear * groove_relative_angle(world.groove_at(state.rear_mm), psi);

    // Body frame: the rear foot moves by stroke * (cos ra, sin ra) toward
    // the front, so the body vector shortens to (l_max - stroke cos ra,
    // -stroke sin ra). With k_rear = 0 the heading is preserved exactly.
    let ra = da_rear.to_radians();
    let bx = params.l_max_mm - stroke * ra.cos();
    let by = -(stroke * ra.sin());
    let heading = wrap_degrees(psi + by.atan2(bx).to_degrees());

    let cycle_index = state.cycle_index + 1;
    Ok(RobotState {
        rear_mm: state.front_mm - unit_from_deg(heading) * params.l_min_mm,
        front_mm: state.front_mm,
        heading_deg: heading,
        phase: Phase::Contracted,
        cycle_index,
        time_s: (2 * cycle_index) as f64 / (2.0 * params.frequency_hz),
    })
}

/// One full gait cycle: extension then contraction.
pub fn full_cycle(state: &RobotState, world: &WorldMap, params: &GaitParams) -> Result<RobotState> {
    let extended = extension_step(state, world, params)?;
    contraction_step(&extended, world, params)
}
