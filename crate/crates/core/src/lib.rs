//! Deterministic gait simulation and substrate design for groove-steered
//! inchworm crawlers.
//!
//! A two-foot crawler alternately anchors one foot and slides the other.
//! Parallel surface ridges bias each sliding foot toward the local ridge
//! normal, so patterned floor tiles steer the robot without any onboard
//! sensing. This crate models that interaction quasi-statically and builds
//! the surrounding tooling on top of it:
//!
//! - [`substrate`]: groove patterns, rectangular tiles, world maps.
//! - [`gait`]: the per-half-cycle stepping rule.
//! - [`sim`]: multi-cycle runs, trajectories, crossings, summaries.
//! - [`fit`]: least-squares calibration of the steering gains against
//!   recorded heading series.
//! - [`plan`]: inverse design of a tile sequence that walks the robot
//!   through waypoints.
//! - [`mesh`]: watertight triangle meshes of grooved tiles, exported as
//!   binary STL.
//! - [`cli`]: scenario files, CSV/SVG emission, and the command front end.
//!
//! Every operation is deterministic: identical inputs produce identical
//! output bytes, with no clocks, no global state, and no hidden randomness.

pub mod cli;
pub mod error;
pub mod fit;
pub mod gait;
pub mod geom;
pub mod mesh;
pub mod plan;
pub mod sim;
pub mod substrate;

pub use error::{Error, Result};
