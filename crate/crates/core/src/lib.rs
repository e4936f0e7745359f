//! Core of the radial-cue pointer laboratory.
//!
//! The crate is split the same way the lab workflow is:
//!
//! * [`geometry`] projects visual angles onto the screen, builds the ray
//!   field that converges on the cursor and draws the seeded trial plan.
//! * [`session`] is the on-disk session log model and its validator.
//! * [`metrics`] derives per-trial timings, trajectory quantities and gaze
//!   profiles from a log.
//! * [`stats`] holds the Mann–Whitney test and the regression fits.
//! * [`simulator`] generates synthetic participants for every condition.
//! * [`analysis`] turns a set of sessions into a report bundle.
//!
//! All angles are in degrees of visual field unless a name says otherwise,
//! with the target fixed at the origin.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod geometry;
pub mod metrics;
pub mod par;
pub mod rng;
pub mod session;
pub mod simulator;
pub mod stats;

pub use geometry::{Condition, PointDeg, TrialSchedule, TrialSpec};
pub use par::Execution;
pub use session::SessionLog;
