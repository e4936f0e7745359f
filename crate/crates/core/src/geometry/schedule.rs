use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{Condition, PointDeg};
use crate::rng::{self, Purpose};

/// Initial cursor–target distances of every exercise.
pub const DISTANCES_DEG: [f64; 4] = [3.5, 7.0, 10.5, 14.0];
pub const TRIALS_PER_DISTANCE: usize = 6;
pub const TRIALS_PER_EXERCISE: usize = DISTANCES_DEG.len() * TRIALS_PER_DISTANCE;

/// One planned trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    /// Position of the trial in the exercise, starting at 0.
    pub trial_id: u32,
    pub condition: Condition,
    pub distance_deg: f64,
    /// Roll angle of the initial cursor position around the target.
    pub angle_rad: f64,
    /// Per-trial seed for consumers that need their own randomness.
    pub seed: u64,
}

/// The 24-trial plan of one exercise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSchedule {
    pub exercise_id: String,
    pub condition: Condition,
    pub seed: u64,
    /// First roll angle drawn for each entry of [`DISTANCES_DEG`].
    pub base_angles_rad: [f64; 4],
    pub trials: Vec<TrialSpec>,
}

impl TrialSchedule {
    pub fn trial(&self, trial_id: u32) -> Option<&TrialSpec> {
        self.trials.get(trial_id as usize).filter(|t| t.trial_id == trial_id)
    }
}

/// Draws the exercise plan for `(condition, seed)`.
///
/// For each distance one base roll angle is drawn uniformly on `[0, 2π)` and
/// the six angles are `base + kπ/3`. The 24 trials are then shuffled
/// (Fisher–Yates) from the same stream and receive their ids and seeds.
/// Trial seeds keep 53 bits so they survive a round trip through a
/// JavaScript number.
pub fn generate_schedule(condition: Condition, seed: u64) -> TrialSchedule {
    let mut rng = rng::stream(seed, Purpose::Schedule, condition.ordinal());
    let mut base_angles_rad = [0.0; 4];
    let mut planned = Vec::with_capacity(super::TRIALS_PER_EXERCISE);
    for (slot, &distance) in DISTANCES_DEG.iter().enumerate() {
        let base = rng.random_range(0.0..TAU);
        base_angles_rad[slot] = base;
        for k in 0..TRIALS_PER_DISTANCE {
            planned.push((distance, (base + k as f64 * PI / 3.0).rem_euclid(TAU)));
        }
    }
    planned.shuffle(&mut rng);
    let trials = planned
        .into_iter()
        .enumerate()
        .map(|(i, (distance_deg, angle_rad))| TrialSpec {
            trial_id: i as u32,
            condition,
            distance_deg,
            angle_rad,
            seed: rng.next_u64() >> 11,
        })
        .collect();
    TrialSchedule {
        exercise_id: format!("{condition}-{seed:016x}"),
        condition,
        seed,
        base_angles_rad,
        trials,
    }
}

/// Where the cursor appears at trial start; the target is always the origin.
pub fn initial_cursor_position(spec: &TrialSpec) -> PointDeg {
    PointDeg::from_polar(spec.distance_deg, spec.angle_rad)
}
