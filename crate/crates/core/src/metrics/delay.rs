use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::geometry::TrialSpec;
use crate::session::ParticipantProfile;

/// How much of the extra movement time in a simulated-loss condition comes
/// from a longer path and how much from a slower pointer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayDecomposition {
    pub delta_mt_ms: f64,
    /// Extra time the longer path would take at the baseline velocity.
    pub delay_length_ms: f64,
    pub delay_velocity_ms: f64,
    /// `None` when `delta_mt_ms <= 0`.
    pub length_fraction: Option<f64>,
    pub velocity_fraction: Option<f64>,
}

impl DelayDecomposition {
    pub fn fractions_defined(&self) -> bool {
        self.length_fraction.is_some()
    }
}

/// Lengths in degrees, velocities in degrees per second.
pub fn delay_decomposition(
    mean_l_sim: f64,
    mean_v_sim: f64,
    mean_l_base: f64,
    mean_v_base: f64,
) -> Result<DelayDecomposition, MetricsError> {
    if !(mean_v_sim.is_finite() && mean_v_sim > 0.0) {
        return Err(MetricsError::NonPositive("simulated-loss velocity"));
    }
    if !(mean_v_base.is_finite() && mean_v_base > 0.0) {
        return Err(MetricsError::NonPositive("baseline velocity"));
    }
    let delta_mt_ms = (mean_l_sim / mean_v_sim - mean_l_base / mean_v_base) * 1000.0;
    let delay_length_ms = (mean_l_sim - mean_l_base) / mean_v_base * 1000.0;
    let delay_velocity_ms = delta_mt_ms - delay_length_ms;
    let defined = delta_mt_ms > 0.0;
    Ok(DelayDecomposition {
        delta_mt_ms,
        delay_length_ms,
        delay_velocity_ms,
        length_fraction: defined.then(|| delay_length_ms / delta_mt_ms),
        velocity_fraction: defined.then(|| delay_velocity_ms / delta_mt_ms),
    })
}

/// Visual field radius over the initial target distance.
pub fn vf_idt_ratio(profile: &ParticipantProfile, spec: &TrialSpec) -> Result<f64, MetricsError> {
    let vf = profile.vf_radius_deg.ok_or(MetricsError::MissingVisualField)?;
    if !(spec.distance_deg > 0.0) {
        return Err(MetricsError::NonPositive("distance"));
    }
    Ok(vf / spec.distance_deg)
}
