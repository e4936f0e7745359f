use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::geometry::Condition;

/// Affine map `slope·D + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineBias {
    pub slope: f64,
    pub intercept_deg: f64,
}

impl AffineBias {
    pub fn at(&self, distance_deg: f64) -> f64 {
        self.slope * distance_deg + self.intercept_deg
    }
}

/// How the affine distance formula is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasReading {
    /// The formula gives the error `D* − D`.
    #[default]
    Bias,
    /// The formula gives the estimated distance `D*` itself.
    RawEstimate,
}

/// Where the agent's knowledge of the cursor comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerceptionSource {
    /// The cursor is seen directly.
    Direct,
    /// The cursor offset is read off the ray field, with bias and noise.
    Rays,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionNoise {
    pub sd_near_rad: f64,
    pub sd_far_rad: f64,
    /// Distances at or beyond this use `sd_far_rad`.
    pub far_from_deg: f64,
}

impl DirectionNoise {
    pub fn sd_at(&self, distance_deg: f64) -> f64 {
        if distance_deg >= self.far_from_deg {
            self.sd_far_rad
        } else {
            self.sd_near_rad
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptionModel {
    pub source: PerceptionSource,
    pub distance_bias: AffineBias,
    #[serde(default)]
    pub bias_reading: BiasReading,
    /// `(distance_deg, sd_deg)` knots, interpolated linearly and held flat
    /// outside the first and last knot.
    pub distance_noise_sd_deg: Vec<(f64, f64)>,
    pub direction_noise: DirectionNoise,
    pub reperception_interval_ms: f64,
    /// Inside this radius around the target the cursor itself is visible and
    /// ray perception becomes exact.
    pub exact_radius_deg: f64,
    /// Re-perceive as soon as the cursor enters the exact radius instead of
    /// at the next regular tick.
    #[serde(default)]
    pub reperceive_on_entry: bool,
}

impl PerceptionModel {
    pub fn rays() -> Self {
        Self {
            source: PerceptionSource::Rays,
            distance_bias: AffineBias { slope: -0.47, intercept_deg: 2.95 },
            bias_reading: BiasReading::Bias,
            distance_noise_sd_deg: vec![(3.5, 2.0), (7.0, 2.4), (10.5, 2.6), (14.0, 3.1)],
            direction_noise: DirectionNoise { sd_near_rad: PI / 32.0, sd_far_rad: PI / 16.0, far_from_deg: 12.0 },
            reperception_interval_ms: 150.0,
            exact_radius_deg: 1.5,
            reperceive_on_entry: false,
        }
    }

    pub fn direct() -> Self {
        Self { source: PerceptionSource::Direct, ..Self::rays() }
    }

    /// Mean perceived distance for a true distance.
    pub fn mean_estimate(&self, distance_deg: f64) -> f64 {
        match self.bias_reading {
            BiasReading::Bias => distance_deg + self.distance_bias.at(distance_deg),
            BiasReading::RawEstimate => self.distance_bias.at(distance_deg),
        }
    }

    pub fn distance_sd(&self, distance_deg: f64) -> f64 {
        let knots = &self.distance_noise_sd_deg;
        let Some(&(x0, y0)) = knots.first() else { return 0.0 };
        if distance_deg <= x0 {
            return y0;
        }
        for w in knots.windows(2) {
            let ((xa, ya), (xb, yb)) = (w[0], w[1]);
            if distance_deg <= xb {
                return ya + (yb - ya) * (distance_deg - xa) / (xb - xa);
            }
        }
        knots[knots.len() - 1].1
    }

    fn validate(&self) -> Result<(), SimError> {
        let knots = &self.distance_noise_sd_deg;
        if knots.is_empty() || knots.iter().any(|&(d, sd)| !(d.is_finite() && sd.is_finite() && sd >= 0.0)) {
            return Err(SimError::InvalidModel("distance noise knots must be finite with sd >= 0".into()));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(SimError::InvalidModel("distance noise knots must be strictly increasing".into()));
        }
        let dn = &self.direction_noise;
        if !(dn.sd_near_rad >= 0.0 && dn.sd_far_rad >= 0.0) {
            return Err(SimError::InvalidModel("direction noise sd must be >= 0".into()));
        }
        if !(self.reperception_interval_ms > 0.0) {
            return Err(SimError::InvalidModel("reperception interval must be positive".into()));
        }
        if !(self.exact_radius_deg >= 0.0) {
            return Err(SimError::InvalidModel("exact radius must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VelocityLaw {
    /// Speed grows with the initial distance.
    Affine { slope: f64, intercept: f64 },
    /// Same speed at every distance.
    Constant { speed: f64 },
}

impl VelocityLaw {
    /// Mean movement velocity in deg/s for an initial distance.
    pub fn speed(&self, distance_deg: f64) -> f64 {
        match *self {
            VelocityLaw::Affine { slope, intercept } => slope * distance_deg + intercept,
            VelocityLaw::Constant { speed } => speed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MovementModel {
    pub velocity_law: VelocityLaw,
    /// SD of the per-chunk speed factor.
    pub velocity_jitter_sd: f64,
    /// Motor noise added to the heading at each reperception.
    pub heading_noise_sd_rad: f64,
    /// Fraction of the heading error corrected at each reperception.
    pub heading_gain: f64,
    /// Raise the commanded speed so path length over movement time, as
    /// measured on the sample grid, matches the law.
    pub sampling_compensation: bool,
}

impl MovementModel {
    pub fn affine() -> Self {
        Self {
            velocity_law: VelocityLaw::Affine { slope: 0.71, intercept: 13.0 },
            velocity_jitter_sd: 0.05,
            heading_noise_sd_rad: 0.03,
            heading_gain: 1.0,
            sampling_compensation: true,
        }
    }

    /// Constant speed with the wide heading scatter of ray-guided pointing,
    /// sized so paths run about 0.7 deg longer than with direct sight.
    pub fn constant(speed: f64) -> Self {
        Self { velocity_law: VelocityLaw::Constant { speed }, heading_noise_sd_rad: 0.3, ..Self::affine() }
    }
}

/// Normal latency, redrawn until positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    pub mean: f64,
    pub sd: f64,
}

impl Gaussian {
    pub const fn new(mean: f64, sd: f64) -> Self {
        Self { mean, sd }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        positive_normal(self.mean, self.sd, rng)
    }
}

/// Draw from N(mean, sd) truncated to positive values by rejection.
pub(crate) fn positive_normal<R: Rng + ?Sized>(mean: f64, sd: f64, rng: &mut R) -> f64 {
    if sd == 0.0 {
        return mean;
    }
    let dist = Normal::new(mean, sd).expect("sd validated");
    for _ in 0..1000 {
        let x = dist.sample(rng);
        if x > 0.0 {
            return x;
        }
    }
    mean
}

/// Time to find the cursor without rays, growing with distance over visual
/// field: `base + per_ratio·D/VF`, times a mean-one lognormal factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchModel {
    pub base_ms: f64,
    pub per_ratio_ms: f64,
    pub log_sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyModel {
    pub acquisition_ms: Gaussian,
    pub keystroke_ms: Gaussian,
    /// Replaces `acquisition_ms` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GazeScript {
    TargetLocked,
    FourPhaseSearch,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentModel {
    pub condition: Condition,
    pub perception: PerceptionModel,
    pub movement: MovementModel,
    pub latency: LatencyModel,
    pub gaze_script: GazeScript,
    pub sample_rate_hz: u32,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visual_field_deg: Option<f64>,
}

/// Names accepted by [`AgentModel::preset`].
pub const PRESETS: [&str; 5] = ["cp-fvf", "sp-simpvl", "sp-pvl", "cp-pvl", "estimation"];

impl AgentModel {
    pub fn preset(name: &str) -> Result<Self, SimError> {
        let base = |condition, perception, movement, acq: Gaussian, key: Gaussian, gaze_script| Self {
            condition,
            perception,
            movement,
            latency: LatencyModel { acquisition_ms: acq, keystroke_ms: key, search: None },
            gaze_script,
            sample_rate_hz: 33,
            seed: 0,
            visual_field_deg: None,
        };
        let agent = match name {
            "cp-fvf" => base(
                Condition::CpFvf,
                PerceptionModel::direct(),
                MovementModel::affine(),
                Gaussian::new(320.0, 60.0),
                Gaussian::new(410.0, 80.0),
                GazeScript::None,
            ),
            "sp-simpvl" => base(
                Condition::SpSimPvl,
                PerceptionModel::rays(),
                MovementModel::constant(12.0),
                Gaussian::new(390.0, 60.0),
                Gaussian::new(500.0, 80.0),
                GazeScript::TargetLocked,
            ),
            "sp-pvl" => {
                // the residual field around the fixated target plays the aperture's role
                let perception = PerceptionModel { exact_radius_deg: 3.0, ..PerceptionModel::rays() };
                let mut a = base(
                    Condition::SpPvl,
                    perception,
                    MovementModel::constant(12.0),
                    Gaussian::new(500.0, 100.0),
                    Gaussian::new(500.0, 100.0),
                    GazeScript::TargetLocked,
                );
                a.visual_field_deg = Some(3.0);
                a
            }
            "cp-pvl" => {
                let mut a = base(
                    Condition::CpPvl,
                    PerceptionModel::direct(),
                    MovementModel::affine(),
                    Gaussian::new(500.0, 100.0),
                    Gaussian::new(500.0, 100.0),
                    GazeScript::FourPhaseSearch,
                );
                a.visual_field_deg = Some(3.0);
                a.latency.search = Some(SearchModel { base_ms: 350.0, per_ratio_ms: 1170.0, log_sd: 0.6 });
                a
            }
            "estimation" => base(
                Condition::Estimation,
                PerceptionModel::rays(),
                MovementModel::constant(12.0),
                Gaussian::new(390.0, 60.0),
                Gaussian::new(500.0, 80.0),
                GazeScript::None,
            ),
            other => return Err(SimError::UnknownPreset(other.to_string())),
        };
        Ok(agent)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// The same agent with every noise source switched off.
    pub fn noiseless(mut self) -> Self {
        let p = &mut self.perception;
        p.distance_noise_sd_deg.iter_mut().for_each(|k| k.1 = 0.0);
        p.direction_noise.sd_near_rad = 0.0;
        p.direction_noise.sd_far_rad = 0.0;
        self.movement.velocity_jitter_sd = 0.0;
        self.movement.heading_noise_sd_rad = 0.0;
        self.latency.acquisition_ms.sd = 0.0;
        self.latency.keystroke_ms.sd = 0.0;
        if let Some(s) = self.latency.search.as_mut() {
            s.log_sd = 0.0;
        }
        self
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let agent: Self = serde_json::from_str(text).map_err(|e| SimError::InvalidModel(e.to_string()))?;
        agent.validate()?;
        Ok(agent)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.perception.validate()?;
        let m = &self.movement;
        let law_ok = match m.velocity_law {
            VelocityLaw::Affine { slope, intercept } => slope >= 0.0 && intercept > 0.0,
            VelocityLaw::Constant { speed } => speed > 0.0,
        };
        if !law_ok {
            return Err(SimError::InvalidModel("velocity law must give positive speeds".into()));
        }
        if !(m.velocity_jitter_sd >= 0.0 && m.heading_noise_sd_rad >= 0.0) {
            return Err(SimError::InvalidModel("movement noise must be >= 0".into()));
        }
        if !(m.heading_gain > 0.0 && m.heading_gain <= 1.0) {
            return Err(SimError::InvalidModel("heading gain must be in (0, 1]".into()));
        }
        for (name, g) in [("acquisition", self.latency.acquisition_ms), ("keystroke", self.latency.keystroke_ms)] {
            if !(g.mean > 0.0 && g.sd >= 0.0) {
                return Err(SimError::InvalidModel(format!("{name} latency needs mean > 0 and sd >= 0")));
            }
        }
        if let Some(s) = self.latency.search {
            if !(s.base_ms > 0.0 && s.per_ratio_ms >= 0.0 && s.log_sd >= 0.0) {
                return Err(SimError::InvalidModel("search model needs base > 0 and non-negative spread".into()));
            }
            if self.visual_field_deg.is_none() {
                return Err(SimError::InvalidModel("search model needs visual_field_deg".into()));
            }
        }
        if let Some(vf) = self.visual_field_deg {
            if !(vf > 0.0) {
                return Err(SimError::InvalidModel("visual field must be positive".into()));
            }
        }
        if !(1..=1000).contains(&self.sample_rate_hz) {
            return Err(SimError::InvalidModel("sample rate must be within 1..=1000 Hz".into()));
        }
        let rays = self.perception.source == PerceptionSource::Rays;
        if self.condition.rays_on() != rays && self.condition != Condition::Estimation {
            return Err(SimError::InvalidModel(format!(
                "condition {} needs {} perception",
                self.condition,
                if self.condition.rays_on() { "rays" } else { "direct" }
            )));
        }
        if self.condition == Condition::Estimation && !rays {
            return Err(SimError::InvalidModel("estimation needs rays perception".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_and_round_trip() {
        for name in PRESETS {
            let a = AgentModel::preset(name).unwrap();
            a.validate().unwrap();
            let json = serde_json::to_string_pretty(&a).unwrap();
            assert_eq!(AgentModel::from_json(&json).unwrap(), a);
        }
        assert!(matches!(AgentModel::preset("cp-xyz"), Err(SimError::UnknownPreset(_))));
    }

    #[test]
    fn bias_and_noise_tables() {
        let p = PerceptionModel::rays();
        assert!((p.mean_estimate(3.5) - 4.805).abs() < 1e-12);
        assert!((p.mean_estimate(14.0) - 10.37).abs() < 1e-12);
        assert!((p.distance_sd(7.0) - 2.4).abs() < 1e-12);
        assert!((p.distance_sd(8.75) - 2.5).abs() < 1e-12);
        assert_eq!(p.distance_sd(1.0), 2.0);
        assert_eq!(p.distance_sd(20.0), 3.1);
        assert_eq!(p.direction_noise.sd_at(10.5), PI / 32.0);
        assert_eq!(p.direction_noise.sd_at(14.0), PI / 16.0);
        let raw = PerceptionModel { bias_reading: BiasReading::RawEstimate, ..PerceptionModel::rays() };
        assert!((raw.mean_estimate(3.5) - 1.305).abs() < 1e-12);
    }

    #[test]
    fn mismatched_pairing_is_rejected() {
        let mut a = AgentModel::preset("sp-simpvl").unwrap();
        a.perception.source = PerceptionSource::Direct;
        assert!(a.validate().is_err());
        let mut b = AgentModel::preset("cp-fvf").unwrap();
        b.movement.heading_gain = 0.0;
        assert!(b.validate().is_err());
    }

    #[test]
    fn truncated_draws_are_positive() {
        let mut rng = crate::rng::stream(1, crate::rng::Purpose::Trial, 0);
        for _ in 0..1000 {
            assert!(Gaussian::new(10.0, 50.0).draw(&mut rng) > 0.0);
        }
    }
}
