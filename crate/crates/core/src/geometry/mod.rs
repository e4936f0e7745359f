//! Visual-angle geometry, the ray field and the trial protocol.

mod projection;
mod rays;
mod schedule;

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use projection::{deg_to_px, mouse_gain, px_to_deg, MouseGain, PixelPoint, Projection};
pub use rays::{clamp_to_area, generate_rays, Aperture, ClipRegion, RayConfig, RayLength, Rgba, Segment};
pub use schedule::{
    generate_schedule, initial_cursor_position, TrialSchedule, TrialSpec, DISTANCES_DEG, TRIALS_PER_DISTANCE,
    TRIALS_PER_EXERCISE,
};

/// Radius of the clickable target disk (the target is 1° wide).
pub const TARGET_RADIUS_DEG: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("{field} must be strictly positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("pixel aspect {px:.4} differs from physical aspect {cm:.4} by more than 5%")]
    AspectMismatch { px: f64, cm: f64 },
    #[error("screen placement gives tan(half height) = {actual:.5}, expected {expected:.5} (±2%)")]
    Placement { actual: f64, expected: f64 },
    #[error("angle {0}° is outside the tangent projection domain (|angle| ≤ 89°)")]
    TangentDomain(f64),
    #[error("point is not finite or exceeds 90°")]
    PointOutOfRange,
    #[error("ray config: {0}")]
    RayConfig(&'static str),
    #[error("clip region: {0}")]
    Clip(&'static str),
}

/// A position in degrees of visual field, origin at the screen center,
/// x rightward and y upward.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PointDeg {
    pub x: f64,
    pub y: f64,
}

impl PointDeg {
    pub const ORIGIN: PointDeg = PointDeg { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, angle_rad: f64) -> Self {
        Self::new(radius * angle_rad.cos(), radius * angle_rad.sin())
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, other: PointDeg) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn distance(self, other: PointDeg) -> f64 {
        (self - other).norm()
    }

    /// Direction angle in `(-π, π]`.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_valid(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.x.abs() <= 90.0 && self.y.abs() <= 90.0
    }
}

impl Add for PointDeg {
    type Output = PointDeg;
    fn add(self, rhs: PointDeg) -> PointDeg {
        PointDeg::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for PointDeg {
    type Output = PointDeg;
    fn sub(self, rhs: PointDeg) -> PointDeg {
        PointDeg::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for PointDeg {
    type Output = PointDeg;
    fn mul(self, k: f64) -> PointDeg {
        PointDeg::new(self.x * k, self.y * k)
    }
}

/// Physical screen and its placement in front of the participant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenGeometry {
    pub width_px: u32,
    pub height_px: u32,
    pub width_cm: f64,
    pub height_cm: f64,
    pub viewing_distance_cm: f64,
    pub half_height_deg: f64,
}

impl Default for ScreenGeometry {
    /// 1680×1050 panel, 52×32 cm, at 59.7 cm so the top edge sits at 15°.
    fn default() -> Self {
        Self {
            width_px: 1680,
            height_px: 1050,
            width_cm: 52.0,
            height_cm: 32.0,
            viewing_distance_cm: 59.7,
            half_height_deg: 15.0,
        }
    }
}

impl ScreenGeometry {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let positive = [
            ("width_px", f64::from(self.width_px)),
            ("height_px", f64::from(self.height_px)),
            ("width_cm", self.width_cm),
            ("height_cm", self.height_cm),
            ("viewing_distance_cm", self.viewing_distance_cm),
            ("half_height_deg", self.half_height_deg),
        ];
        for (field, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(GeometryError::NonPositive { field, value });
            }
        }
        let px = f64::from(self.width_px) / f64::from(self.height_px);
        let cm = self.width_cm / self.height_cm;
        if ((px - cm) / cm).abs() > 0.05 {
            return Err(GeometryError::AspectMismatch { px, cm });
        }
        let expected = self.half_height_deg.to_radians().tan();
        let actual = (self.height_cm / 2.0) / self.viewing_distance_cm;
        if ((actual - expected) / expected).abs() > 0.02 {
            return Err(GeometryError::Placement { actual, expected });
        }
        Ok(())
    }

    /// Pixels per degree along either axis in the linear projection.
    pub fn px_per_deg(&self) -> f64 {
        (f64::from(self.height_px) / 2.0) / self.half_height_deg
    }

    pub fn px_to_deg_len(&self, px: f64) -> f64 {
        px / self.px_per_deg()
    }
}

/// Experimental condition of an exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// Crosshair pointer, participant with peripheral vision loss.
    #[serde(rename = "cp-pvl")]
    CpPvl,
    /// Radial-cue pointer, participant with peripheral vision loss.
    #[serde(rename = "sp-pvl")]
    SpPvl,
    /// Crosshair pointer, full visual field.
    #[serde(rename = "cp-fvf")]
    CpFvf,
    /// Radial-cue pointer behind a 1.5° aperture mask.
    #[serde(rename = "sp-simpvl")]
    SpSimPvl,
    /// Static convergence-point estimation exercise.
    #[serde(rename = "estimation")]
    Estimation,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::CpPvl,
        Condition::SpPvl,
        Condition::CpFvf,
        Condition::SpSimPvl,
        Condition::Estimation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::CpPvl => "cp-pvl",
            Condition::SpPvl => "sp-pvl",
            Condition::CpFvf => "cp-fvf",
            Condition::SpSimPvl => "sp-simpvl",
            Condition::Estimation => "estimation",
        }
    }

    pub(crate) fn ordinal(self) -> u64 {
        match self {
            Condition::CpPvl => 0,
            Condition::SpPvl => 1,
            Condition::CpFvf => 2,
            Condition::SpSimPvl => 3,
            Condition::Estimation => 4,
        }
    }

    /// Whether the ray field is drawn.
    pub fn rays_on(self) -> bool {
        matches!(self, Condition::SpPvl | Condition::SpSimPvl | Condition::Estimation)
    }

    /// Whether the aperture mask is drawn.
    pub fn masked(self) -> bool {
        matches!(self, Condition::SpSimPvl | Condition::Estimation)
    }

    /// Whether trials end with a click on the target (as opposed to a free
    /// estimation click).
    pub fn is_pointing(self) -> bool {
        self != Condition::Estimation
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown condition `{0}`; valid values: cp-pvl, sp-pvl, cp-fvf, sp-simpvl, estimation")]
pub struct UnknownCondition(pub String);

impl FromStr for Condition {
    type Err = UnknownCondition;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Condition::ALL
            .into_iter()
            .find(|c| c.as_str() == norm)
            .ok_or_else(|| UnknownCondition(s.to_string()))
    }
}
