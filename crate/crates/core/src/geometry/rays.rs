use std::f64::consts::TAU;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use super::{Condition, GeometryError, PointDeg};

/// 8-bit RGBA colour, serialized as `#rrggbbaa`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rgba(pub [u8; 4]);

impl Rgba {
    pub const BLACK: Rgba = Rgba([0, 0, 0, 255]);
    pub const WHITE: Rgba = Rgba([255, 255, 255, 255]);
}

impl fmt::Display for Rgba {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [r, g, b, a] = self.0;
        write!(f, "#{r:02x}{g:02x}{b:02x}{a:02x}")
    }
}

impl Serialize for Rgba {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rgba {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let hex = s
            .strip_prefix('#')
            .filter(|h| h.len() == 8 && h.is_ascii())
            .ok_or_else(|| de::Error::custom(format!("expected #rrggbbaa colour, got `{s}`")))?;
        let mut out = [0u8; 4];
        for (i, byte) in out.iter_mut().enumerate() {
            *byte = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).map_err(de::Error::custom)?;
        }
        Ok(Rgba(out))
    }
}

/// Where rays stop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RayLength {
    /// Up to the moving-area boundary (or the screen edge in a free overlay).
    ToEdge,
    /// Fixed length in degrees, measured from the cursor.
    Degrees(f64),
}

impl Serialize for RayLength {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            RayLength::ToEdge => s.serialize_str("to-edge"),
            RayLength::Degrees(d) => s.serialize_f64(*d),
        }
    }
}

impl<'de> Deserialize<'de> for RayLength {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(RayLength::Degrees(v)),
            Raw::Str(s) if s == "to-edge" => Ok(RayLength::ToEdge),
            Raw::Str(s) => Err(de::Error::custom(format!("expected a number or \"to-edge\", got `{s}`"))),
        }
    }
}

/// Appearance of the ray field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayConfig {
    pub num_rays: u32,
    pub start_offset_deg: f64,
    pub outer_color: Rgba,
    pub inner_color: Rgba,
    pub outer_width_px: f64,
    pub inner_width_px: f64,
    pub opacity: f64,
    pub max_length_deg: RayLength,
}

impl Default for RayConfig {
    fn default() -> Self {
        Self {
            num_rays: 128,
            start_offset_deg: 2.0,
            outer_color: Rgba::BLACK,
            inner_color: Rgba::WHITE,
            outer_width_px: 2.0,
            inner_width_px: 1.0,
            opacity: 1.0,
            max_length_deg: RayLength::ToEdge,
        }
    }
}

impl RayConfig {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if self.num_rays < 3 {
            return Err(GeometryError::RayConfig("num_rays must be at least 3"));
        }
        if !(self.start_offset_deg >= 0.0 && self.start_offset_deg.is_finite()) {
            return Err(GeometryError::RayConfig("start_offset_deg must be finite and non-negative"));
        }
        if !(self.inner_width_px > 0.0 && self.inner_width_px <= self.outer_width_px) {
            return Err(GeometryError::RayConfig("widths must satisfy 0 < inner ≤ outer"));
        }
        if !(0.0..=1.0).contains(&self.opacity) {
            return Err(GeometryError::RayConfig("opacity must lie in [0, 1]"));
        }
        if let RayLength::Degrees(l) = self.max_length_deg {
            if !(l > 0.0 && l.is_finite()) {
                return Err(GeometryError::RayConfig("max_length_deg must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aperture {
    pub center: PointDeg,
    pub radius_deg: f64,
}

/// Visible region of the ray field: the moving-area disk around the origin,
/// optionally intersected with an aperture disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClipRegion {
    pub moving_area_radius_deg: f64,
    pub aperture: Option<Aperture>,
}

impl Default for ClipRegion {
    fn default() -> Self {
        Self { moving_area_radius_deg: 15.0, aperture: None }
    }
}

impl ClipRegion {
    pub const APERTURE_RADIUS_DEG: f64 = 1.5;

    /// Clip region used by an exercise of the given condition.
    pub fn for_condition(condition: Condition) -> Self {
        let aperture = condition
            .masked()
            .then_some(Aperture { center: PointDeg::ORIGIN, radius_deg: Self::APERTURE_RADIUS_DEG });
        Self { aperture, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let r = self.moving_area_radius_deg;
        if !(r > 0.0 && r.is_finite()) {
            return Err(GeometryError::Clip("moving area radius must be positive"));
        }
        if let Some(a) = self.aperture {
            if !(a.radius_deg > 0.0 && a.radius_deg < r) {
                return Err(GeometryError::Clip("aperture radius must be positive and below the moving area radius"));
            }
            if !a.center.is_valid() {
                return Err(GeometryError::Clip("aperture center out of range"));
            }
        }
        Ok(())
    }
}

/// A visible piece of one ray, from the end nearer the cursor to the far end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: PointDeg,
    pub b: PointDeg,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn point_at(&self, s: f64) -> PointDeg {
        self.a + (self.b - self.a) * s
    }
}

/// Parameter interval along `origin + t·dir` (|dir| = 1) inside a disk.
fn disk_interval(origin: PointDeg, dir: PointDeg, center: PointDeg, radius: f64) -> Option<(f64, f64)> {
    let w = origin - center;
    let half_b = w.dot(dir);
    let disc = half_b * half_b - (w.dot(w) - radius * radius);
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    Some((-half_b - root, -half_b + root))
}

const MIN_SEGMENT_DEG: f64 = 1e-12;

/// Builds the visible ray segments around `cursor`, ordered by ray index.
pub fn generate_rays(cursor: PointDeg, cfg: &RayConfig, clip: &ClipRegion) -> Vec<Segment> {
    let n = cfg.num_rays as usize;
    let far = match cfg.max_length_deg {
        RayLength::ToEdge => f64::INFINITY,
        RayLength::Degrees(l) => l,
    };
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let theta = TAU * k as f64 / n as f64;
        let dir = PointDeg::new(theta.cos(), theta.sin());
        let Some((a0, a1)) = disk_interval(cursor, dir, PointDeg::ORIGIN, clip.moving_area_radius_deg) else {
            continue;
        };
        let mut lo = cfg.start_offset_deg.max(a0);
        let mut hi = far.min(a1);
        if let Some(ap) = clip.aperture {
            let Some((b0, b1)) = disk_interval(cursor, dir, ap.center, ap.radius_deg) else {
                continue;
            };
            lo = lo.max(b0);
            hi = hi.min(b1);
        }
        if hi - lo > MIN_SEGMENT_DEG {
            out.push(Segment { a: cursor + dir * lo, b: cursor + dir * hi });
        }
    }
    out
}

/// Keeps the cursor inside the moving area by radial projection.
pub fn clamp_to_area(cursor: PointDeg, clip: &ClipRegion) -> PointDeg {
    let r = clip.moving_area_radius_deg;
    let n = cursor.norm();
    if n <= r {
        return cursor;
    }
    let mut p = cursor * (r / n);
    // rounding can leave the projection a few ulps outside
    while p.norm() > r {
        p = p * (1.0 - f64::EPSILON);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn aperture_clip() -> ClipRegion {
        ClipRegion::for_condition(Condition::SpSimPvl)
    }

    #[test]
    fn centered_cursor_gives_full_radial_field() {
        let segs = generate_rays(PointDeg::ORIGIN, &RayConfig::default(), &ClipRegion::default());
        assert_eq!(segs.len(), 128);
        for (k, s) in segs.iter().enumerate() {
            assert!((s.a.norm() - 2.0).abs() < 1e-12);
            assert!((s.b.norm() - 15.0).abs() < 1e-12);
            let theta = TAU * k as f64 / 128.0;
            let mut diff = (s.b.angle() - theta).rem_euclid(TAU);
            if diff > std::f64::consts::PI {
                diff -= TAU;
            }
            assert!(diff.abs() < 1e-12);
        }
    }

    #[test]
    fn backward_ray_through_aperture_spans_its_diameter() {
        let segs = generate_rays(PointDeg::new(7.0, 0.0), &RayConfig::default(), &aperture_clip());
        let back = segs
            .iter()
            .find(|s| s.a.y.abs() < 1e-12 && s.b.y.abs() < 1e-12)
            .expect("ray pointing in direction π");
        assert!((back.a.x - 1.5).abs() < 1e-12);
        assert!((back.b.x + 1.5).abs() < 1e-12);
    }

    #[test]
    fn few_rays_reach_the_aperture_from_far_away() {
        let cursor = PointDeg::new(14.0, 0.0);
        let segs = generate_rays(cursor, &RayConfig::default(), &aperture_clip());
        // Brute force: march each ray densely and test membership in the aperture.
        let mut visible = 0;
        for k in 0..128 {
            let theta = TAU * k as f64 / 128.0;
            let dir = PointDeg::new(theta.cos(), theta.sin());
            let hit = (0..=30_000).any(|i| {
                let t = 2.0 + 13.0 * i as f64 / 30_000.0;
                let p = cursor + dir * t;
                p.norm() <= 1.5 && p.norm() <= 15.0
            });
            visible += usize::from(hit);
        }
        assert_eq!(visible, 5);
        assert_eq!(segs.len(), visible);
    }

    #[test]
    fn fixed_length_rays_stop_early() {
        let cfg = RayConfig { max_length_deg: RayLength::Degrees(5.0), ..Default::default() };
        let segs = generate_rays(PointDeg::ORIGIN, &cfg, &ClipRegion::default());
        assert!(segs.iter().all(|s| (s.b.norm() - 5.0).abs() < 1e-12));
    }

    #[test]
    fn cursor_on_boundary_drops_outward_rays() {
        let segs = generate_rays(PointDeg::new(15.0, 0.0), &RayConfig::default(), &ClipRegion::default());
        assert!(segs.len() < 128);
        assert!(segs.iter().all(|s| s.length() > 0.0));
    }

    #[test]
    fn clamp_examples() {
        let clip = ClipRegion::default();
        assert_eq!(clamp_to_area(PointDeg::new(3.0, 4.0), &clip), PointDeg::new(3.0, 4.0));
        assert_eq!(clamp_to_area(PointDeg::new(30.0, 0.0), &clip), PointDeg::new(15.0, 0.0));
        assert_eq!(clamp_to_area(PointDeg::new(9.0, 12.0), &clip), PointDeg::new(9.0, 12.0));
    }

    #[test]
    fn config_validation() {
        RayConfig::default().validate().unwrap();
        let bad = RayConfig { num_rays: 2, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = RayConfig { inner_width_px: 3.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ClipRegion {
            moving_area_radius_deg: 1.0,
            aperture: Some(Aperture { center: PointDeg::ORIGIN, radius_deg: 1.5 }),
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn config_json_shape() {
        let json = serde_json::to_value(RayConfig::default()).unwrap();
        assert_eq!(json["outer_color"], "#000000ff");
        assert_eq!(json["inner_color"], "#ffffffff");
        assert_eq!(json["max_length_deg"], "to-edge");
        let back: RayConfig = serde_json::from_value(json).unwrap();
        assert_eq!(back, RayConfig::default());
        let fixed: RayLength = serde_json::from_str("4.5").unwrap();
        assert_eq!(fixed, RayLength::Degrees(4.5));
        assert!(serde_json::from_str::<Rgba>("\"#fff\"").is_err());
    }

    proptest! {
        #[test]
        fn clamp_is_idempotent_and_shrinks(x in -60.0..60.0f64, y in -60.0..60.0f64) {
            let clip = ClipRegion::default();
            let p = PointDeg::new(x, y);
            let q = clamp_to_area(p, &clip);
            prop_assert_eq!(clamp_to_area(q, &clip), q);
            prop_assert!(q.norm() <= p.norm());
            prop_assert!(q.norm() <= 15.0);
        }
    }
}
