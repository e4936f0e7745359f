use serde::{Deserialize, Serialize};

use super::{GeometryError, PointDeg, ScreenGeometry};

/// How visual angles map onto the flat screen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    /// Degrees scale uniformly to pixels (≤2% off the tangent map within 15°).
    #[default]
    Linear,
    /// Exact planar projection through the eye point.
    Tangent,
}

/// Screen pixel position, origin top-left, y downward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelPoint {
    pub x: f64,
    pub y: f64,
}

const TANGENT_LIMIT_DEG: f64 = 89.0;

fn center(g: &ScreenGeometry) -> (f64, f64) {
    (f64::from(g.width_px) / 2.0, f64::from(g.height_px) / 2.0)
}

fn tangent_scale(g: &ScreenGeometry) -> f64 {
    (f64::from(g.height_px) / 2.0) / g.half_height_deg.to_radians().tan()
}

pub fn deg_to_px(p: PointDeg, g: &ScreenGeometry, mode: Projection) -> Result<PixelPoint, GeometryError> {
    let (cx, cy) = center(g);
    let (dx, dy) = match mode {
        Projection::Linear => (p.x * g.px_per_deg(), p.y * g.px_per_deg()),
        Projection::Tangent => {
            for a in [p.x, p.y] {
                if !(a.abs() <= TANGENT_LIMIT_DEG) {
                    return Err(GeometryError::TangentDomain(a));
                }
            }
            let s = tangent_scale(g);
            (s * p.x.to_radians().tan(), s * p.y.to_radians().tan())
        }
    };
    Ok(PixelPoint { x: cx + dx, y: cy - dy })
}

pub fn px_to_deg(p: PixelPoint, g: &ScreenGeometry, mode: Projection) -> PointDeg {
    let (cx, cy) = center(g);
    let (dx, dy) = (p.x - cx, cy - p.y);
    match mode {
        Projection::Linear => PointDeg::new(dx / g.px_per_deg(), dy / g.px_per_deg()),
        Projection::Tangent => {
            let s = tangent_scale(g);
            PointDeg::new((dx / s).atan().to_degrees(), (dy / s).atan().to_degrees())
        }
    }
}

/// Mouse sensitivity needed so that `travel_cm` of device motion sweeps the
/// full screen height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MouseGain {
    pub travel_cm: f64,
    pub deg_per_cm: f64,
    pub px_per_cm: f64,
    /// Device counts per inch if one count moves the cursor one pixel.
    pub equivalent_dpi: f64,
    /// Counts per degree at `equivalent_dpi`.
    pub counts_per_deg: f64,
    pub deg_per_count: f64,
}

pub fn mouse_gain(g: &ScreenGeometry, travel_cm: f64) -> MouseGain {
    let height_deg = 2.0 * g.half_height_deg;
    let px_per_cm = f64::from(g.height_px) / travel_cm;
    let counts_per_deg = g.px_per_deg();
    MouseGain {
        travel_cm,
        deg_per_cm: height_deg / travel_cm,
        px_per_cm,
        equivalent_dpi: px_per_cm * 2.54,
        counts_per_deg,
        deg_per_count: 1.0 / counts_per_deg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1050() -> ScreenGeometry {
        ScreenGeometry::default()
    }

    #[test]
    fn origin_maps_to_center() {
        for mode in [Projection::Linear, Projection::Tangent] {
            let p = deg_to_px(PointDeg::ORIGIN, &g1050(), mode).unwrap();
            assert_eq!((p.x, p.y), (840.0, 525.0));
        }
    }

    #[test]
    fn top_edge_is_fifteen_degrees() {
        let p = deg_to_px(PointDeg::new(0.0, 15.0), &g1050(), Projection::Linear).unwrap();
        assert!((525.0 - p.y - 525.0).abs() < 1e-12);
        assert!(p.y.abs() < 1e-12);
    }

    #[test]
    fn half_way_up_in_both_modes() {
        let lin = deg_to_px(PointDeg::new(0.0, 7.5), &g1050(), Projection::Linear).unwrap();
        assert!((525.0 - lin.y - 262.5).abs() < 1e-9);
        // 525 * tan(7.5°) / tan(15°)
        let tan = deg_to_px(PointDeg::new(0.0, 7.5), &g1050(), Projection::Tangent).unwrap();
        assert!((525.0 - tan.y - 257.950_250_218).abs() < 1e-6, "{}", 525.0 - tan.y);
    }

    #[test]
    fn tangent_rejects_grazing_angles() {
        let err = deg_to_px(PointDeg::new(89.5, 0.0), &g1050(), Projection::Tangent).unwrap_err();
        assert_eq!(err, GeometryError::TangentDomain(89.5));
        assert!(deg_to_px(PointDeg::new(89.5, 0.0), &g1050(), Projection::Linear).is_ok());
    }

    #[test]
    fn round_trip_both_modes() {
        for mode in [Projection::Linear, Projection::Tangent] {
            for &(x, y) in &[(0.0, 0.0), (14.0, -3.0), (-7.25, 11.5), (30.0, -60.0)] {
                let p = PointDeg::new(x, y);
                let back = px_to_deg(deg_to_px(p, &g1050(), mode).unwrap(), &g1050(), mode);
                assert!(back.distance(p) < 1e-9, "{mode:?} {p:?} -> {back:?}");
            }
        }
    }

    #[test]
    fn gain_matches_reference_setup() {
        let gain = mouse_gain(&g1050(), 3.5);
        // 1050 px over 3.5 cm is about 762 dpi
        assert!((gain.equivalent_dpi - 762.0).abs() < 0.5, "{}", gain.equivalent_dpi);
        assert!((gain.deg_per_cm - 8.571_428_571).abs() < 1e-9);
        let half = mouse_gain(&g1050(), 7.0);
        assert!((half.deg_per_cm * 2.0 - gain.deg_per_cm).abs() < 1e-12);
        assert!((half.px_per_cm * 2.0 - gain.px_per_cm).abs() < 1e-12);
        assert!((gain.counts_per_deg * gain.deg_per_count - 1.0).abs() < 1e-12);
    }
}
