use serde::{Deserialize, Serialize};

use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n: usize,
}

/// Zero-intercept Fitts model `MT = b·ID`, with MT in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FittsFit {
    /// Seconds per bit.
    pub b: f64,
    /// Always 0; kept so the fit reads as the full `MT = b·ID + a` model.
    pub a: f64,
    /// Bits per second, `1/b`.
    pub index_of_performance: f64,
    pub r_squared: f64,
    pub n: usize,
}

/// `log2(D/W + 1)` in bits.
pub fn index_of_difficulty(distance_deg: f64, width_deg: f64) -> Result<f64, StatsError> {
    if !(distance_deg.is_finite() && distance_deg > 0.0) {
        return Err(StatsError::NonPositive("distance"));
    }
    if !(width_deg.is_finite() && width_deg > 0.0) {
        return Err(StatsError::NonPositive("width"));
    }
    Ok((distance_deg / width_deg + 1.0).log2())
}

/// Ordinary least squares with a free intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit, StatsError> {
    let n = xs.len().min(ys.len());
    if n < 2 || xs.len() != ys.len() {
        return Err(StatsError::TooFewPoints { needed: 2, got: n });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) * n as f64 {
        return Err(StatsError::DegenerateX);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = centered_r_squared(xs, ys, my, |x| slope * x + intercept);
    Ok(LinearFit { slope, intercept, r_squared, n })
}

/// Least squares through the origin over `(id_bits, mt_seconds)` points.
pub fn fitts_fit(points: &[(f64, f64)]) -> Result<FittsFit, StatsError> {
    if points.is_empty() {
        return Err(StatsError::TooFewPoints { needed: 1, got: 0 });
    }
    if points.iter().any(|(id, mt)| !id.is_finite() || !mt.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    if points.iter().any(|&(id, _)| id <= 0.0) {
        return Err(StatsError::NonPositive("index of difficulty"));
    }
    let sxy: f64 = points.iter().map(|(id, mt)| id * mt).sum();
    let sxx: f64 = points.iter().map(|(id, _)| id * id).sum();
    let b = sxy / sxx;
    if b <= 0.0 {
        return Err(StatsError::NonPositive("fitted slope b"));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let r_squared = centered_r_squared(&xs, &ys, my, |x| b * x);
    Ok(FittsFit { b, a: 0.0, index_of_performance: 1.0 / b, r_squared, n: points.len() })
}

/// `1 − SSres/SStot` with a centered SStot, clamped to [0, 1]; 0 when SStot is 0.
fn centered_r_squared(xs: &[f64], ys: &[f64], my: f64, predict: impl Fn(f64) -> f64) -> f64 {
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if ss_tot == 0.0 {
        return 0.0;
    }
    let ss_res: f64 = xs.iter().zip(ys).map(|(&x, y)| (y - predict(x)).powi(2)).sum();
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}
