use thiserror::Error;

use super::PointerSample;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResampleError {
    #[error("at least two samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("sample rate must lie in (0, 1000] Hz, got {0}")]
    BadRate(f64),
    #[error("sample times must strictly increase")]
    NotIncreasing,
}

/// Re-times a pointer stream onto a uniform grid by linear interpolation.
///
/// Grid times are `t0 + round(k·1000/rate)` milliseconds, rounded from the
/// exact grid so the spacing never drifts. Positions are interpolated at the
/// rounded times. The last input sample is kept when it falls between grid
/// points, so both endpoints survive.
pub fn resample_uniform(samples: &[PointerSample], rate_hz: f64) -> Result<Vec<PointerSample>, ResampleError> {
    if samples.len() < 2 {
        return Err(ResampleError::TooFewSamples(samples.len()));
    }
    if !(rate_hz > 0.0 && rate_hz <= 1000.0) {
        return Err(ResampleError::BadRate(rate_hz));
    }
    if samples.windows(2).any(|w| w[1].t_ms <= w[0].t_ms) {
        return Err(ResampleError::NotIncreasing);
    }
    let t0 = samples[0].t_ms;
    let t_end = samples[samples.len() - 1].t_ms;
    let period_ms = 1000.0 / rate_hz;

    let mut out = Vec::new();
    let mut seg = 0;
    for k in 0u64.. {
        let t = t0 + (k as f64 * period_ms).round() as u64;
        if t > t_end {
            break;
        }
        while samples[seg + 1].t_ms < t {
            seg += 1;
        }
        let (a, b) = (samples[seg], samples[seg + 1]);
        let s = (t - a.t_ms) as f64 / (b.t_ms - a.t_ms) as f64;
        let pos = if s <= 0.0 {
            a.pos
        } else if s >= 1.0 {
            b.pos
        } else {
            a.pos + (b.pos - a.pos) * s
        };
        out.push(PointerSample { t_ms: t, pos });
    }
    if out.last().map(|s| s.t_ms) != Some(t_end) {
        out.push(samples[samples.len() - 1]);
    }
    Ok(out)
}
