//! Nonparametric comparison and regression fits.

mod mann_whitney;
mod regression;

use thiserror::Error;

pub use mann_whitney::{mann_whitney, midranks, MannWhitneyResult, MwMethod, DEFAULT_EXACT_THRESHOLD};
pub use regression::{fitts_fit, index_of_difficulty, linear_fit, FittsFit, LinearFit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("sample {0} is empty")]
    EmptySample(&'static str),
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("x values are all equal; slope is undefined")]
    DegenerateX,
    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),
}

/// Arithmetic mean; `None` for an empty slice.
pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation (n−1 denominator); `None` below two values.
pub fn sample_sd(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|x| (x - m).powi(2)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}
