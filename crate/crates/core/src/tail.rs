//! Power-law exponents from log-log least squares.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;


use crate::{Error, Result};

/// Minimum number of samples a fit window must hold.
pub const MIN_WINDOW_SAMPLES: usize = 8;

/// Dominance threshold for the slowest exponential before a decade counts
/// as power-law territory.
pub const EXPONENTIAL_DOMINANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeEstimate {
    pub window: (f64, f64),
    pub slope: f64,
    pub slope_stderr: f64,
    pub samples: usize,
}

/// Least-squares slope of `ln y` against `ln t` over all samples.
pub fn tail_slope(times: &[f64], values: &[f64]) -> Result<SlopeEstimate> {
    if times.len() != values.len() {
        return Err(Error::SizeMismatch { expected: times.len(), found: values.len() });
    }
    if times.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::WindowTooSmall { found: times.len(), needed: MIN_WINDOW_SAMPLES });
    }
    for (i, (&t, &y)) in times.iter().zip(values).enumerate() {
        if !(y > 0.0) || !(t > 0.0) {
            return Err(Error::NonPositiveSample { index: i });
        }
    }
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|y| y.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidArgument("fit window has no spread in time"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let slope_stderr = (ss_res / (n - 2.0) / sxx).sqrt();
    Ok(SlopeEstimate {
        window: (times[0], times[times.len() - 1]),
        slope,
        slope_stderr,
        samples: times.len(),
    })
}

/// Fit restricted to samples with `t_lo ≤ t ≤ t_hi`.
pub fn tail_slope_in_window(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<SlopeEstimate> {
    if times.len() != values.len() {
        return Err(Error::SizeMismatch { expected: times.len(), found: values.len() });
    }
    let (ts, ys): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, y)| (*t, *y))
        .unzip();
    tail_slope(&ts, &ys)
}

/// Latest decade `[t/10, t]` of the grid in which the leading exponential
/// stays below `EXPONENTIAL_DOMINANCE` times the total at every sample.
///
/// `exp_ratio[i]` is |leading exponential term| / |total| at `times[i]`.
pub fn select_tail_window(times: &[f64], exp_ratio: &[f64]) -> Result<(f64, f64)> {
    if times.len() != exp_ratio.len() {
        return Err(Error::SizeMismatch { expected: times.len(), found: exp_ratio.len() });
    }
    for hi in (0..times.len()).rev() {
        let t_hi = times[hi];
        let t_lo = t_hi / 10.0 * (1.0 - 1e-12);
        let inside: Vec<usize> = (0..=hi).filter(|&i| times[i] >= t_lo).collect();
        if times[inside[0]] > t_hi / 10.0 * (1.0 + 1e-9) {
            // grid does not reach a full decade below t_hi
            break;
        }
        if inside.len() >= MIN_WINDOW_SAMPLES && inside.iter().all(|&i| exp_ratio[i] < EXPONENTIAL_DOMINANCE) {
            return Ok((times[inside[0]], t_hi));
        }
    }
    Err(Error::NoTailWindow)
}

/// Centered log-log derivative; one-sided at the ends. Non-positive samples
/// give NaN.
pub fn local_slopes(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = times.len().min(values.len());
    let lt: Vec<f64> = times[..n].iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = values[..n].iter().map(|y| if *y > 0.0 { y.ln() } else { f64::NAN }).collect();
    (0..n)
        .map(|i| {
            if n < 2 {
                return f64::NAN;
            }
            let (a, b) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            (ly[b] - ly[a]) / (lt[b] - lt[a])
        })
        .collect()
}
