//! Least-squares convergence rates in log-log scale.

use crate::error::{Error, Result};

/// Fitted `log q = intercept + slope * log N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// Index range `[first, last]` of the fitted points in the input.
    pub first: usize,
    pub last: usize,
    /// Root mean square residual of the fit in natural-log units.
    pub residual: f64,
}

impl RateEstimate {
    pub fn points(&self) -> usize {
        self.last - self.first + 1
    }
}

/// Which trailing points enter a fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateWindow {
    /// Points with fewer elements are dropped...
    pub min_elements: f64,
    /// ...unless that leaves fewer than this many; then the last
    /// `min_points` points are used regardless of size.
    pub min_points: usize,
}

impl Default for RateWindow {
    fn default() -> Self {
        RateWindow { min_elements: 1e3, min_points: 6 }
    }
}

/// Smallest number of points any fit may use.
pub const MIN_FIT_POINTS: usize = 5;

/// Least-squares slope over all given points.
pub fn fit_slope(n: &[f64], q: &[f64]) -> Result<RateEstimate> {
    fit_range(n, q, 0, n.len())
}

fn fit_range(n: &[f64], q: &[f64], first: usize, end: usize) -> Result<RateEstimate> {
    if n.len() != q.len() {
        return Err(Error::Input("rate fit: length mismatch".into()));
    }
    let m = end - first;
    if m < 2 {
        return Err(Error::Input("rate fit needs at least two points".into()));
    }
    let xs: Vec<f64> = n[first..end].iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = q[first..end].iter().map(|v| v.ln()).collect();
    if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
        return Err(Error::Input("rate fit needs positive finite data".into()));
    }
    let mf = m as f64;
    let mx = xs.iter().sum::<f64>() / mf;
    let my = ys.iter().sum::<f64>() / mf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Input("rate fit needs distinct element counts".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / mf).sqrt();
    Ok(RateEstimate { slope, intercept, first, last: end - 1, residual })
}

/// Fit over the trailing window selected by `window`.
pub fn estimate_rate(n: &[f64], q: &[f64], window: RateWindow) -> Result<RateEstimate> {
    let len = n.len();
    let large = n.iter().rev().take_while(|&&v| v >= window.min_elements).count();
    let take = large.max(window.min_points).max(MIN_FIT_POINTS);
    if len < take {
        return Err(Error::Input(format!("rate fit needs {take} points, only {len} available")));
    }
    fit_range(n, q, len - take, len)
}
