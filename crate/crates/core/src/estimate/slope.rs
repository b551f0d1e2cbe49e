use super::MomentCurve;
use crate::bounds::{large_time_exponent_with, small_time_exponent, TimeExponent};
use crate::error::{Error, Result};
use crate::stats::linear_fit;
use crate::symbol::BgConfig;
use crate::triplet::ProcessSpec;
use serde::{Deserialize, Serialize};

/// Allowed distance between fitted and predicted exponents.
pub const SLOPE_TOLERANCE: f64 = 0.07;
pub const MIN_FIT_POINTS: usize = 4;
/// Decades of `t` below 1 a small-time window must span.
const SMALL_TIME_DECADES: f64 = 1.5;

/// Least-squares line through `(log t, log estimate)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub window: (f64, f64),
    pub points: usize,
    /// Slope of the predicted shape fitted on the same times.
    pub predicted: Option<f64>,
    pub tolerance: f64,
    /// `|slope − predicted| ≤ tolerance`.
    pub pass: Option<bool>,
}

impl SlopeFit {
    pub fn within(&self, predicted: f64, tol: f64) -> bool {
        (self.slope - predicted).abs() <= tol
    }

    /// One-sided comparison against an upper-bound exponent.
    pub fn at_most(&self, predicted: f64, tol: f64) -> bool {
        self.slope <= predicted + tol
    }

    fn compare(mut self, predicted: Option<f64>) -> Self {
        self.predicted = predicted;
        self.pass = predicted.map(|p| self.within(p, self.tolerance));
        self
    }
}

/// Least-squares slope of `log y` on `log t` over `points`.
pub(crate) fn fit_points(points: &[(f64, f64)], window: (f64, f64)) -> Result<SlopeFit> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientGrid(format!(
            "{} grid points in [{}, {}], need at least {MIN_FIT_POINTS}",
            points.len(),
            window.0,
            window.1
        )));
    }
    if let Some(&(t, y)) = points.iter().find(|p| !(p.1 > 0.0 && p.1.is_finite())) {
        return Err(Error::InsufficientGrid(format!(
            "estimate {y} at t = {t} has no logarithm"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(t, y)| (t.ln(), y.ln())).collect();
    let f = linear_fit(&logs);
    Ok(SlopeFit {
        slope: f.slope,
        intercept: f.intercept,
        residual: f.residual,
        window,
        points: points.len(),
        predicted: None,
        tolerance: SLOPE_TOLERANCE,
        pass: None,
    })
}

fn window_points(curve: &MomentCurve, window: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    if curve.non_convergent {
        return Err(Error::NonConvergent);
    }
    let eps = 1e-9 * window.1;
    Ok(curve
        .rows()
        .filter(|&(t, _, _)| t >= window.0 - eps && t <= window.1 + eps)
        .map(|(t, e, _)| (t, e))
        .collect())
}

/// Slope of the shape `t^e` (or `t|log t|`) fitted on the same times as the data.
fn shape_slope(points: &[(f64, f64)], e: &TimeExponent) -> f64 {
    let shape: Vec<(f64, f64)> = points
        .iter()
        .map(|&(t, _)| {
            (
                t.ln(),
                if e.log_correction {
                    t.ln() + t.ln().abs().ln()
                } else {
                    e.exponent * t.ln()
                },
            )
        })
        .collect();
    linear_fit(&shape).slope
}

/// Fits the curve on a window below 1 spanning at least 1.5 decades.
pub fn fit_small_time_slope(curve: &MomentCurve, window: (f64, f64), predicted: Option<f64>) -> Result<SlopeFit> {
    if !(window.0 > 0.0 && window.1 <= 1.0 && window.0 < window.1) {
        return Err(Error::InsufficientGrid(format!(
            "small-time window {window:?} must lie in (0, 1]"
        )));
    }
    if (window.1 / window.0).log10() < SMALL_TIME_DECADES {
        return Err(Error::InsufficientGrid(format!(
            "window {window:?} spans fewer than {SMALL_TIME_DECADES} decades"
        )));
    }
    let pts = window_points(curve, window)?;
    Ok(fit_points(&pts, window)?.compare(predicted))
}

/// Fits the curve on a window inside `[1, ∞)`.
pub fn fit_large_time_slope(curve: &MomentCurve, window: (f64, f64), predicted: Option<f64>) -> Result<SlopeFit> {
    if !(window.0 >= 1.0 && window.0 < window.1) {
        return Err(Error::InsufficientGrid(format!(
            "large-time window {window:?} must lie in [1, ∞)"
        )));
    }
    let pts = window_points(curve, window)?;
    Ok(fit_points(&pts, window)?.compare(predicted))
}

/// Small-time fit against the exponent from the index at `∞` at the curve's start point.
pub fn verify_small_time_slope(
    spec: &ProcessSpec,
    curve: &MomentCurve,
    window: (f64, f64),
) -> Result<(SlopeFit, TimeExponent)> {
    let e = small_time_exponent(spec, curve.x0, curve.kappa)?;
    let pts = window_points(curve, window)?;
    let fit = fit_small_time_slope(curve, window, Some(shape_slope(&pts, &e)))?;
    Ok((fit, e))
}

/// Large-time fit against `κ/β` with the index at `0` at the curve's start point.
pub fn verify_large_time_slope(
    spec: &ProcessSpec,
    curve: &MomentCurve,
    window: (f64, f64),
) -> Result<(SlopeFit, TimeExponent)> {
    let e = large_time_exponent_with(spec, curve.x0, curve.kappa, &BgConfig::default())?;
    let fit = fit_large_time_slope(curve, window, Some(e.exponent))?;
    Ok((fit, e))
}
