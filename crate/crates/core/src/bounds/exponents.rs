use super::BOUNDARY_TOLERANCE;
use crate::error::{Error, Result};
use crate::symbol::{bg_index_with, BgConfig, BgIndexEstimate};
use crate::triplet::ProcessSpec;
use serde::{Deserialize, Serialize};

/// Predicted power of `t` for `E^x sup_{s≤t}|X_s − x|^κ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeExponent {
    pub kappa: f64,
    /// The index the exponent divides by (`None` when `κ = 0`).
    pub index: Option<f64>,
    pub exponent: f64,
    /// The bound is `C t |log t|` rather than a pure power.
    pub log_correction: bool,
    pub estimate: Option<BgIndexEstimate>,
}

fn clamp_index(v: f64) -> f64 {
    v.clamp(f64::MIN_POSITIVE, 2.0)
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa >= 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "kappa must be finite and nonnegative, got {kappa}"
        )))
    }
}

fn constant(kappa: f64) -> TimeExponent {
    TimeExponent {
        kappa,
        index: None,
        exponent: 0.0,
        log_correction: false,
        estimate: None,
    }
}

/// `(κ/α) ∧ 1` as `t → 0`, with `α` the estimated index at `∞` at `x`.
pub fn small_time_exponent(spec: &ProcessSpec, x: f64, kappa: f64) -> Result<TimeExponent> {
    small_time_exponent_with(spec, x, kappa, &BgConfig::default())
}

pub fn small_time_exponent_with(spec: &ProcessSpec, x: f64, kappa: f64, cfg: &BgConfig) -> Result<TimeExponent> {
    check_kappa(kappa)?;
    if kappa == 0.0 {
        return Ok(constant(kappa));
    }
    let est = bg_index_with(spec, x, cfg)?;
    let beta0 = clamp_index(est.beta0);
    if kappa >= beta0 {
        return Err(Error::OutsideGuaranteedRange {
            kappa,
            index: beta0,
            which: "beta0",
        });
    }
    let alpha = clamp_index(est.beta_inf);
    let log_correction = (kappa - alpha).abs() <= BOUNDARY_TOLERANCE;
    let exponent = if log_correction { 1.0 } else { (kappa / alpha).min(1.0) };
    Ok(TimeExponent {
        kappa,
        index: Some(alpha),
        exponent,
        log_correction,
        estimate: Some(est),
    })
}

/// `κ/β` for `t ≥ 1`, with `β` the estimated index at `0` around `x = 0`.
pub fn large_time_exponent(spec: &ProcessSpec, kappa: f64) -> Result<TimeExponent> {
    large_time_exponent_with(spec, 0.0, kappa, &BgConfig::default())
}

pub fn large_time_exponent_with(spec: &ProcessSpec, x: f64, kappa: f64, cfg: &BgConfig) -> Result<TimeExponent> {
    check_kappa(kappa)?;
    if kappa == 0.0 {
        return Ok(constant(kappa));
    }
    let est = bg_index_with(spec, x, cfg)?;
    let beta = clamp_index(est.beta0);
    if kappa >= beta {
        return Err(Error::RegimeInapplicable {
            regime: "symbol_growth_large_time".into(),
            reason: format!("kappa {kappa} ≥ index at 0 ≈ {beta:.4}"),
        });
    }
    Ok(TimeExponent {
        kappa,
        index: Some(beta),
        exponent: kappa / beta,
        log_correction: false,
        estimate: Some(est),
    })
}
