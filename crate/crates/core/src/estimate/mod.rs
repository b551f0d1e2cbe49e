//! Monte Carlo moment estimators and the statistical checks built on them.
//!
//! Every estimator reads a fixed set of grid times from common paths, so curves in `t` are
//! exactly monotone where the underlying functional is pathwise monotone. Results depend only
//! on `(spec, config, seed)`: path `i` always uses stream `i` and aggregation runs in path order.

mod checks;
mod curve;
mod slope;

pub use checks::{
    backward_moment_check, is_martingale, maximal_ratio_check, moment_growth_check, subadditivity_check, wald_check,
    BackwardCheck, GrowthCheck, MaximalCheck, SubadditivityCheck, WaldCheck, BACKWARD_STABILITY, GROWTH_SLOPE_FLOOR,
};
pub use curve::{
    estimate_endpoint_moment, estimate_sup_moment, estimate_sup_moments, EndpointMoment, MomentCurve,
    NONCONVERGENCE_SLOPE,
};
pub use slope::{
    fit_large_time_slope, fit_small_time_slope, verify_large_time_slope, verify_small_time_slope, SlopeFit,
    MIN_FIT_POINTS, SLOPE_TOLERANCE,
};

use crate::error::{Error, Result};
use crate::simulate::{map_paths, simulate_path_with, PathObserver, SimConfig};
use crate::triplet::ProcessSpec;

/// The simulation config cut at the last requested grid time, and the grid index of every time.
pub(crate) fn snap_to_grid(cfg: &SimConfig, times: &[f64]) -> Result<(SimConfig, Vec<usize>)> {
    cfg.validate()?;
    if times.is_empty() {
        return Err(Error::InsufficientGrid("no grid times given".into()));
    }
    let h = cfg.step();
    let mut idx = Vec::with_capacity(times.len());
    for &t in times {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InsufficientGrid(format!(
                "grid times must be positive and finite, got {t}"
            )));
        }
        if t > cfg.t_end * (1.0 + 1e-12) {
            return Err(Error::InsufficientGrid(format!(
                "grid time {t} lies beyond the simulated horizon {}",
                cfg.t_end
            )));
        }
        idx.push(((t / h).round() as usize).clamp(1, cfg.n_steps));
    }
    let last = *idx.iter().max().unwrap_or(&1);
    let mut cut = *cfg;
    cut.t_end = cfg.time(last);
    cut.n_steps = last;
    Ok((cut, idx))
}

/// Records `(X_t, sup_{s≤t}|X_s − x0|)` at the requested grid indices.
struct Snapshots<'a> {
    idx: &'a [usize],
    out: Vec<(f64, f64)>,
}

impl PathObserver for Snapshots<'_> {
    fn observe(&mut self, k: usize, _t: f64, x: f64, sup: f64) {
        for (j, &i) in self.idx.iter().enumerate() {
            if i == k {
                self.out[j] = (x, sup);
            }
        }
    }
}

/// Per path, the state and running sup at each grid index, in path order.
pub(crate) fn sample_snapshots(
    spec: &ProcessSpec,
    x0: f64,
    cfg: &SimConfig,
    idx: &[usize],
    n_paths: u64,
) -> Result<Vec<Vec<(f64, f64)>>> {
    map_paths(0..n_paths, |i| {
        let mut obs = Snapshots {
            idx,
            out: vec![(f64::NAN, f64::NAN); idx.len()],
        };
        simulate_path_with(spec, x0, cfg, i, &mut obs)?;
        Ok(obs.out)
    })
}

/// Column `j` of a per-path table.
pub(crate) fn column<T: Copy>(rows: &[Vec<T>], j: usize) -> Vec<T> {
    rows.iter().map(|r| r[j]).collect()
}

/// SE of a difference of independent-looking estimates.
pub(crate) fn combined_se(ses: &[f64]) -> f64 {
    ses.iter().map(|s| s * s).sum::<f64>().sqrt()
}

fn require_paths(n_paths: u64) -> Result<()> {
    if n_paths < 2 {
        return Err(Error::domain(format!(
            "need at least 2 paths for a standard error, got {n_paths}"
        )));
    }
    Ok(())
}
