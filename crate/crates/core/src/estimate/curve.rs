use super::{column, require_paths, sample_snapshots, snap_to_grid};
use crate::bounds::{moment_exists, MomentFunction};
use crate::error::{Error, Result};
use crate::simulate::SimConfig;
use crate::stats::{linear_fit, mean_se};
use crate::triplet::{ProcessSpec, Region};
use serde::{Deserialize, Serialize};

/// Slope of `log SE` against `log n` above which a curve is flagged non-convergent.
///
/// A finite variance gives `-1/2`; a tail with `P(V > u) ~ u^{-γ}`, `1 < γ < 2`, gives `1/γ − 1`.
pub const NONCONVERGENCE_SLOPE: f64 = -0.25;

/// Fewest paths for which the path-doubling test is run.
const MIN_DOUBLING_PATHS: u64 = 64;

/// `E^x[sup_{s≤t}|X_s − x|^κ]` on a time grid, from common paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCurve {
    pub kappa: f64,
    pub x0: f64,
    /// Requested times snapped to the simulation grid.
    pub t_grid: Vec<f64>,
    pub estimates: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub n_paths: u64,
    pub seed: u64,
    pub step: f64,
    /// SE grows (or fails to shrink) under path doubling at the last grid time.
    pub non_convergent: bool,
    /// Fitted slope of `log SE` on `log n` over `n/8, n/4, n/2, n`.
    pub se_slope: Option<f64>,
}

impl MomentCurve {
    pub fn is_nondecreasing(&self) -> bool {
        self.estimates.windows(2).all(|w| w[1] >= w[0])
    }

    /// `(t, estimate, se)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.t_grid
            .iter()
            .zip(&self.estimates)
            .zip(&self.std_errors)
            .map(|((&t, &e), &s)| (t, e, s))
    }
}

/// Fitted `log SE` slope over nested path prefixes, or `None` when it cannot be formed.
fn se_doubling_slope(values: &[f64]) -> Option<f64> {
    let n = values.len() as u64;
    if n < MIN_DOUBLING_PATHS {
        return None;
    }
    let mut pts = Vec::with_capacity(4);
    for d in [8, 4, 2, 1] {
        let m = (n / d) as usize;
        let (_, se) = mean_se(&values[..m]);
        if !(se > 0.0 && se.is_finite()) {
            return None;
        }
        pts.push(((m as f64).ln(), se.ln()));
    }
    Some(linear_fit(&pts).slope)
}

/// Sup-moment curves for several orders from one set of paths.
pub fn estimate_sup_moments(
    spec: &ProcessSpec,
    x0: f64,
    kappas: &[f64],
    t_grid: &[f64],
    n_paths: u64,
    cfg: &SimConfig,
) -> Result<Vec<MomentCurve>> {
    for &k in kappas {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::domain(format!("kappa must be finite and nonnegative, got {k}")));
        }
    }
    require_paths(n_paths)?;
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InsufficientGrid("grid times must be increasing".into()));
    }
    let (cut, idx) = snap_to_grid(cfg, t_grid)?;
    let rows = sample_snapshots(spec, x0, &cut, &idx, n_paths)?;
    let t_snapped: Vec<f64> = idx.iter().map(|&k| cut.time(k)).collect();
    Ok(kappas
        .iter()
        .map(|&kappa| {
            // pathwise running max guards against non-monotone rounding in powf
            let per_path: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| {
                    let mut m = 0.0f64;
                    r.iter()
                        .map(|&(_, s)| {
                            m = m.max(s.powf(kappa));
                            m
                        })
                        .collect()
                })
                .collect();
            let (estimates, std_errors): (Vec<f64>, Vec<f64>) =
                (0..idx.len()).map(|j| mean_se(&column(&per_path, j))).unzip();
            let se_slope = se_doubling_slope(&column(&per_path, idx.len() - 1));
            MomentCurve {
                kappa,
                x0,
                t_grid: t_snapped.clone(),
                estimates,
                std_errors,
                n_paths,
                seed: cfg.seed,
                step: cut.step(),
                non_convergent: se_slope.is_some_and(|s| s > NONCONVERGENCE_SLOPE),
                se_slope,
            }
        })
        .collect())
}

/// `E^x[sup_{s≤t}|X_s − x|^κ]` on an increasing grid inside the simulated horizon.
pub fn estimate_sup_moment(
    spec: &ProcessSpec,
    x0: f64,
    kappa: f64,
    t_grid: &[f64],
    n_paths: u64,
    cfg: &SimConfig,
) -> Result<MomentCurve> {
    Ok(estimate_sup_moments(spec, x0, &[kappa], t_grid, n_paths, cfg)?.remove(0))
}

/// `E^x f(X_t − x)` with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointMoment {
    pub function: MomentFunction,
    pub x0: f64,
    pub t: f64,
    pub value: f64,
    pub std_error: f64,
    pub n_paths: u64,
    pub seed: u64,
    /// Existence verdict for `f` on the kernel; `None` when `f` lies outside the existence catalog.
    pub exists: Option<bool>,
    /// The run proceeded without a finite-moment guarantee.
    pub flagged: bool,
    pub note: Option<String>,
}

/// Plain Monte Carlo mean of `f(X_t − x0)`.
pub fn estimate_endpoint_moment(
    spec: &ProcessSpec,
    x0: f64,
    f: MomentFunction,
    t: f64,
    n_paths: u64,
    cfg: &SimConfig,
) -> Result<EndpointMoment> {
    f.validate()?;
    require_paths(n_paths)?;
    let (exists, note) = match moment_exists(spec, f, Region::All) {
        Ok(m) => (Some(m.exists), m.reason),
        Err(Error::UnsupportedFunction(s)) => (None, Some(format!("no existence check for {s}"))),
        Err(e) => return Err(e),
    };
    let (cut, idx) = snap_to_grid(cfg, &[t])?;
    let rows = sample_snapshots(spec, x0, &cut, &idx, n_paths)?;
    let v: Vec<f64> = rows.iter().map(|r| f.eval(r[0].0 - x0)).collect();
    let (value, std_error) = mean_se(&v);
    Ok(EndpointMoment {
        function: f,
        x0,
        t: cut.time(idx[0]),
        value,
        std_error,
        n_paths,
        seed: cfg.seed,
        exists,
        flagged: exists != Some(true),
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::Scheme;
    use crate::triplet::{JumpKernel, JumpLaw, StableScale};

    #[test]
    fn kappa_zero_is_exactly_one() {
        let spec = ProcessSpec::levy(JumpKernel::stable(1.5, StableScale::UNIT_SYMBOL));
        let c = estimate_sup_moment(&spec, 0.0, 0.0, &[0.25, 0.5, 1.0], 500, &SimConfig::new(1.0, 64, 1)).unwrap();
        assert!(c.estimates.iter().all(|&e| e == 1.0));
        assert!(c.std_errors.iter().all(|&s| s == 0.0));
        assert!(!c.non_convergent);
    }

    #[test]
    fn brownian_sup_dominates_endpoint() {
        let c = estimate_sup_moment(
            &ProcessSpec::brownian(1.0),
            0.0,
            2.0,
            &[1.0],
            20_000,
            &SimConfig::new(1.0, 256, 2),
        )
        .unwrap();
        assert!(c.estimates[0] >= 1.0 - 3.0 * c.std_errors[0], "{:?}", c);
    }

    #[test]
    fn cauchy_endpoint_half_moment() {
        let spec = ProcessSpec::levy(JumpKernel::stable(1.0, StableScale::UNIT_SYMBOL));
        let cfg = SimConfig::new(1.0, 1, 3).scheme(Scheme::ExactLevy);
        let e = estimate_endpoint_moment(&spec, 0.0, MomentFunction::Power { p: 0.5 }, 1.0, 100_000, &cfg).unwrap();
        let oracle = 2f64.sqrt();
        assert!((e.value - oracle).abs() < 3.0 * e.std_error, "{e:?}");
        assert_eq!(e.exists, Some(true));
    }

    #[test]
    fn constant_function_is_exactly_one() {
        let spec = ProcessSpec::levy(JumpKernel::stable(0.8, StableScale::UNIT_SYMBOL));
        let e =
            estimate_endpoint_moment(&spec, 0.3, MomentFunction::One, 1.0, 100, &SimConfig::new(1.0, 8, 4)).unwrap();
        assert_eq!((e.value, e.std_error), (1.0, 0.0));
    }

    #[test]
    fn compound_poisson_variance() {
        // E X_1² = λ a² for symmetric two-point jumps
        let spec = ProcessSpec::levy(JumpKernel::compound_poisson(2.0, JumpLaw::TwoPoint { a: 3.0 }));
        let e = estimate_endpoint_moment(
            &spec,
            0.0,
            MomentFunction::Power { p: 2.0 },
            1.0,
            50_000,
            &SimConfig::new(1.0, 16, 5),
        )
        .unwrap();
        assert!((e.value - 18.0).abs() < 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn heavy_tail_is_flagged_non_convergent() {
        // κ = 1.3 > α: the mean itself diverges
        let spec = ProcessSpec::levy(JumpKernel::stable(1.1, StableScale::UNIT_SYMBOL));
        let c = estimate_sup_moment(&spec, 0.0, 1.3, &[1.0], 20_000, &SimConfig::new(1.0, 4, 6)).unwrap();
        assert!(c.non_convergent, "{:?}", c.se_slope);
        let light = estimate_sup_moment(&spec, 0.0, 0.3, &[1.0], 20_000, &SimConfig::new(1.0, 4, 6)).unwrap();
        assert!(!light.non_convergent, "{:?}", light.se_slope);
    }

    #[test]
    fn grid_beyond_horizon_is_rejected() {
        let err = estimate_sup_moment(
            &ProcessSpec::brownian(1.0),
            0.0,
            1.0,
            &[2.0],
            10,
            &SimConfig::new(1.0, 8, 0),
        );
        assert!(matches!(err, Err(Error::InsufficientGrid(_))));
    }
}
