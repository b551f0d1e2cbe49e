use super::expr::Region;
use super::kernel::{Family, FrozenKernel};
use super::spec::{Diffusion, Drift, ProcessSpec};
use crate::error::Result;
use serde::{Deserialize, Serialize};

/// Grid size for numerical suprema.
pub const SUP_GRID_POINTS: usize = 10_000;

/// A sequence of states along which a coefficient grows without bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub description: String,
    pub points: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupMethod {
    ClosedForm,
    Grid,
}

/// Suprema over a region of the coefficient functionals used by the moment bounds.
///
/// `drift` is the drift in the convention compensating `|y| ≤ 1`. `drift_bv` subtracts the
/// compensated small-jump mean (`b - ∫_{|y|≤ρ} y N`), `drift_martingale` adds the large-jump
/// mean (`b + ∫_{|y|>ρ} y N`); both are `∞` where the integral does not converge absolutely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSups {
    pub region: Region,
    pub alpha: f64,
    pub beta: f64,
    /// `sup (|b| + |Q| + ∫(|y|²∧1) N)`
    pub m1: f64,
    /// `sup ∫_{|y|>1} |y|^α N`
    pub m2: f64,
    /// `sup ∫_{|y|≤1} |y|^β N`
    pub inner_beta: f64,
    /// `sup ∫ |y|^α N`
    pub all_alpha: f64,
    /// `sup ∫_{|y|≤1} |y|^α N`
    pub inner_alpha: f64,
    pub drift: f64,
    pub drift_bv: f64,
    pub drift_martingale: f64,
    pub diffusion: f64,
    pub method: SupMethod,
    /// Number of grid points (0 for closed forms).
    pub grid_points: usize,
    pub witness: Option<Witness>,
}

/// Coefficient functionals at a single state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCoefficients {
    pub drift: f64,
    pub drift_bv: f64,
    pub drift_martingale: f64,
    pub diffusion: f64,
    pub levy_integral: f64,
    pub m2: f64,
    pub inner_beta: f64,
    pub inner_alpha: f64,
}

impl PointCoefficients {
    pub fn m1(&self) -> f64 {
        self.drift.abs() + self.diffusion.abs() + self.levy_integral
    }

    fn fields(&self) -> [f64; 9] {
        [
            self.m1(),
            self.m2,
            self.inner_beta,
            self.inner_alpha + self.m2,
            self.inner_alpha,
            self.drift.abs(),
            self.drift_bv.abs(),
            self.drift_martingale.abs(),
            self.diffusion.abs(),
        ]
    }
}

/// Drift in the `|y| ≤ 1` convention given the declared drift and compensation radius.
pub fn standard_drift(b: f64, k: &FrozenKernel) -> f64 {
    let rho = k.rho_state();
    if rho == 1.0 || k.measure.is_symmetric() {
        return b;
    }
    if rho > 1.0 {
        b - k.signed_first_between(1.0, rho)
    } else {
        b + k.signed_first_between(rho, 1.0)
    }
}

pub fn point_coefficients(spec: &ProcessSpec, x: f64, alpha: f64, beta: f64) -> Result<PointCoefficients> {
    let k = spec.kernel_at(x)?;
    let b = spec.drift_at(x);
    let rho = k.rho_state();
    let small_mean = k.signed_first_below(rho);
    let large_mean = k.signed_first_above(rho);
    Ok(PointCoefficients {
        drift: standard_drift(b, &k),
        drift_bv: b - small_mean,
        drift_martingale: b + large_mean,
        diffusion: spec.diffusion_at(x),
        levy_integral: k.levy_integral(),
        m2: k.outer(alpha),
        inner_beta: k.inner(beta),
        inner_alpha: k.inner(alpha),
    })
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximum of `f` on a uniform grid over `[lo, hi]`, refined by golden section around the best cell.
pub fn grid_sup<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    if lo == hi || n < 2 {
        return (lo, f(lo));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..n {
        let x = lo + step * i as f64;
        let v = f(x);
        if v > best.1 || v.is_nan() {
            best = (x, v);
            if v.is_infinite() || v.is_nan() {
                return best;
            }
        }
    }
    let (a, b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let refined = golden_max(&f, a, b);
    if refined.1 > best.1 {
        refined
    } else {
        best
    }
}

/// Grid bounds for a spec on a region: unbounded regions use `[-50, 50]`, widened to cover
/// the clamp saturation points of affine modulations.
pub fn search_bounds(spec: &ProcessSpec, region: Region) -> (f64, f64) {
    let (mut lo, mut hi) = region.search_bounds();
    if let Region::All = region {
        let mut exprs: Vec<_> = spec.kernel.modulation.values().copied().collect();
        exprs.extend(spec.sde_multiplier);
        if let Drift::Bounded { expr } = spec.drift {
            exprs.push(expr);
        }
        if let Diffusion::Bounded { expr } = spec.diffusion {
            exprs.push(expr);
        }
        for e in exprs {
            for p in e.saturation_points() {
                lo = lo.min(p - 1.0);
                hi = hi.max(p + 1.0);
            }
        }
    }
    (lo, hi)
}

fn unbounded_witness(spec: &ProcessSpec) -> Option<Witness> {
    let linear = matches!(spec.drift, Drift::Linear { slope, .. } if slope != 0.0);
    let square = matches!(spec.diffusion, Diffusion::ScaledSquare { sigma2 } if sigma2 != 0.0);
    if !(linear || square) {
        return None;
    }
    let points: Vec<f64> = (1..=10).map(|n| n as f64).collect();
    let values = points
        .iter()
        .map(|&x| spec.drift_at(x).abs() + spec.diffusion_at(x).abs())
        .collect();
    let description = match (linear, square) {
        (true, true) => "linear drift and quadratic diffusion grow along x_n = n",
        (true, false) => "linear drift grows along x_n = n",
        _ => "quadratic diffusion grows along x_n = n",
    };
    Some(Witness {
        description: description.into(),
        points,
        values,
    })
}

/// Suprema of `|b|+|Q|+∫(|y|²∧1)N`, `∫_{|y|>1}|y|^α N` and `∫_{|y|≤1}|y|^β N` over a region.
///
/// Divergence is decided from the range of the modulated stability index, never from
/// overflow: `∫_{|y|>1}|y|^α N` is infinite for untruncated stable kernels iff
/// `α ≥ min α(x)`, and `∫_{|y|≤1}|y|^β N` is infinite iff `β ≤ max α(x)`.
pub fn coefficient_sups(spec: &ProcessSpec, region: Region, alpha: f64, beta: f64) -> Result<CoefficientSups> {
    if let Region::Interval { lo, hi } = region {
        if !(lo <= hi) {
            return Err(crate::Error::domain(format!("empty region [{lo}, {hi}]")));
        }
    }
    let kernel_const = spec.kernel.is_state_independent() && spec.sde_multiplier.is_none_or(|f| f.is_constant());
    let affine_coeffs = matches!(spec.drift, Drift::Constant { .. } | Drift::Linear { .. })
        && matches!(
            spec.diffusion,
            Diffusion::Constant { .. } | Diffusion::ScaledSquare { .. }
        );

    let mut out = if kernel_const && affine_coeffs {
        // |b| and |Q| are convex in x, so their sums peak at the region's endpoints
        let probe = match region {
            Region::Interval { lo, .. } => lo,
            Region::All => 0.0,
        };
        let base = point_coefficients(spec, probe, alpha, beta)?;
        let mut f = base.fields();
        let witness = match region {
            Region::All => unbounded_witness(spec),
            Region::Interval { lo, hi } => {
                let other = point_coefficients(spec, hi, alpha, beta)?.fields();
                let at_lo = point_coefficients(spec, lo, alpha, beta)?.fields();
                for i in 0..f.len() {
                    f[i] = at_lo[i].max(other[i]);
                }
                None
            }
        };
        let mut sups = from_fields(region, alpha, beta, f, SupMethod::ClosedForm, 0, witness);
        if sups.witness.is_some() {
            let linear = matches!(spec.drift, Drift::Linear { slope, .. } if slope != 0.0);
            let square = matches!(spec.diffusion, Diffusion::ScaledSquare { sigma2 } if sigma2 != 0.0);
            sups.m1 = f64::INFINITY;
            if linear {
                sups.drift = f64::INFINITY;
                sups.drift_bv = f64::INFINITY;
                sups.drift_martingale = f64::INFINITY;
            }
            if square {
                sups.diffusion = f64::INFINITY;
            }
        }
        sups
    } else {
        let witness = if region == Region::All {
            unbounded_witness(spec)
        } else {
            None
        };
        let (lo, hi) = search_bounds(spec, region);
        let eval = |x: f64| point_coefficients(spec, x, alpha, beta).map(|p| p.fields());
        // surface parameter-domain errors before the grid search
        eval(lo)?;
        let mut f = [0.0; 9];
        for (i, slot) in f.iter_mut().enumerate() {
            let (_, v) = grid_sup(|x| eval(x).map(|v| v[i]).unwrap_or(f64::NAN), lo, hi, SUP_GRID_POINTS);
            *slot = v;
        }
        let mut sups = from_fields(
            region,
            alpha,
            beta,
            f,
            SupMethod::Grid,
            SUP_GRID_POINTS,
            witness.clone(),
        );
        if witness.is_some() {
            sups.m1 = f64::INFINITY;
        }
        sups
    };

    // analytic divergence from the index range
    if let Some((amin, amax)) = spec.kernel.alpha_range(region) {
        let untruncated_stable = matches!(spec.kernel.family, Family::SymmetricStable { truncate: None, .. });
        if untruncated_stable && alpha >= amin {
            out.m2 = f64::INFINITY;
        }
        if beta <= amax {
            out.inner_beta = f64::INFINITY;
        }
        if alpha <= amax {
            out.inner_alpha = f64::INFINITY;
        }
        if out.m2.is_infinite() || out.inner_alpha.is_infinite() {
            out.all_alpha = f64::INFINITY;
        }
    }
    Ok(out)
}

fn from_fields(
    region: Region,
    alpha: f64,
    beta: f64,
    f: [f64; 9],
    method: SupMethod,
    grid_points: usize,
    witness: Option<Witness>,
) -> CoefficientSups {
    CoefficientSups {
        region,
        alpha,
        beta,
        m1: f[0],
        m2: f[1],
        inner_beta: f[2],
        all_alpha: f[3],
        inner_alpha: f[4],
        drift: f[5],
        drift_bv: f[6],
        drift_martingale: f[7],
        diffusion: f[8],
        method,
        grid_points,
        witness,
    }
}
