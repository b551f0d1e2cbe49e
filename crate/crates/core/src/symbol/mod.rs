//! The symbol `q(x, ξ) = -ib(x)ξ + ½Q(x)ξ² + ∫(1 - e^{iyξ} + iyξ·1_{|y|≤ρ}) N(x, dy)`,
//! its ξ-derivatives and the generalized Blumenthal–Getoor indices.

mod levy;

use crate::error::{Error, Result};
use crate::stats::linear_fit;
use crate::triplet::{grid_sup, search_bounds, Diffusion, Drift, ProcessSpec, Region, Witness, SUP_GRID_POINTS};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use levy::{psi_closed, psi_quadrature};

pub const MAX_DERIVATIVE_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolValue {
    pub x: f64,
    pub xi: f64,
    pub value: Complex64,
    pub method: Method,
}

pub fn eval_symbol(spec: &ProcessSpec, x: f64, xi: f64) -> Result<SymbolValue> {
    eval_symbol_with(spec, x, xi, Method::ClosedForm)
}

/// Evaluates the symbol, preferring `method` (closed forms fall back to quadrature when the
/// family has none).
pub fn eval_symbol_with(spec: &ProcessSpec, x: f64, xi: f64, method: Method) -> Result<SymbolValue> {
    if xi == 0.0 {
        return Ok(SymbolValue {
            x,
            xi,
            value: Complex64::new(0.0, 0.0),
            method: Method::ClosedForm,
        });
    }
    let k = spec.kernel_at(x)?;
    let b = spec.drift_at(x);
    let q = spec.diffusion_at(x);
    let (jump, used) = if k.dilation == 0.0 {
        (Complex64::new(0.0, 0.0), Method::ClosedForm)
    } else {
        levy::psi(&k.measure, k.rho, k.dilation * xi, method)
    };
    let value = Complex64::new(0.5 * q * xi * xi, -b * xi) + jump;
    Ok(SymbolValue {
        x,
        xi,
        value,
        method: used,
    })
}

/// Symbol values on a frequency grid at a fixed state.
pub fn symbol_table(spec: &ProcessSpec, x: f64, xis: &[f64]) -> Result<Vec<SymbolValue>> {
    xis.iter().map(|&xi| eval_symbol(spec, x, xi)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub x: f64,
    pub xi: f64,
    pub order: usize,
    pub value: Complex64,
    pub method: Method,
}

/// `∂_ξ^k q(x, ξ)` for `1 ≤ k ≤ 8`; for `k ≥ 3` this is `i^{k+2} ∫ y^k e^{iyξ} N(x, dy)`.
pub fn symbol_derivative(spec: &ProcessSpec, x: f64, order: usize, xi: f64) -> Result<DerivativeReport> {
    if order == 0 {
        return Err(Error::domain("derivative order must be at least 1"));
    }
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::DerivativeOrderTooHigh(order));
    }
    let k = spec.kernel_at(x)?;
    if !k.outer(order as f64).is_finite() {
        return Err(Error::MomentDoesNotExist {
            order: order as f64,
            integral: format!("∫_{{|y|>1}} |y|^{order} N({x}, dy)"),
        });
    }
    let s = k.dilation;
    let (jump, method) = if s == 0.0 {
        (Complex64::new(0.0, 0.0), Method::ClosedForm)
    } else {
        let (v, m) = levy::psi_derivative(&k.measure, k.rho, order, s * xi);
        (v * s.powi(order as i32), m)
    };
    let value = match order {
        1 => Complex64::new(spec.diffusion_at(x) * xi, -spec.drift_at(x)) + jump,
        2 => Complex64::new(spec.diffusion_at(x), 0.0) + jump,
        _ => jump,
    };
    Ok(DerivativeReport {
        x,
        xi,
        order,
        value,
        method,
    })
}

/// Fitted constant `c_k = sup_x |∂^k q(x, 0)| / (1 + |x|^k)` with the maximizing state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthConstant {
    pub order: usize,
    pub c_k: f64,
    /// State attaining the supremum, `None` when it is only approached as `|x| → ∞`.
    pub witness: Option<f64>,
    pub grid_points: usize,
    /// Limit of the ratio as `|x| → ∞` (unbounded regions only).
    pub tail_limit: Option<f64>,
}

fn ratio(spec: &ProcessSpec, k: usize, x: f64) -> Result<f64> {
    let d = symbol_derivative(spec, x, k, 0.0)?;
    Ok(d.value.norm() / (1.0 + x.abs().powi(k as i32)))
}

/// Growth constant of the `k`-th derivative at `ξ = 0` over a region.
pub fn growth_constants(spec: &ProcessSpec, order: usize, region: Region) -> Result<GrowthConstant> {
    // the polynomial coefficients enter exactly one derivative each
    let unbounded_degree = match (order, spec.drift, spec.diffusion) {
        (1, Drift::Linear { slope, .. }, _) if slope != 0.0 => Some(1),
        (2, _, Diffusion::ScaledSquare { sigma2 }) if sigma2 != 0.0 => Some(2),
        _ => None,
    };
    let _ = ratio(spec, order, region.search_bounds().0)?;
    let state_free = spec.is_state_independent();
    if state_free && unbounded_degree.is_none() {
        let x0 = match region {
            Region::All => 0.0,
            Region::Interval { lo, hi } => {
                if lo <= 0.0 && hi >= 0.0 {
                    0.0
                } else if lo.abs() < hi.abs() {
                    lo
                } else {
                    hi
                }
            }
        };
        return Ok(GrowthConstant {
            order,
            c_k: ratio(spec, order, x0)?,
            witness: Some(x0),
            grid_points: 0,
            tail_limit: None,
        });
    }
    let (lo, hi) = search_bounds(spec, region);
    let (xbest, best) = grid_sup(|x| ratio(spec, order, x).unwrap_or(f64::NAN), lo, hi, SUP_GRID_POINTS);
    if !best.is_finite() {
        return Err(Error::GrowthHypothesis(format!(
            "|∂^{order} q(x,0)| / (1+|x|^{order}) is not finite at x = {xbest}"
        )));
    }
    let mut tail_limit = None;
    if region == Region::All {
        let probes = [1e2, 1e4, 1e6, 1e8];
        let values: Vec<f64> = probes
            .iter()
            .map(|&x| Ok(ratio(spec, order, x)?.max(ratio(spec, order, -x)?)))
            .collect::<Result<_>>()?;
        let growing = values.windows(2).all(|w| w[1] > 1.5 * w[0]);
        if growing {
            let w = Witness {
                description: "ratio grows along x_n = 10^(2n)".to_string(),
                points: probes.to_vec(),
                values,
            };
            return Err(Error::GrowthHypothesis(format!(
                "{}: {:?} -> {:?}",
                w.description, w.points, w.values
            )));
        }
        tail_limit = Some(values[values.len() - 1]);
    }
    let (c_k, witness) = match tail_limit {
        Some(t) if t > best => (t, None),
        _ => (best, Some(xbest)),
    };
    Ok(GrowthConstant {
        order,
        c_k,
        witness,
        grid_points: SUP_GRID_POINTS,
        tail_limit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BgConfig {
    pub j_min: i32,
    pub j_max: i32,
    /// Number of dyadic steps in each regression window.
    pub window: i32,
    pub y_points: usize,
    pub eta_points: usize,
    pub residual_threshold: f64,
}

impl Default for BgConfig {
    fn default() -> Self {
        BgConfig {
            j_min: -14,
            j_max: 14,
            window: 6,
            y_points: 256,
            eta_points: 256,
            residual_threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BgIndexEstimate {
    pub x: f64,
    pub beta0: f64,
    pub beta_inf: f64,
    pub window0: (f64, f64),
    pub window_inf: (f64, f64),
    pub residual0: f64,
    pub residual_inf: f64,
    pub poor_fit: bool,
    /// `(r, g(r))` on the dyadic grid.
    pub profile: Vec<(f64, f64)>,
}

/// `g(r) = sup_{|y-x|≤1/r} sup_{|η|≤r} |q(y, η)|` on sampled grids.
pub fn bg_profile(spec: &ProcessSpec, x: f64, r: f64, cfg: &BgConfig) -> Result<f64> {
    let ys: Vec<f64> = if spec.is_state_independent() || cfg.y_points < 2 {
        vec![x]
    } else {
        let n = cfg.y_points;
        (0..n)
            .map(|i| x - 1.0 / r + 2.0 / r * i as f64 / (n - 1) as f64)
            .collect()
    };
    let mut best: f64 = 0.0;
    for &y in &ys {
        for i in 1..=cfg.eta_points {
            let eta = r * i as f64 / cfg.eta_points as f64;
            best = best.max(eval_symbol(spec, y, eta)?.value.norm());
        }
    }
    Ok(best)
}

/// Generalized Blumenthal–Getoor indices at `0` and `∞` by log–log regression of `g(r)`.
pub fn bg_index(spec: &ProcessSpec, x: f64) -> Result<BgIndexEstimate> {
    bg_index_with(spec, x, &BgConfig::default())
}

pub fn bg_index_with(spec: &ProcessSpec, x: f64, cfg: &BgConfig) -> Result<BgIndexEstimate> {
    let mut profile = Vec::new();
    for j in cfg.j_min..=cfg.j_max {
        let r = 2f64.powi(j);
        profile.push((r, bg_profile(spec, x, r, cfg)?));
    }
    let fit = |range: std::ops::RangeInclusive<i32>| {
        let pts: Vec<(f64, f64)> = profile
            .iter()
            .zip(cfg.j_min..)
            .filter(|(_, j)| range.contains(j))
            .map(|(&(r, g), _)| (r.ln(), g.ln()))
            .collect();
        if pts.iter().any(|p| !p.1.is_finite()) {
            return (0.0, f64::INFINITY);
        }
        let f = linear_fit(&pts);
        (f.slope, f.residual)
    };
    let lo_range = cfg.j_min..=cfg.j_min + cfg.window;
    let hi_range = cfg.j_max - cfg.window..=cfg.j_max;
    let (beta0, residual0) = fit(lo_range);
    let (beta_inf, residual_inf) = fit(hi_range);
    Ok(BgIndexEstimate {
        x,
        beta0,
        beta_inf,
        window0: (2f64.powi(cfg.j_min), 2f64.powi(cfg.j_min + cfg.window)),
        window_inf: (2f64.powi(cfg.j_max - cfg.window), 2f64.powi(cfg.j_max)),
        residual0,
        residual_inf,
        poor_fit: residual0 > cfg.residual_threshold || residual_inf > cfg.residual_threshold,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triplet::{Compensation, Expr, JumpKernel, JumpLaw, StableScale};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn catalog() -> Vec<ProcessSpec> {
        vec![
            ProcessSpec::brownian(1.0),
            ProcessSpec::levy(JumpKernel::stable(1.5, StableScale::UNIT_SYMBOL)),
            ProcessSpec::levy(JumpKernel::stable(0.7, StableScale::Density(0.4))),
            ProcessSpec::levy(JumpKernel::new(crate::triplet::Family::SymmetricStable {
                alpha: 1.3,
                scale: StableScale::Density(1.0),
                truncate: Some(1.5),
            })),
            ProcessSpec::levy(JumpKernel::tempered(0.7, StableScale::Density(1.0), 2.0)),
            ProcessSpec::levy(
                JumpKernel::tempered(1.5, StableScale::Density(0.5), 1.0).with_compensation(Compensation::Full),
            ),
            ProcessSpec::levy(JumpKernel::compound_poisson(1.0, JumpLaw::TwoPoint { a: 1.0 })),
            ProcessSpec::levy(JumpKernel::compound_poisson(1.5, JumpLaw::Uniform { a: 2.0 })),
            ProcessSpec::levy(JumpKernel::compound_poisson(
                1.0,
                JumpLaw::Gaussian { mu: 0.4, sigma: 0.8 },
            )),
            ProcessSpec::new(
                Drift::Constant { value: 0.3 },
                Diffusion::Constant { value: 0.5 },
                JumpKernel::compound_poisson(2.0, JumpLaw::Gaussian { mu: -0.6, sigma: 1.3 })
                    .with_compensation(Compensation::None),
            ),
        ]
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        for spec in catalog() {
            for &xi in &[-7.0, -1.3, 0.02, 0.5, 2.0, 11.0, 130.0] {
                let a = eval_symbol_with(&spec, 0.0, xi, Method::ClosedForm).unwrap().value;
                let b = eval_symbol_with(&spec, 0.0, xi, Method::Quadrature).unwrap().value;
                let scale = a.norm().max(1e-12);
                assert!(
                    (a - b).norm() / scale < 1e-8,
                    "{:?} xi={xi}: {a} vs {b}",
                    spec.kernel.family
                );
            }
        }
    }

    #[test]
    fn symbol_examples() {
        assert_eq!(
            eval_symbol(&ProcessSpec::brownian(1.0), 3.0, 2.0).unwrap().value,
            Complex64::new(2.0, 0.0)
        );
        let sl = ProcessSpec::levy(
            JumpKernel::stable(1.2, StableScale::UNIT_SYMBOL)
                .with_modulation("alpha", Expr::sinusoidal(1.2, 0.3, 1.0, 0.0)),
        );
        assert_relative_eq!(
            eval_symbol(&sl, PI / 2.0, 3.0).unwrap().value.re,
            27f64.sqrt(),
            max_relative = 1e-12
        );
        let cp = ProcessSpec::levy(JumpKernel::compound_poisson(1.0, JumpLaw::TwoPoint { a: 1.0 }));
        let v = eval_symbol_with(&cp, 0.0, PI, Method::Quadrature).unwrap();
        assert_relative_eq!(v.value.re, 2.0, max_relative = 1e-15);
        assert_eq!(v.value.im, 0.0);
    }

    #[test]
    fn negative_definiteness_and_conjugate_symmetry() {
        for spec in catalog() {
            for i in 1..60 {
                let xi = 0.1 * i as f64 * 1.37;
                let p = eval_symbol(&spec, 0.0, xi).unwrap().value;
                let m = eval_symbol(&spec, 0.0, -xi).unwrap().value;
                assert!(p.re >= 0.0);
                assert_relative_eq!(p.re, m.re, max_relative = 1e-12, epsilon = 1e-15);
                assert_relative_eq!(p.im, -m.im, max_relative = 1e-12, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let d = symbol_derivative(&ProcessSpec::brownian(1.0), 0.0, 2, 0.0).unwrap();
        assert_eq!(d.value, Complex64::new(1.0, 0.0));
        let cp = ProcessSpec::levy(JumpKernel::compound_poisson(2.0, JumpLaw::TwoPoint { a: 3.0 }));
        assert_eq!(symbol_derivative(&cp, 0.0, 2, 0.0).unwrap().value.re, 18.0);
        // ∂⁴q(0) = i^6 ∫y⁴N = -3 for a standard Gaussian jump law
        let g = ProcessSpec::levy(JumpKernel::compound_poisson(
            1.0,
            JumpLaw::Gaussian { mu: 0.0, sigma: 1.0 },
        ));
        let d4 = symbol_derivative(&g, 0.0, 4, 0.0).unwrap().value;
        assert_relative_eq!(d4.re, -3.0, max_relative = 1e-14);
        let h = 2e-3;
        let q = |xi: f64| eval_symbol(&g, 0.0, xi).unwrap().value.re;
        let fd = (q(2.0 * h) - 4.0 * q(h) + 6.0 * q(0.0) - 4.0 * q(-h) + q(-2.0 * h)) / h.powi(4);
        assert!((fd - d4.re).abs() <= 1e-4, "fd = {fd}");
    }

    #[test]
    fn derivative_errors() {
        let s = ProcessSpec::levy(JumpKernel::stable(1.5, StableScale::UNIT_SYMBOL));
        assert!(matches!(
            symbol_derivative(&s, 0.0, 2, 0.0),
            Err(Error::MomentDoesNotExist { .. })
        ));
        assert!(symbol_derivative(&s, 0.0, 1, 0.5).is_ok());
        let b = ProcessSpec::brownian(1.0);
        assert!(matches!(
            symbol_derivative(&b, 0.0, 9, 0.0),
            Err(Error::DerivativeOrderTooHigh(9))
        ));
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-3;
        for spec in catalog() {
            let k = spec.kernel_at(0.0).unwrap();
            for order in 1..=4usize {
                if !k.outer(order as f64 + 1.0).is_finite() {
                    continue;
                }
                for &xi in &[0.0, 0.7] {
                    let lower = |o: usize, t: f64| -> Complex64 {
                        if o == 0 {
                            eval_symbol(&spec, 0.0, t).unwrap().value
                        } else {
                            symbol_derivative(&spec, 0.0, o, t).unwrap().value
                        }
                    };
                    let fd = (lower(order - 1, xi + h) - lower(order - 1, xi - h)) / (2.0 * h);
                    let exact = symbol_derivative(&spec, 0.0, order, xi).unwrap().value;
                    // O(h²) truncation with the next moment as constant
                    let bound =
                        1e-5 * (1.0 + k.moment(order as f64 + 2.0, crate::triplet::MomentRegion::All).min(1e6)) + 1e-7;
                    assert!(
                        (fd - exact).norm() <= bound,
                        "{:?} k={order} xi={xi}: fd={fd} exact={exact}",
                        spec.kernel.family
                    );
                }
            }
        }
    }

    #[test]
    fn growth_constant_examples() {
        let g = growth_constants(&ProcessSpec::gbm(0.0, 1.3), 2, Region::All).unwrap();
        assert_relative_eq!(g.c_k, 1.69, max_relative = 1e-12);
        assert!(g.witness.is_none());

        let cp = ProcessSpec::new(
            Drift::Constant { value: 0.0 },
            Diffusion::Constant { value: 0.4 },
            JumpKernel::compound_poisson(2.0, JumpLaw::TwoPoint { a: 3.0 }),
        );
        assert_relative_eq!(
            growth_constants(&cp, 2, Region::All).unwrap().c_k,
            18.4,
            max_relative = 1e-14
        );

        // truncated stable-like, α(x) = 1.2 + 0.3 cos x: ∫_{|y|≤1} y²|y|^{-1-α} dy = 2/(2-α), largest at x = 0
        let spec = ProcessSpec::levy(
            JumpKernel::new(crate::triplet::Family::SymmetricStable {
                alpha: 1.2,
                scale: StableScale::Density(1.0),
                truncate: Some(1.0),
            })
            .with_modulation("alpha", Expr::sinusoidal(1.2, 0.3, 1.0, PI / 2.0)),
        );
        let g = growth_constants(&spec, 2, Region::All).unwrap();
        assert_relative_eq!(g.c_k, 2.0 / (2.0 - 1.5), max_relative = 1e-6);
        assert!(g.witness.unwrap().abs() < 1e-3);
    }

    #[test]
    fn bg_indices_of_brownian_and_poisson() {
        let b = bg_index(&ProcessSpec::brownian(1.0), 0.0).unwrap();
        assert!((b.beta0 - 2.0).abs() < 0.05 && (b.beta_inf - 2.0).abs() < 0.05);
        let cp = bg_index(
            &ProcessSpec::levy(JumpKernel::compound_poisson(1.0, JumpLaw::Uniform { a: 1.0 })),
            0.0,
        )
        .unwrap();
        assert!((cp.beta0 - 2.0).abs() < 0.05, "{}", cp.beta0);
        // the sup of the oscillating sinc is sampled on a coarse η-grid at large r
        assert!(cp.beta_inf.abs() < 0.1, "{}", cp.beta_inf);
    }
}
