use super::functions::MomentFunction;
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_to_infinity, QuadConfig};
use crate::triplet::{
    coefficient_sups, grid_sup, search_bounds, Family, FrozenKernel, JumpLaw, Measure, ProcessSpec, Region, SupMethod,
};
use serde::{Deserialize, Serialize};

/// Grid size for the state sup of a tail integral.
pub const EXISTENCE_GRID_POINTS: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentExistence {
    pub function: MomentFunction,
    pub region: Region,
    pub exists: bool,
    /// `sup (|b| + |Q| + ∫(|y|²∧1) N)`
    pub m1: f64,
    /// `sup ∫_{|y|≥1} f(y) N(x, dy)`
    pub m2: f64,
    pub method: SupMethod,
    pub grid_points: usize,
    pub reason: Option<String>,
}

impl MomentExistence {
    /// `f(x) exp((M1 + M2) t)`, the moment bound with its constants set to 1.
    pub fn bound_shape(&self, fx: f64, t: f64) -> f64 {
        fx * ((self.m1 + self.m2) * t).exp()
    }
}

/// Why `∫_{|y|≥1} f(y) N(dy)` diverges for the image of `m` under `y = s z`, if it does.
fn divergence(m: &Measure, s: f64, f: &MomentFunction) -> Option<String> {
    let name = f.label();
    match *m {
        Measure::Stable { alpha, truncate, .. } if truncate.is_infinite() => {
            let heavy = match *f {
                MomentFunction::Power { p } | MomentFunction::PowerOrOne { p } => p >= alpha,
                MomentFunction::ExpPower { .. } | MomentFunction::ExpSquare => true,
                MomentFunction::Exponential { zeta } => zeta != 0.0,
                MomentFunction::One | MomentFunction::LogOrE => false,
            };
            heavy.then(|| format!("∫_{{|y|≥1}} {name} N(x,dy) = ∞: tail |y|^(-1-{alpha})"))
        }
        Measure::Tempered { lambda, truncate, .. } if truncate.is_infinite() => {
            let rate = lambda / s;
            let heavy = match *f {
                MomentFunction::ExpPower { beta } => beta >= 1.0 && rate <= 1.0,
                MomentFunction::Exponential { zeta } => zeta.abs() >= rate,
                MomentFunction::ExpSquare => true,
                _ => false,
            };
            heavy.then(|| format!("∫_{{|y|≥1}} {name} N(x,dy) = ∞: tail exp(-{rate}|y|)"))
        }
        Measure::Poisson {
            law: JumpLaw::Gaussian { sigma, .. },
            ..
        } => {
            let heavy = matches!(f, MomentFunction::ExpSquare) && 2.0 * (s * sigma).powi(2) >= 1.0;
            heavy.then(|| format!("∫_{{|y|≥1}} {name} N(x,dy) = ∞: Gaussian jumps with variance ≥ 1/2"))
        }
        _ => None,
    }
}

/// `ln` of the signed jump density in driver coordinates.
fn ln_density(m: &Measure, z: f64) -> f64 {
    let a = z.abs();
    match *m {
        Measure::Stable { alpha, c, truncate } => {
            if a <= truncate {
                c.ln() - (1.0 + alpha) * a.ln()
            } else {
                f64::NEG_INFINITY
            }
        }
        Measure::Tempered {
            alpha,
            c,
            lambda,
            truncate,
        } => {
            if a <= truncate {
                c.ln() - lambda * a - (1.0 + alpha) * a.ln()
            } else {
                f64::NEG_INFINITY
            }
        }
        Measure::Poisson {
            rate,
            law: JumpLaw::Uniform { a: w },
        } => {
            if a <= w {
                (rate / (2.0 * w)).ln()
            } else {
                f64::NEG_INFINITY
            }
        }
        Measure::Poisson {
            rate,
            law: JumpLaw::Gaussian { mu, sigma },
        } => {
            let u = (z - mu) / sigma;
            rate.ln() - sigma.ln() - 0.5 * u * u - 0.5 * (2.0 * std::f64::consts::PI).ln()
        }
        _ => f64::NEG_INFINITY,
    }
}

/// `∫_{|y|≥1} f(y) N(dy)` for one frozen kernel.
pub fn tail_integral(k: &FrozenKernel, f: &MomentFunction) -> f64 {
    let s = k.scale();
    if s == 0.0 || matches!(k.measure, Measure::Zero) {
        return 0.0;
    }
    if divergence(&k.measure, s, f).is_some() {
        return f64::INFINITY;
    }
    match *f {
        MomentFunction::One => return k.outer(0.0),
        MomentFunction::Power { p } | MomentFunction::PowerOrOne { p } => return k.outer(p),
        _ => {}
    }
    if let Measure::Poisson {
        rate,
        law: JumpLaw::TwoPoint { a },
    } = k.measure
    {
        let y = k.dilation * a;
        return if y.abs() >= 1.0 {
            0.5 * rate * (f.eval(y) + f.eval(-y))
        } else {
            0.0
        };
    }
    let cfg = QuadConfig {
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        ..QuadConfig::default()
    };
    let m = k.measure;
    let d = k.dilation;
    // z = e^u on each half-line
    let integrand = |u: f64| {
        let z = u.exp();
        if !z.is_finite() {
            return 0.0;
        }
        [1.0, -1.0]
            .iter()
            .map(|&sg| (f.ln_eval(d * sg * z) + ln_density(&m, sg * z) + u).exp())
            .sum::<f64>()
    };
    let lo = (1.0 / s).ln();
    let radius = m.support_radius();
    if radius.is_infinite() {
        integrate_to_infinity(integrand, lo, &cfg).value
    } else if radius > 1.0 / s {
        integrate(integrand, lo, radius.ln(), &cfg).value
    } else {
        0.0
    }
}

/// Whether `sup_{x∈K} ∫_{|y|≥1} f(y) N(x, dy)` is finite, with the constants of the growth bound.
pub fn moment_exists(spec: &ProcessSpec, f: MomentFunction, region: Region) -> Result<MomentExistence> {
    if !f.in_existence_catalog() {
        return Err(Error::UnsupportedFunction(f.label()));
    }
    f.validate()?;
    let m1 = coefficient_sups(spec, region, 1.0, 2.0)?.m1;

    // heavy stable tails over the whole index range are decided without a grid
    if let (Family::SymmetricStable { truncate: None, .. }, Some((amin, _))) =
        (spec.kernel.family, spec.kernel.alpha_range(region))
    {
        let probe = crate::triplet::Measure::Stable {
            alpha: amin,
            c: 1.0,
            truncate: f64::INFINITY,
        };
        if let Some(reason) = divergence(&probe, 1.0, &f) {
            return Ok(MomentExistence {
                function: f,
                region,
                exists: false,
                m1,
                m2: f64::INFINITY,
                method: SupMethod::ClosedForm,
                grid_points: 0,
                reason: Some(reason),
            });
        }
    }

    let at = |x: f64| -> Result<(f64, Option<String>)> {
        let k = spec.kernel_at(x)?;
        Ok((tail_integral(&k, &f), divergence(&k.measure, k.scale(), &f)))
    };
    let constant = spec.kernel.is_state_independent() && spec.sde_multiplier.is_none_or(|e| e.is_constant());
    let (m2, reason, method, grid_points) = if constant {
        let probe = match region {
            Region::Interval { lo, .. } => lo,
            Region::All => 0.0,
        };
        let (v, r) = at(probe)?;
        (v, r, SupMethod::ClosedForm, 0)
    } else {
        let (lo, hi) = search_bounds(spec, region);
        at(lo)?;
        let (xmax, v) = grid_sup(
            |x| at(x).map(|p| p.0).unwrap_or(f64::NAN),
            lo,
            hi,
            EXISTENCE_GRID_POINTS,
        );
        let reason = if v.is_finite() {
            None
        } else {
            at(xmax)?.1.map(|r| format!("{r} at x = {xmax}"))
        };
        (v, reason, SupMethod::Grid, EXISTENCE_GRID_POINTS)
    };
    Ok(MomentExistence {
        function: f,
        region,
        exists: m2.is_finite(),
        m1,
        m2,
        method,
        grid_points,
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triplet::{Expr, JumpKernel, StableScale};

    fn stable_like() -> ProcessSpec {
        ProcessSpec::levy(
            JumpKernel::stable(1.2, StableScale::UNIT_SYMBOL)
                .with_modulation("alpha", Expr::sinusoidal(1.2, 0.3, 1.0, 0.0)),
        )
    }

    #[test]
    fn bounded_jumps_have_exponential_moments() {
        let spec = ProcessSpec::levy(JumpKernel::compound_poisson(2.0, JumpLaw::TwoPoint { a: 3.0 }));
        let r = moment_exists(&spec, MomentFunction::ExpPower { beta: 1.0 }, Region::All).unwrap();
        assert!(r.exists);
        assert!((r.m2 - 2.0 * 3f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn stable_like_powers_below_lower_index_exist() {
        let spec = stable_like();
        assert!(
            moment_exists(&spec, MomentFunction::PowerOrOne { p: 0.85 }, Region::All)
                .unwrap()
                .exists
        );
        let r = moment_exists(&spec, MomentFunction::PowerOrOne { p: 0.95 }, Region::All).unwrap();
        assert!(!r.exists && r.reason.is_some());
    }

    #[test]
    fn stable_second_moment_diverges() {
        let spec = ProcessSpec::levy(JumpKernel::stable(1.5, StableScale::UNIT_SYMBOL));
        let r = moment_exists(&spec, MomentFunction::PowerOrOne { p: 2.0 }, Region::All).unwrap();
        assert!(!r.exists && r.m2.is_infinite());
    }

    #[test]
    fn exp_square_is_outside_catalog() {
        let spec = ProcessSpec::brownian(1.0);
        assert!(matches!(
            moment_exists(&spec, MomentFunction::ExpSquare, Region::All),
            Err(Error::UnsupportedFunction(_))
        ));
    }

    #[test]
    fn tail_integrals_match_closed_forms() {
        // stable: ∫_{|y|≥1} |y|^p c|y|^{-1-α} dy = 2c/(α-p)
        let k = FrozenKernel {
            measure: Measure::Stable {
                alpha: 1.5,
                c: 0.7,
                truncate: f64::INFINITY,
            },
            dilation: 1.0,
            rho: 1.0,
        };
        let v = tail_integral(&k, &MomentFunction::Power { p: 0.5 });
        assert!((v - 2.0 * 0.7 / 1.0).abs() < 1e-9, "{v}");
        // log tail: 2c[(1 - e^{-α})/α + e^{-α}(α + 1)/α²]
        let a: f64 = 1.5;
        let expect = 2.0 * 0.7 * ((1.0 - (-a).exp()) / a + (-a).exp() * (a + 1.0) / (a * a));
        let v = tail_integral(&k, &MomentFunction::LogOrE);
        assert!((v - expect).abs() < 1e-9, "{v} vs {expect}");
        let t = FrozenKernel {
            measure: Measure::Tempered {
                alpha: 0.5,
                c: 1.0,
                lambda: 2.0,
                truncate: f64::INFINITY,
            },
            dilation: 1.0,
            rho: 1.0,
        };
        let v = tail_integral(&t, &MomentFunction::Power { p: 1.0 });
        assert!((v - t.outer(1.0)).abs() < 1e-9 * v);
        assert!(tail_integral(&t, &MomentFunction::Exponential { zeta: 2.5 }).is_infinite());
        assert!(tail_integral(&t, &MomentFunction::Exponential { zeta: 1.5 }).is_finite());
        // Gaussian jumps: E[e^{ζY}] = e^{ζμ + ζ²σ²/2} less the part with |Y| < 1
        let g = FrozenKernel {
            measure: Measure::Poisson {
                rate: 1.3,
                law: JumpLaw::Gaussian { mu: 0.4, sigma: 1.1 },
            },
            dilation: 1.0,
            rho: 1.0,
        };
        let zeta: f64 = 0.6;
        let full = 1.3 * (zeta * 0.4 + 0.5 * zeta * zeta * 1.21).exp();
        let core = crate::quad::integrate(
            |y: f64| 1.3 * (zeta * y).exp() * crate::special::normal_pdf((y - 0.4) / 1.1) / 1.1,
            -1.0,
            1.0,
            &QuadConfig::default(),
        )
        .value;
        let v = tail_integral(&g, &MomentFunction::Exponential { zeta });
        assert!((v - (full - core)).abs() < 1e-9, "{v} vs {}", full - core);
    }

    #[test]
    fn existence_is_monotone_in_the_function() {
        let spec = stable_like();
        let ladder = [0.3, 0.6, 0.89, 0.91, 1.2];
        let verdicts: Vec<bool> = ladder
            .iter()
            .map(|&p| {
                moment_exists(&spec, MomentFunction::PowerOrOne { p }, Region::All)
                    .unwrap()
                    .exists
            })
            .collect();
        for w in verdicts.windows(2) {
            assert!(w[0] || !w[1], "{verdicts:?}");
        }
        assert!(
            moment_exists(&spec, MomentFunction::LogOrE, Region::All)
                .unwrap()
                .exists
        );
        assert!(
            !moment_exists(&spec, MomentFunction::ExpPower { beta: 0.5 }, Region::All)
                .unwrap()
                .exists
        );
    }
}
