use super::expr::{Expr, Region};
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_power_weight, integrate_to_infinity, QuadConfig};
use crate::special::{normal_cdf, normal_pdf, stable_symbol_constant, tempered_power_integral};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Density coefficient of a (tempered) stable kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StableScale {
    /// Density `c|y|^{-1-α}`.
    Density(f64),
    /// `c = 1/κ_α`, giving the symbol `|ξ|^α` exactly.
    Named(NamedScale),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedScale {
    UnitSymbol,
}

impl StableScale {
    pub const UNIT_SYMBOL: StableScale = StableScale::Named(NamedScale::UnitSymbol);

    pub fn density(&self, alpha: f64) -> f64 {
        match *self {
            StableScale::Density(c) => c,
            StableScale::Named(NamedScale::UnitSymbol) => 1.0 / stable_symbol_constant(alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum JumpLaw {
    Gaussian {
        mu: f64,
        sigma: f64,
    },
    /// Atoms at `±a` with equal weight.
    TwoPoint {
        a: f64,
    },
    /// Uniform on `[-a, a]`.
    Uniform {
        a: f64,
    },
}

impl JumpLaw {
    pub fn is_symmetric(&self) -> bool {
        !matches!(*self, JumpLaw::Gaussian { mu, .. } if mu != 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Family {
    SymmetricStable {
        alpha: f64,
        scale: StableScale,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncate: Option<f64>,
    },
    TemperedStable {
        alpha: f64,
        scale: StableScale,
        lambda: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        truncate: Option<f64>,
    },
    CompoundPoisson {
        rate: f64,
        jumps: JumpLaw,
    },
    None,
}

/// Small-jump compensation in `1 - e^{iyξ} + iyξ·1_{|y|≤ρ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compensation {
    /// `ρ = 1`
    #[default]
    Truncated,
    /// `ρ = ∞` (martingale type)
    Full,
    /// `ρ = 0` (bounded-variation type)
    None,
}

impl Compensation {
    pub fn radius(&self) -> f64 {
        match self {
            Compensation::Truncated => 1.0,
            Compensation::Full => f64::INFINITY,
            Compensation::None => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpKernel {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modulation: BTreeMap<String, Expr>,
    #[serde(default)]
    pub compensation: Compensation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentRegion {
    /// `|y| ≤ 1`
    Inner,
    /// `|y| > 1`
    Outer,
    All,
}

/// A concrete Lévy measure in driver coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    /// `c|z|^{-1-α}` on `0 < |z| ≤ truncate`
    Stable {
        alpha: f64,
        c: f64,
        truncate: f64,
    },
    /// `c e^{-λ|z|}|z|^{-1-α}` on `0 < |z| ≤ truncate`
    Tempered {
        alpha: f64,
        c: f64,
        lambda: f64,
        truncate: f64,
    },
    Poisson {
        rate: f64,
        law: JumpLaw,
    },
    Zero,
}

/// The kernel frozen at one state: `N(x, ·)` is the image of `measure` under `z ↦ dilation·z`,
/// compensated on `|z| ≤ rho` in driver coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenKernel {
    pub measure: Measure,
    pub dilation: f64,
    pub rho: f64,
}

fn domain_check(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::domain(what()))
    }
}

impl JumpKernel {
    pub fn new(family: Family) -> Self {
        JumpKernel {
            family,
            modulation: BTreeMap::new(),
            compensation: Compensation::Truncated,
        }
    }

    pub fn none() -> Self {
        Self::new(Family::None)
    }

    pub fn stable(alpha: f64, scale: StableScale) -> Self {
        Self::new(Family::SymmetricStable {
            alpha,
            scale,
            truncate: None,
        })
    }

    pub fn tempered(alpha: f64, scale: StableScale, lambda: f64) -> Self {
        Self::new(Family::TemperedStable {
            alpha,
            scale,
            lambda,
            truncate: None,
        })
    }

    pub fn compound_poisson(rate: f64, jumps: JumpLaw) -> Self {
        Self::new(Family::CompoundPoisson { rate, jumps })
    }

    pub fn with_modulation(mut self, param: &str, expr: Expr) -> Self {
        self.modulation.insert(param.to_string(), expr);
        self
    }

    pub fn with_compensation(mut self, compensation: Compensation) -> Self {
        self.compensation = compensation;
        self
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::SymmetricStable { .. } => "symmetric_stable",
            Family::TemperedStable { .. } => "tempered_stable",
            Family::CompoundPoisson { .. } => "compound_poisson",
            Family::None => "none",
        }
    }

    fn allowed_params(&self) -> &'static [&'static str] {
        match self.family {
            Family::SymmetricStable { .. } => &["alpha", "scale"],
            Family::TemperedStable { .. } => &["alpha", "scale", "lambda"],
            Family::CompoundPoisson { jumps, .. } => match jumps {
                JumpLaw::Gaussian { .. } => &["rate", "mu", "sigma"],
                JumpLaw::TwoPoint { .. } | JumpLaw::Uniform { .. } => &["rate", "a"],
            },
            Family::None => &[],
        }
    }

    fn param(&self, name: &str, base: f64, x: f64) -> f64 {
        self.modulation.get(name).map_or(base, |e| e.eval(x))
    }

    /// Range of a (possibly modulated) parameter over a region.
    pub fn param_range(&self, name: &str, base: f64, region: Region) -> (f64, f64) {
        self.modulation.get(name).map_or((base, base), |e| e.range_on(region))
    }

    /// Range of the stability index over a region, if the family has one.
    pub fn alpha_range(&self, region: Region) -> Option<(f64, f64)> {
        match self.family {
            Family::SymmetricStable { alpha, .. } | Family::TemperedStable { alpha, .. } => {
                Some(self.param_range("alpha", alpha, region))
            }
            _ => None,
        }
    }

    pub fn is_state_independent(&self) -> bool {
        self.modulation.values().all(Expr::is_constant)
    }

    pub fn is_symmetric(&self) -> bool {
        match self.family {
            Family::CompoundPoisson {
                jumps: JumpLaw::Gaussian { mu, .. },
                ..
            } => {
                mu == 0.0
                    && self
                        .modulation
                        .get("mu")
                        .is_none_or(|e| e.range_on(Region::All) == (0.0, 0.0))
            }
            _ => true,
        }
    }

    /// Checks that every parameter stays in its legal range for all states.
    pub fn validate(&self) -> Result<()> {
        let allowed = self.allowed_params();
        for key in self.modulation.keys() {
            domain_check(allowed.contains(&key.as_str()), || {
                format!("family {} has no modulatable parameter `{key}`", self.family_name())
            })?;
        }
        let all = Region::All;
        let positive = |name: &str, base: f64| -> Result<()> {
            let (lo, hi) = self.param_range(name, base, all);
            domain_check(lo > 0.0 && hi.is_finite(), || {
                format!("{name} must be positive and finite, range [{lo}, {hi}]")
            })
        };
        match self.family {
            Family::SymmetricStable { alpha, scale, truncate }
            | Family::TemperedStable {
                alpha, scale, truncate, ..
            } => {
                let (lo, hi) = self.param_range("alpha", alpha, all);
                domain_check(lo > 0.0 && hi < 2.0, || {
                    format!("alpha range [{lo}, {hi}] not inside (0, 2)")
                })?;
                match scale {
                    StableScale::Density(c) => positive("scale", c)?,
                    StableScale::Named(_) => domain_check(!self.modulation.contains_key("scale"), || {
                        "a named scale cannot be modulated".into()
                    })?,
                }
                if let Some(r) = truncate {
                    domain_check(r > 0.0, || format!("truncation radius must be positive, got {r}"))?;
                }
                if let Family::TemperedStable { lambda, .. } = self.family {
                    positive("lambda", lambda)?;
                }
            }
            Family::CompoundPoisson { rate, jumps } => {
                positive("rate", rate)?;
                match jumps {
                    JumpLaw::Gaussian { mu, sigma } => {
                        positive("sigma", sigma)?;
                        let (lo, hi) = self.param_range("mu", mu, all);
                        domain_check(lo.is_finite() && hi.is_finite(), || "mu must be finite".into())?;
                    }
                    JumpLaw::TwoPoint { a } | JumpLaw::Uniform { a } => positive("a", a)?,
                }
            }
            Family::None => {}
        }
        Ok(())
    }

    /// The kernel's parameters evaluated at `x`.
    pub fn measure_at(&self, x: f64) -> Result<Measure> {
        let m = match self.family {
            Family::SymmetricStable { alpha, scale, truncate } => {
                let a = self.param("alpha", alpha, x);
                let c = match scale {
                    StableScale::Density(c) => self.param("scale", c, x),
                    named => named.density(a),
                };
                Measure::Stable {
                    alpha: a,
                    c,
                    truncate: truncate.unwrap_or(f64::INFINITY),
                }
            }
            Family::TemperedStable {
                alpha,
                scale,
                lambda,
                truncate,
            } => {
                let a = self.param("alpha", alpha, x);
                let c = match scale {
                    StableScale::Density(c) => self.param("scale", c, x),
                    named => named.density(a),
                };
                Measure::Tempered {
                    alpha: a,
                    c,
                    lambda: self.param("lambda", lambda, x),
                    truncate: truncate.unwrap_or(f64::INFINITY),
                }
            }
            Family::CompoundPoisson { rate, jumps } => {
                let law = match jumps {
                    JumpLaw::Gaussian { mu, sigma } => JumpLaw::Gaussian {
                        mu: self.param("mu", mu, x),
                        sigma: self.param("sigma", sigma, x),
                    },
                    JumpLaw::TwoPoint { a } => JumpLaw::TwoPoint {
                        a: self.param("a", a, x),
                    },
                    JumpLaw::Uniform { a } => JumpLaw::Uniform {
                        a: self.param("a", a, x),
                    },
                };
                Measure::Poisson {
                    rate: self.param("rate", rate, x),
                    law,
                }
            }
            Family::None => Measure::Zero,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn freeze(&self, x: f64) -> Result<FrozenKernel> {
        Ok(FrozenKernel {
            measure: self.measure_at(x)?,
            dilation: 1.0,
            rho: self.compensation.radius(),
        })
    }
}

/// `lo^d (expm1(d ln(hi/lo)))/d`, i.e. `(hi^d - lo^d)/d` without cancellation near `d = 0`.
fn power_difference(lo: f64, hi: f64, d: f64) -> f64 {
    let l = (hi / lo).ln();
    if d.abs() * l < 1e-14 {
        return l;
    }
    lo.powf(d) * (d * l).exp_m1() / d
}

impl Measure {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::domain(format!("{what} = {v} outside its legal range")));
        match *self {
            Measure::Stable { alpha, c, truncate } | Measure::Tempered { alpha, c, truncate, .. } => {
                if !(alpha > 0.0 && alpha < 2.0) {
                    return bad("alpha", alpha);
                }
                if !(c > 0.0 && c.is_finite()) {
                    return bad("scale", c);
                }
                if !(truncate > 0.0) {
                    return bad("truncate", truncate);
                }
                if let Measure::Tempered { lambda, .. } = *self {
                    if !(lambda > 0.0 && lambda.is_finite()) {
                        return bad("lambda", lambda);
                    }
                }
            }
            Measure::Poisson { rate, law } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return bad("rate", rate);
                }
                match law {
                    JumpLaw::Gaussian { mu, sigma } => {
                        if !(sigma > 0.0 && sigma.is_finite()) {
                            return bad("sigma", sigma);
                        }
                        if !mu.is_finite() {
                            return bad("mu", mu);
                        }
                    }
                    JumpLaw::TwoPoint { a } | JumpLaw::Uniform { a } => {
                        if !(a > 0.0 && a.is_finite()) {
                            return bad("a", a);
                        }
                    }
                }
            }
            Measure::Zero => {}
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        match *self {
            Measure::Poisson { law, .. } => law.is_symmetric(),
            _ => true,
        }
    }

    pub fn is_finite_activity(&self) -> bool {
        matches!(self, Measure::Poisson { .. } | Measure::Zero)
    }

    /// Largest support radius (∞ for unbounded support).
    pub fn support_radius(&self) -> f64 {
        match *self {
            Measure::Stable { truncate, .. } | Measure::Tempered { truncate, .. } => truncate,
            Measure::Poisson {
                law: JumpLaw::TwoPoint { a } | JumpLaw::Uniform { a },
                ..
            } => a,
            Measure::Poisson { .. } => f64::INFINITY,
            Measure::Zero => 0.0,
        }
    }

    /// `∫_{lo < |z| ≤ hi} |z|^p ν(dz)`; divergence is decided analytically and reported as `∞`.
    pub fn moment_between(&self, p: f64, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        match *self {
            Measure::Stable { alpha, c, truncate } => {
                let hi = hi.min(truncate);
                if hi <= lo {
                    return 0.0;
                }
                let d = p - alpha;
                if lo == 0.0 {
                    return if d > 0.0 {
                        2.0 * c * hi.powf(d) / d
                    } else {
                        f64::INFINITY
                    };
                }
                if hi.is_infinite() {
                    return if d < 0.0 {
                        2.0 * c * lo.powf(d) / -d
                    } else {
                        f64::INFINITY
                    };
                }
                2.0 * c * power_difference(lo, hi, d)
            }
            Measure::Tempered {
                alpha,
                c,
                lambda,
                truncate,
            } => {
                let hi = hi.min(truncate);
                if hi <= lo {
                    return 0.0;
                }
                let d = p - alpha;
                if lo == 0.0 && d <= 0.0 {
                    return f64::INFINITY;
                }
                2.0 * c * tempered_power_integral(d, lambda, lo, hi)
            }
            Measure::Poisson { rate, law } => match law {
                JumpLaw::TwoPoint { a } => {
                    if lo < a && a <= hi {
                        rate * a.powf(p)
                    } else {
                        0.0
                    }
                }
                JumpLaw::Uniform { a } => {
                    let (l, h) = (lo.min(a), hi.min(a));
                    rate * (h.powf(p + 1.0) - l.powf(p + 1.0)) / ((p + 1.0) * a)
                }
                JumpLaw::Gaussian { mu, sigma } => rate * gaussian_abs_moment_between(mu, sigma, p, lo, hi),
            },
            Measure::Zero => 0.0,
        }
    }

    /// `ν({|z| > r})`
    pub fn mass_above(&self, r: f64) -> f64 {
        self.moment_between(0.0, r, f64::INFINITY)
    }

    /// `∫_{lo < |z| ≤ hi} z ν(dz)`
    pub fn signed_first_between(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo || self.is_symmetric() {
            return 0.0;
        }
        match *self {
            Measure::Poisson {
                rate,
                law: JumpLaw::Gaussian { mu, sigma },
            } => {
                let partial = |a: f64, b: f64| {
                    // E[Z; a < Z ≤ b] for Z ~ N(μ, σ²)
                    let (za, zb) = ((a - mu) / sigma, (b - mu) / sigma);
                    let (ca, cb) = (
                        if a.is_infinite() {
                            a.signum().max(0.0)
                        } else {
                            normal_cdf(za)
                        },
                        if b.is_infinite() {
                            b.signum().max(0.0)
                        } else {
                            normal_cdf(zb)
                        },
                    );
                    let (pa, pb) = (
                        if a.is_infinite() { 0.0 } else { normal_pdf(za) },
                        if b.is_infinite() { 0.0 } else { normal_pdf(zb) },
                    );
                    mu * (cb - ca) + sigma * (pa - pb)
                };
                rate * (partial(lo, hi) + partial(-hi, -lo))
            }
            _ => 0.0,
        }
    }

    /// Quadrature evaluation of `moment_between`, used as an independent cross-check.
    pub fn moment_between_quadrature(&self, p: f64, lo: f64, hi: f64) -> f64 {
        let cfg = QuadConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            ..QuadConfig::default()
        };
        if hi <= lo {
            return 0.0;
        }
        let one_sided = |density: &dyn Fn(f64) -> f64, sing: f64, lo: f64, hi: f64| -> f64 {
            // density(z) ~ z^{-1-sing} at 0
            if hi <= lo {
                return 0.0;
            }
            if lo == 0.0 {
                let s = p - 1.0 - sing;
                if s <= -1.0 {
                    return f64::INFINITY;
                }
                let split = hi.min(1.0);
                let head = integrate_power_weight(|z| density(z) * z.powf(1.0 + sing), s, split, &cfg).value;
                let tail = if hi > split {
                    tail_integral(&|z| z.powf(p) * density(z), split, hi, &cfg)
                } else {
                    0.0
                };
                head + tail
            } else {
                tail_integral(&|z| z.powf(p) * density(z), lo, hi, &cfg)
            }
        };
        match *self {
            Measure::Stable { alpha, c, truncate } => {
                let hi = hi.min(truncate);
                if hi.is_infinite() && p >= alpha {
                    return f64::INFINITY;
                }
                if hi.is_infinite() {
                    // map the power tail onto a finite range: z = 1/u
                    let lo_eff = lo.max(1.0);
                    let head = one_sided(&|z: f64| c * z.powf(-1.0 - alpha), alpha, lo, lo_eff);
                    let s = alpha - p - 1.0;
                    let tail = integrate_power_weight(|_| c, s, 1.0 / lo_eff, &cfg).value;
                    return 2.0 * (head + tail);
                }
                2.0 * one_sided(&|z: f64| c * z.powf(-1.0 - alpha), alpha, lo, hi)
            }
            Measure::Tempered {
                alpha,
                c,
                lambda,
                truncate,
            } => {
                let hi = hi.min(truncate);
                2.0 * one_sided(&|z: f64| c * (-lambda * z).exp() * z.powf(-1.0 - alpha), alpha, lo, hi)
            }
            Measure::Poisson { rate, law } => match law {
                JumpLaw::TwoPoint { .. } => self.moment_between(p, lo, hi),
                JumpLaw::Uniform { a } => {
                    let hi = hi.min(a);
                    2.0 * one_sided(&|_| rate / (2.0 * a), -1.0, lo.min(hi), hi)
                }
                JumpLaw::Gaussian { mu, sigma } => {
                    let dens = |z: f64| rate * (normal_pdf((z - mu) / sigma) + normal_pdf((-z - mu) / sigma)) / sigma;
                    let hi = hi.min(mu.abs() + 40.0 * sigma);
                    one_sided(&dens, -1.0, lo.min(hi), hi)
                }
            },
            Measure::Zero => 0.0,
        }
    }
}

fn tail_integral(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, cfg: &QuadConfig) -> f64 {
    if hi.is_infinite() {
        integrate_to_infinity(f, lo, cfg).value
    } else {
        integrate(f, lo, hi, cfg).value
    }
}

/// `E[|Z|^p; lo < |Z| ≤ hi]` for `Z ~ N(μ, σ²)` by quadrature.
fn gaussian_abs_moment_between(mu: f64, sigma: f64, p: f64, lo: f64, hi: f64) -> f64 {
    let cfg = QuadConfig {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        ..QuadConfig::default()
    };
    let hi = hi.min(mu.abs() + 40.0 * sigma);
    if hi <= lo {
        return 0.0;
    }
    let dens = |z: f64| (normal_pdf((z - mu) / sigma) + normal_pdf((-z - mu) / sigma)) / sigma;
    let mut total = 0.0;
    // split at the modes so the adaptive rule sees both bumps
    let mut cuts = vec![lo, hi];
    for m in [mu.abs() - 4.0 * sigma, mu.abs(), mu.abs() + 4.0 * sigma] {
        if m > lo && m < hi {
            cuts.push(m);
        }
    }
    cuts.sort_by(f64::total_cmp);
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        total += if a == 0.0 && p < 1.0 {
            integrate_power_weight(dens, p, b, &cfg).value
        } else {
            integrate(|z: f64| z.powf(p) * dens(z), a, b, &cfg).value
        };
    }
    total
}

impl FrozenKernel {
    pub fn scale(&self) -> f64 {
        self.dilation.abs()
    }

    /// Compensation radius in state coordinates.
    pub fn rho_state(&self) -> f64 {
        self.rho * self.scale()
    }

    /// `∫_{lo < |y| ≤ hi} |y|^p N(x, dy)` in state coordinates.
    pub fn moment_between(&self, p: f64, lo: f64, hi: f64) -> f64 {
        let s = self.scale();
        if s == 0.0 || matches!(self.measure, Measure::Zero) {
            return 0.0;
        }
        let v = self.measure.moment_between(p, lo / s, hi / s);
        if v == 0.0 {
            0.0
        } else {
            s.powf(p) * v
        }
    }

    pub fn moment(&self, p: f64, region: MomentRegion) -> f64 {
        match region {
            MomentRegion::Inner => self.moment_between(p, 0.0, 1.0),
            MomentRegion::Outer => self.moment_between(p, 1.0, f64::INFINITY),
            MomentRegion::All => self.moment_between(p, 0.0, 1.0) + self.moment_between(p, 1.0, f64::INFINITY),
        }
    }

    pub fn inner(&self, p: f64) -> f64 {
        self.moment(p, MomentRegion::Inner)
    }

    pub fn outer(&self, p: f64) -> f64 {
        self.moment(p, MomentRegion::Outer)
    }

    /// `∫ (|y|² ∧ 1) N(x, dy)`
    pub fn levy_integral(&self) -> f64 {
        self.inner(2.0) + self.moment(0.0, MomentRegion::Outer)
    }

    /// `∫_{lo < |y| ≤ hi} y N(x, dy)` in state coordinates.
    pub fn signed_first_between(&self, lo: f64, hi: f64) -> f64 {
        let s = self.scale();
        if s == 0.0 {
            return 0.0;
        }
        self.dilation * self.measure.signed_first_between(lo / s, hi / s)
    }

    /// `∫_{|y| ≤ r} y N(x, dy)` (∞ when `|y|` is not integrable there).
    pub fn signed_first_below(&self, r: f64) -> f64 {
        if self.measure.is_symmetric() {
            return if self.moment_between(1.0, 0.0, r.min(1.0)).is_finite() || r == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
        }
        self.signed_first_between(0.0, r)
    }

    /// `∫_{|y| > r} y N(x, dy)` (∞ when `|y|` is not integrable there).
    pub fn signed_first_above(&self, r: f64) -> f64 {
        if !self.moment_between(1.0, r.max(1.0), f64::INFINITY).is_finite() {
            return f64::INFINITY;
        }
        if self.measure.is_symmetric() {
            return 0.0;
        }
        self.signed_first_between(r, f64::INFINITY)
    }
}

/// `∫ |y|^p N(x, dy)` over the requested region.
pub fn kernel_fractional_moment(kernel: &JumpKernel, x: f64, p: f64, region: MomentRegion) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::domain(format!("moment exponent must be nonnegative, got {p}")));
    }
    Ok(kernel.freeze(x)?.moment(p, region))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn catalog() -> Vec<Measure> {
        vec![
            Measure::Stable {
                alpha: 0.6,
                c: 1.3,
                truncate: f64::INFINITY,
            },
            Measure::Stable {
                alpha: 1.5,
                c: 0.7,
                truncate: f64::INFINITY,
            },
            Measure::Stable {
                alpha: 1.2,
                c: 1.0,
                truncate: 2.5,
            },
            Measure::Tempered {
                alpha: 0.8,
                c: 1.0,
                lambda: 1.0,
                truncate: f64::INFINITY,
            },
            Measure::Tempered {
                alpha: 1.5,
                c: 0.4,
                lambda: 2.0,
                truncate: f64::INFINITY,
            },
            Measure::Poisson {
                rate: 2.0,
                law: JumpLaw::TwoPoint { a: 3.0 },
            },
            Measure::Poisson {
                rate: 1.5,
                law: JumpLaw::Uniform { a: 2.0 },
            },
            Measure::Poisson {
                rate: 1.0,
                law: JumpLaw::Gaussian { mu: 0.4, sigma: 1.1 },
            },
        ]
    }

    #[test]
    fn closed_form_examples() {
        let k = JumpKernel::stable(1.0, StableScale::Density(0.8));
        let v = kernel_fractional_moment(&k, 0.0, 1.7, MomentRegion::Inner).unwrap();
        assert_relative_eq!(v, 2.0 * 0.8 / 0.7, max_relative = 1e-15);
        let k = JumpKernel::stable(1.5, StableScale::Density(1.0));
        assert!(kernel_fractional_moment(&k, 0.0, 1.5, MomentRegion::Outer)
            .unwrap()
            .is_infinite());
        let k = JumpKernel::compound_poisson(2.0, JumpLaw::TwoPoint { a: 3.0 });
        assert_eq!(
            kernel_fractional_moment(&k, 0.0, 0.5, MomentRegion::All).unwrap(),
            2.0 * 3f64.sqrt()
        );
    }

    #[test]
    fn tempered_outer_moment_matches_incomplete_gamma_oracle() {
        // ∫_{|y|>1} y² e^{-|y|}|y|^{-1.8} dy = 2Γ(1.2, 1)
        let k = JumpKernel::tempered(0.8, StableScale::Density(1.0), 1.0);
        let v = kernel_fractional_moment(&k, 0.0, 2.0, MomentRegion::Outer).unwrap();
        assert_relative_eq!(v, 0.831_947_031_770_620_5, max_relative = 1e-12);
        let q = k
            .freeze(0.0)
            .unwrap()
            .measure
            .moment_between_quadrature(2.0, 1.0, f64::INFINITY);
        assert_relative_eq!(q, 0.831_947_031_770_620_5, max_relative = 1e-9);
        let inner = kernel_fractional_moment(&k, 0.0, 1.5, MomentRegion::Inner).unwrap();
        assert_relative_eq!(inner, 1.976_127_307_821_473_4, max_relative = 1e-12);
    }

    #[test]
    fn quadrature_agrees_with_closed_forms() {
        for m in catalog() {
            for &p in &[0.0, 0.3, 0.9, 1.0, 1.6, 2.0, 3.0] {
                for &(lo, hi) in &[(0.0, 1.0), (1.0, f64::INFINITY), (0.25, 2.0)] {
                    let exact = m.moment_between(p, lo, hi);
                    let quad = m.moment_between_quadrature(p, lo, hi);
                    if exact.is_infinite() {
                        assert!(quad.is_infinite(), "{m:?} p={p} [{lo},{hi}] quad={quad}");
                    } else {
                        assert_relative_eq!(exact, quad, max_relative = 1e-8, epsilon = 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn levy_integrability_for_every_catalog_kernel() {
        for m in catalog() {
            let f = FrozenKernel {
                measure: m,
                dilation: 1.0,
                rho: 1.0,
            };
            assert!(f.levy_integral().is_finite(), "{m:?}");
        }
    }

    #[test]
    fn gaussian_signed_first_moment_matches_quadrature() {
        let m = Measure::Poisson {
            rate: 1.0,
            law: JumpLaw::Gaussian { mu: 0.4, sigma: 1.1 },
        };
        let cfg = QuadConfig::default();
        let dens = |z: f64| normal_pdf((z - 0.4) / 1.1) / 1.1;
        let q = integrate(|z| z * dens(z), -1.0, 1.0, &cfg).value;
        assert_relative_eq!(m.signed_first_between(0.0, 1.0), q, max_relative = 1e-10);
        let full = m.signed_first_between(0.0, f64::INFINITY);
        assert_relative_eq!(full, 0.4, max_relative = 1e-12);
    }

    #[test]
    fn dilation_rescales_moments() {
        let base = Measure::Stable {
            alpha: 1.3,
            c: 1.0,
            truncate: f64::INFINITY,
        };
        let k = FrozenKernel {
            measure: base,
            dilation: -2.0,
            rho: 1.0,
        };
        // ∫_{|y|≤1} |y|^2 of the image of c|z|^{-2.3} under z ↦ 2z equals 2^{1.3}·2c/(0.7)
        assert_relative_eq!(k.inner(2.0), 2f64.powf(1.3) * 2.0 / 0.7, max_relative = 1e-13);
    }

    #[test]
    fn modulated_alpha_outside_range_is_rejected() {
        let k = JumpKernel::stable(1.0, StableScale::UNIT_SYMBOL)
            .with_modulation("alpha", Expr::sinusoidal(1.5, 0.6, 1.0, 0.0));
        assert!(matches!(k.validate(), Err(Error::ParameterDomain(_))));
        let k = JumpKernel::stable(1.0, StableScale::UNIT_SYMBOL).with_modulation("lambda", Expr::constant(1.0));
        assert!(k.validate().is_err());
    }

    proptest! {
        #[test]
        fn outer_grows_and_inner_shrinks_in_p(idx in 0usize..8, p in 0.0..3.0f64, dp in 0.0..1.0f64) {
            let m = catalog()[idx];
            let f = FrozenKernel { measure: m, dilation: 1.0, rho: 1.0 };
            let (o1, o2) = (f.outer(p), f.outer(p + dp));
            let (i1, i2) = (f.inner(p), f.inner(p + dp));
            // on |y| > 1, |y|^p grows with p; on |y| ≤ 1 it shrinks
            prop_assert!(o2 >= o1 * (1.0 - 1e-12));
            prop_assert!(i2 <= i1 * (1.0 + 1e-12) || i1.is_infinite());
        }
    }
}
