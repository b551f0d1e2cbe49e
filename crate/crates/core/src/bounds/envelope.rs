use crate::error::{Error, Result};
use crate::triplet::{coefficient_sups, CoefficientSups, ProcessSpec};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Envelope families for `E^x sup_{s≤t} |X_s − x|^κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Bounded variation jumps, `β ∈ [0, α]`, `α ∈ (0, 1]`.
    BvSmallBeta,
    /// Bounded variation jumps, `β ∈ [α, 1]`, `α ∈ (0, 1]`.
    BvMidBeta,
    /// Compensated small jumps, `β ∈ [1, 2]`, `α ∈ (0, 1]`.
    PureJump,
    /// `α, β ∈ [1, 2]`, `κ ≤ α ∧ β`.
    Martingale,
    /// `α > 2`, `β ∈ [1, 2]`.
    MartingaleHeavy,
    /// Small-time growth of the symbol at `∞`, `t ≤ 1`.
    SymbolGrowthSmallTime,
    /// Large-time growth of the symbol at `0`, `t ≥ 1`.
    SymbolGrowthLargeTime,
}

impl Regime {
    pub const ALL: [Regime; 7] = [
        Regime::BvSmallBeta,
        Regime::BvMidBeta,
        Regime::PureJump,
        Regime::Martingale,
        Regime::MartingaleHeavy,
        Regime::SymbolGrowthSmallTime,
        Regime::SymbolGrowthLargeTime,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::BvSmallBeta => "bv_small_beta",
            Regime::BvMidBeta => "bv_mid_beta",
            Regime::PureJump => "pure_jump",
            Regime::Martingale => "martingale",
            Regime::MartingaleHeavy => "martingale_heavy",
            Regime::SymbolGrowthSmallTime => "symbol_growth_small_time",
            Regime::SymbolGrowthLargeTime => "symbol_growth_large_time",
        }
    }

    /// Leading powers of `t` in the envelope.
    pub fn table_exponent(&self) -> &'static str {
        match self {
            Regime::BvSmallBeta => "t^{κ/α}",
            Regime::BvMidBeta | Regime::PureJump => "t^{κ/α}+t^{κ/β}",
            Regime::Martingale => "t^{κ/α}+t^{κ/β} (κ ≤ α∧β)",
            Regime::MartingaleHeavy => "t^{κ/α}+t^{κ/2}",
            Regime::SymbolGrowthSmallTime => "t^{κ/α∧1} (log-corrected at κ=α: t|log t|)",
            Regime::SymbolGrowthLargeTime => "t^{κ/β}",
        }
    }

    /// Whether the envelope is stated for bounded-coefficient processes with moment sups.
    pub fn uses_coefficient_sups(&self) -> bool {
        !matches!(self, Regime::SymbolGrowthSmallTime | Regime::SymbolGrowthLargeTime)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == norm)
            .ok_or_else(|| Error::domain(format!("unknown regime `{s}`")))
    }
}

/// Which drift enters the `t^κ|b|^κ` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftConvention {
    /// `b` with `|y| ≤ 1` compensation.
    Standard,
    /// `b − ∫_{|y|≤1} y N`, the drift of the uncompensated jump sum.
    BoundedVariation,
    /// `b + ∫_{|y|>1} y N`, the drift of the fully compensated jump part.
    Martingale,
}

/// One summand `C · coefficient · t^{exponent}` (times `|log t|` when flagged).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeTerm {
    pub label: String,
    pub t_exponent: f64,
    /// The sup raised to its power, e.g. `M2(α)^{κ/α}`.
    pub coefficient: f64,
    /// Carries an unspecified multiplicative constant.
    pub symbolic: bool,
    pub log_factor: bool,
    /// The term at `t` with any symbolic constant set to 1.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeBound {
    pub regime: Regime,
    pub kappa: f64,
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub exponent: String,
    /// Distinct powers of `t`, in term order.
    pub exponents: Vec<f64>,
    pub terms: Vec<EnvelopeTerm>,
    /// Sum of the explicit terms.
    pub value: f64,
    /// Sum of all terms with symbolic constants set to 1.
    pub shape: f64,
    /// Sum of the explicit coefficients.
    pub explicit_constant: f64,
    pub symbolic_constant: bool,
    pub kappa_range: (f64, f64),
    pub kappa_upper_open: bool,
    pub t_range: (f64, f64),
    pub drift_convention: Option<DriftConvention>,
}

/// `(t·c)^r`, exact at `r = 1` and zero for `c = 0`, `r > 0`.
fn scaled_power(t: f64, c: f64, r: f64) -> f64 {
    if r == 0.0 {
        1.0
    } else {
        (t * c).powf(r)
    }
}

fn inapplicable(regime: Regime, reason: impl Into<String>) -> Error {
    Error::RegimeInapplicable {
        regime: regime.name().into(),
        reason: reason.into(),
    }
}

fn require_finite(regime: Regime, value: f64, integral: &str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(inapplicable(regime, format!("{integral} = ∞")))
    }
}

fn require_in(regime: Regime, name: &str, v: f64, lo: f64, hi: f64, lo_open: bool) -> Result<()> {
    let ok = if lo_open { v > lo } else { v >= lo } && v <= hi;
    if ok {
        Ok(())
    } else {
        let l = if lo_open { "(" } else { "[" };
        Err(inapplicable(regime, format!("{name} = {v} outside {l}{lo}, {hi}]")))
    }
}

struct Builder {
    kappa: f64,
    t: f64,
    terms: Vec<EnvelopeTerm>,
}

impl Builder {
    /// Adds `t^{κ/p} · sup^{κ/p}`.
    fn term(&mut self, label: &str, sup: f64, p: f64, symbolic: bool) {
        let r = self.kappa / p;
        let coefficient = if r == 0.0 { 1.0 } else { sup.powf(r) };
        self.terms.push(EnvelopeTerm {
            label: label.into(),
            t_exponent: r,
            coefficient,
            symbolic,
            log_factor: false,
            value: scaled_power(self.t, sup, r),
        });
    }
}

/// Evaluates the envelope of `regime` at `(κ, t)` from precomputed coefficient suprema.
///
/// `sups.alpha` and `sups.beta` are the outer and inner moment orders. For the symbol-growth
/// regimes they are read as the growth indices at `∞` and `0`, respectively.
pub fn envelope(
    spec: &ProcessSpec,
    regime: Regime,
    kappa: f64,
    t: f64,
    sups: &CoefficientSups,
) -> Result<EnvelopeBound> {
    let (alpha, beta) = (sups.alpha, sups.beta);
    if !(t >= 0.0) || t.is_infinite() {
        return Err(Error::domain(format!("time must be finite and nonnegative, got {t}")));
    }
    if regime.uses_coefficient_sups() {
        require_finite(regime, sups.m1, "sup (|b| + |Q| + ∫(|y|²∧1) N)")?;
    }

    let (khi, open) = match regime {
        Regime::BvSmallBeta | Regime::BvMidBeta | Regime::PureJump | Regime::MartingaleHeavy => (alpha, false),
        Regime::Martingale => (alpha.min(beta), false),
        Regime::SymbolGrowthSmallTime | Regime::SymbolGrowthLargeTime => (beta, true),
    };
    let in_range = kappa >= 0.0
        && if open {
            kappa < khi || kappa == 0.0
        } else {
            kappa <= khi
        };
    if !in_range {
        return Err(Error::KappaOutOfRange {
            kappa,
            lo: 0.0,
            hi: khi,
        });
    }

    let t_range = match regime {
        Regime::SymbolGrowthSmallTime => (0.0, 1.0),
        Regime::SymbolGrowthLargeTime => (1.0, f64::INFINITY),
        _ => (0.0, f64::INFINITY),
    };
    if t < t_range.0 || t > t_range.1 {
        return Err(Error::domain(format!(
            "t = {t} outside [{}, {}] for {regime}",
            t_range.0, t_range.1
        )));
    }

    let mut b = Builder {
        kappa,
        t,
        terms: Vec::new(),
    };
    let inner_name = format!("sup ∫_{{|y|≤1}} |y|^{beta} N");
    let outer_name = format!("sup ∫_{{|y|>1}} |y|^{alpha} N");
    let drift_convention = match regime {
        Regime::BvSmallBeta => {
            require_in(regime, "α", alpha, 0.0, 1.0, true)?;
            require_in(regime, "β", beta, 0.0, alpha, false)?;
            require_finite(regime, sups.m2, &outer_name)?;
            require_finite(regime, sups.inner_beta, &inner_name)?;
            require_finite(regime, sups.all_alpha, &format!("sup ∫ |y|^{alpha} N"))?;
            require_finite(regime, sups.drift_bv, "sup |b − ∫_{|y|≤1} y N|")?;
            b.term("drift", sups.drift_bv, 1.0, false);
            b.term("diffusion", sups.diffusion, 2.0, true);
            b.term("jumps", sups.all_alpha, alpha, false);
            Some(DriftConvention::BoundedVariation)
        }
        Regime::BvMidBeta => {
            require_in(regime, "α", alpha, 0.0, 1.0, true)?;
            require_in(regime, "β", beta, alpha, 1.0, false)?;
            require_finite(regime, sups.m2, &outer_name)?;
            require_finite(regime, sups.inner_beta, &inner_name)?;
            require_finite(regime, sups.drift_bv, "sup |b − ∫_{|y|≤1} y N|")?;
            b.term("drift", sups.drift_bv, 1.0, false);
            b.term("diffusion", sups.diffusion, 2.0, true);
            b.term("small jumps", sups.inner_beta, beta, false);
            b.term("large jumps", sups.m2, alpha, false);
            Some(DriftConvention::BoundedVariation)
        }
        Regime::PureJump => {
            require_in(regime, "α", alpha, 0.0, 1.0, true)?;
            require_in(regime, "β", beta, 1.0, 2.0, false)?;
            require_finite(regime, sups.m2, &outer_name)?;
            require_finite(regime, sups.inner_beta, &inner_name)?;
            b.term("drift", sups.drift, 1.0, false);
            b.term("diffusion", sups.diffusion, 2.0, true);
            b.term("small jumps", sups.inner_beta, beta, true);
            b.term("large jumps", sups.m2, alpha, false);
            Some(DriftConvention::Standard)
        }
        Regime::Martingale => {
            require_in(regime, "α", alpha, 1.0, 2.0, false)?;
            require_in(regime, "β", beta, 1.0, 2.0, false)?;
            require_finite(regime, sups.m2, &outer_name)?;
            require_finite(regime, sups.inner_beta, &inner_name)?;
            b.term("drift", sups.drift_martingale, 1.0, true);
            b.term("diffusion", sups.diffusion, 2.0, true);
            b.term("small jumps", sups.inner_beta, beta, true);
            b.term("large jumps", sups.m2, alpha, true);
            Some(DriftConvention::Martingale)
        }
        Regime::MartingaleHeavy => {
            if !(alpha > 2.0) {
                return Err(inapplicable(regime, format!("α = {alpha} must exceed 2")));
            }
            require_in(regime, "β", beta, 1.0, 2.0, false)?;
            require_finite(regime, sups.m2, &outer_name)?;
            require_finite(regime, sups.inner_beta, &inner_name)?;
            require_finite(regime, sups.all_alpha, &format!("sup ∫ |y|^{alpha} N"))?;
            let second = coefficient_sups(spec, sups.region, 2.0, 2.0)?.all_alpha;
            require_finite(regime, second, "sup ∫ |y|^2 N")?;
            b.term("drift", sups.drift_martingale, 1.0, true);
            b.term("diffusion", sups.diffusion, 2.0, true);
            b.term("jumps", sups.all_alpha, alpha, true);
            b.term("second moment", second, 2.0, true);
            Some(DriftConvention::Martingale)
        }
        Regime::SymbolGrowthSmallTime => {
            require_in(regime, "α", alpha, 0.0, 2.0, true)?;
            let boundary = (kappa - alpha).abs() <= super::BOUNDARY_TOLERANCE && kappa > 0.0;
            let (e, log_factor) = if boundary {
                (1.0, true)
            } else {
                ((kappa / alpha).min(1.0), false)
            };
            let value = if kappa == 0.0 {
                1.0
            } else if log_factor {
                t * t.ln().abs()
            } else {
                t.powf(e)
            };
            b.terms.push(EnvelopeTerm {
                label: "symbol growth at ∞".into(),
                t_exponent: if kappa == 0.0 { 0.0 } else { e },
                coefficient: 1.0,
                symbolic: true,
                log_factor,
                value,
            });
            None
        }
        Regime::SymbolGrowthLargeTime => {
            require_in(regime, "β", beta, 0.0, 2.0, true)?;
            b.terms.push(EnvelopeTerm {
                label: "symbol growth at 0".into(),
                t_exponent: kappa / beta,
                coefficient: 1.0,
                symbolic: true,
                log_factor: false,
                value: if kappa == 0.0 { 1.0 } else { t.powf(kappa / beta) },
            });
            None
        }
    };

    let terms = b.terms;
    let mut exponents: Vec<f64> = Vec::new();
    for term in &terms {
        if !exponents.contains(&term.t_exponent) {
            exponents.push(term.t_exponent);
        }
    }
    let explicit: Vec<&EnvelopeTerm> = terms.iter().filter(|t| !t.symbolic).collect();
    let (value, shape) = if kappa == 0.0 {
        (1.0, 1.0)
    } else {
        (
            explicit.iter().map(|t| t.value).sum(),
            terms.iter().map(|t| t.value).sum(),
        )
    };
    Ok(EnvelopeBound {
        regime,
        kappa,
        t,
        alpha,
        beta,
        exponent: regime.table_exponent().into(),
        exponents,
        value,
        shape,
        explicit_constant: explicit.iter().map(|t| t.coefficient).sum(),
        // a symbolic term with a zero coefficient (e.g. no diffusion) leaves the bound explicit
        symbolic_constant: terms.iter().any(|t| t.symbolic && t.coefficient != 0.0),
        terms,
        kappa_range: (0.0, khi),
        kappa_upper_open: open,
        t_range,
        drift_convention,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triplet::{JumpKernel, JumpLaw, Region, StableScale};

    fn cp_bv() -> ProcessSpec {
        ProcessSpec::levy(JumpKernel::compound_poisson(2.0, JumpLaw::TwoPoint { a: 3.0 }))
    }

    #[test]
    fn table_entries_match_reference() {
        let reference = [
            ("bv_small_beta", "t^{κ/α}"),
            ("bv_mid_beta", "t^{κ/α}+t^{κ/β}"),
            ("pure_jump", "t^{κ/α}+t^{κ/β}"),
            ("martingale", "t^{κ/α}+t^{κ/β} (κ ≤ α∧β)"),
            ("martingale_heavy", "t^{κ/α}+t^{κ/2}"),
            ("symbol_growth_small_time", "t^{κ/α∧1} (log-corrected at κ=α: t|log t|)"),
            ("symbol_growth_large_time", "t^{κ/β}"),
        ];
        for (name, expected) in reference {
            let r: Regime = name.parse().unwrap();
            assert_eq!(r.table_exponent(), expected);
            assert_eq!(r.to_string(), name);
        }
    }

    #[test]
    fn explicit_endpoint_is_t_times_m() {
        // ∫|y|^{1/2} N = 2·√3 for rate 2 at ±3
        let spec = cp_bv();
        let sups = coefficient_sups(&spec, Region::All, 0.5, 0.5).unwrap();
        let m = 2.0 * 3f64.sqrt();
        for t in [0.01, 0.25, 1.0, 3.0] {
            let e = envelope(&spec, Regime::BvSmallBeta, 0.5, t, &sups).unwrap();
            assert!(
                (e.value - t * m).abs() < 1e-12 * t * m,
                "t={t}: {} vs {}",
                e.value,
                t * m
            );
            assert_eq!(e.exponents, vec![0.5, 0.25, 1.0]);
            assert!(!e.symbolic_constant);
        }
    }

    #[test]
    fn kappa_zero_is_one() {
        let spec = cp_bv();
        let sups = coefficient_sups(&spec, Region::All, 0.5, 0.5).unwrap();
        for r in [Regime::BvSmallBeta, Regime::SymbolGrowthSmallTime] {
            let t = 0.5;
            assert_eq!(envelope(&spec, r, 0.0, t, &sups).unwrap().value, 1.0);
        }
    }

    #[test]
    fn kappa_above_alpha_is_rejected() {
        let spec = cp_bv();
        let sups = coefficient_sups(&spec, Region::All, 0.5, 0.5).unwrap();
        let err = envelope(&spec, Regime::BvSmallBeta, 0.7, 1.0, &sups).unwrap_err();
        assert!(err.to_string().starts_with("kappa out of range [0,0.5]"), "{err}");
    }

    #[test]
    fn heavy_tail_makes_regime_inapplicable() {
        let spec = ProcessSpec::levy(JumpKernel::stable(0.8, StableScale::UNIT_SYMBOL));
        let sups = coefficient_sups(&spec, Region::All, 0.9, 0.9).unwrap();
        let err = envelope(&spec, Regime::BvSmallBeta, 0.5, 1.0, &sups).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("inapplicable") && msg.contains("|y|>1"), "{msg}");
    }

    #[test]
    fn monotone_in_t_and_constants() {
        let spec = cp_bv();
        let sups = coefficient_sups(&spec, Region::All, 1.0, 1.0).unwrap();
        let mut prev = 0.0;
        for i in 0..20 {
            let t = 0.1 * i as f64;
            let v = envelope(&spec, Regime::BvMidBeta, 0.7, t, &sups).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
        let mut bigger = sups.clone();
        bigger.m2 *= 2.0;
        let a = envelope(&spec, Regime::BvMidBeta, 0.7, 1.0, &sups).unwrap().value;
        let b = envelope(&spec, Regime::BvMidBeta, 0.7, 1.0, &bigger).unwrap().value;
        assert!(b > a);
    }

    #[test]
    fn symbol_growth_boundary_uses_log_form() {
        let spec = ProcessSpec::levy(JumpKernel::stable(1.5, StableScale::UNIT_SYMBOL));
        let mut sups = coefficient_sups(&spec, Region::All, 1.0, 1.0).unwrap();
        sups.alpha = 1.5;
        sups.beta = 1.5;
        let e = envelope(&spec, Regime::SymbolGrowthSmallTime, 0.5, 0.25, &sups).unwrap();
        assert!(e.symbolic_constant && e.value == 0.0);
        assert!((e.exponents[0] - 1.0 / 3.0).abs() < 1e-15);
        let b = envelope(&spec, Regime::SymbolGrowthSmallTime, 1.49, 0.25, &sups).unwrap();
        assert!(b.terms[0].log_factor && b.exponents[0] == 1.0);
        assert!((b.shape - 0.25 * 4f64.ln()).abs() < 1e-15);
    }
}
