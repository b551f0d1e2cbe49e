use super::expr::{Expr, Region};
use super::kernel::{Compensation, Family, FrozenKernel, JumpKernel, Measure};
use super::sups::coefficient_sups;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Drift {
    Constant {
        value: f64,
    },
    /// `intercept + slope·x`
    Linear {
        intercept: f64,
        slope: f64,
    },
    Bounded {
        expr: Expr,
    },
}

impl Default for Drift {
    fn default() -> Self {
        Drift::Constant { value: 0.0 }
    }
}

impl Drift {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Drift::Constant { value } => value,
            Drift::Linear { intercept, slope } => intercept + slope * x,
            Drift::Bounded { expr } => expr.eval(x),
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            Drift::Constant { .. } => true,
            Drift::Linear { slope, .. } => slope == 0.0,
            Drift::Bounded { expr } => expr.is_constant(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.is_constant() && self.eval(0.0) == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Diffusion {
    Constant {
        value: f64,
    },
    /// `Q(x) = sigma2·x²` (geometric Brownian motion)
    ScaledSquare {
        sigma2: f64,
    },
    Bounded {
        expr: Expr,
    },
}

impl Default for Diffusion {
    fn default() -> Self {
        Diffusion::Constant { value: 0.0 }
    }
}

impl Diffusion {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Diffusion::Constant { value } => value,
            Diffusion::ScaledSquare { sigma2 } => sigma2 * x * x,
            Diffusion::Bounded { expr } => expr.eval(x),
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            Diffusion::Constant { .. } => true,
            Diffusion::ScaledSquare { sigma2 } => sigma2 == 0.0,
            Diffusion::Bounded { expr } => expr.is_constant(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.is_constant() && self.eval(0.0) == 0.0
    }

    fn min_on(&self, region: Region) -> f64 {
        match *self {
            Diffusion::Constant { value } => value,
            Diffusion::ScaledSquare { sigma2 } if sigma2 >= 0.0 => 0.0,
            Diffusion::ScaledSquare { sigma2 } => match region {
                Region::Interval { lo, hi } => sigma2 * lo.abs().max(hi.abs()).powi(2),
                Region::All => f64::NEG_INFINITY,
            },
            Diffusion::Bounded { expr } => expr.range_on(region).0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Flags {
    #[serde(default)]
    pub bounded_coefficients: bool,
    #[serde(default)]
    pub martingale_type: bool,
    #[serde(default)]
    pub pure_jump: bool,
}

/// A state-dependent Lévy triplet `(b(x), Q(x), N(x, dy))` in one dimension.
///
/// With `sde_multiplier = f` the triplet describes `dX = f(X-) dL`, where `L` is the Lévy
/// process with the (then constant) drift, diffusion and kernel: `q(x, ξ) = ψ_L(f(x)ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub drift: Drift,
    #[serde(default)]
    pub diffusion: Diffusion,
    pub kernel: JumpKernel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sde_multiplier: Option<Expr>,
    #[serde(default)]
    pub flags: Flags,
}

impl ProcessSpec {
    pub fn new(drift: Drift, diffusion: Diffusion, kernel: JumpKernel) -> Self {
        ProcessSpec {
            name: None,
            drift,
            diffusion,
            kernel,
            sde_multiplier: None,
            flags: Flags::default(),
        }
    }

    pub fn brownian(q: f64) -> Self {
        Self::new(Drift::default(), Diffusion::Constant { value: q }, JumpKernel::none())
    }

    pub fn levy(kernel: JumpKernel) -> Self {
        Self::new(Drift::default(), Diffusion::default(), kernel)
    }

    pub fn gbm(mu: f64, sigma: f64) -> Self {
        Self::new(
            Drift::Linear {
                intercept: 0.0,
                slope: mu,
            },
            Diffusion::ScaledSquare { sigma2: sigma * sigma },
            JumpKernel::none(),
        )
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn with_flags(mut self, flags: Flags) -> Self {
        self.flags = flags;
        self
    }

    pub fn with_multiplier(mut self, f: Expr) -> Self {
        self.sde_multiplier = Some(f);
        self
    }

    fn multiplier(&self, x: f64) -> f64 {
        self.sde_multiplier.map_or(1.0, |f| f.eval(x))
    }

    pub fn drift_at(&self, x: f64) -> f64 {
        self.multiplier(x) * self.drift.eval(x)
    }

    pub fn diffusion_at(&self, x: f64) -> f64 {
        let m = self.multiplier(x);
        m * m * self.diffusion.eval(x)
    }

    pub fn kernel_at(&self, x: f64) -> Result<FrozenKernel> {
        let mut k = self.kernel.freeze(x)?;
        k.dilation = self.multiplier(x);
        Ok(k)
    }

    /// Whether the triplet does not depend on the state (a Lévy process).
    pub fn is_state_independent(&self) -> bool {
        self.drift.is_constant()
            && self.diffusion.is_constant()
            && self.kernel.is_state_independent()
            && self.sde_multiplier.is_none_or(|f| f.is_constant())
    }

    pub fn has_jumps(&self) -> bool {
        !matches!(self.kernel.family, Family::None)
    }

    /// Checks parameter ranges, conventions and the declared flags.
    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if self.diffusion.min_on(Region::All) < 0.0 {
            return Err(Error::InvalidSpec(
                "diffusion Q(x) must be nonnegative for all x".into(),
            ));
        }
        if self.sde_multiplier.is_some() && !(self.drift.is_constant() && self.diffusion.is_constant()) {
            return Err(Error::InvalidSpec(
                "sde_multiplier requires a constant driver drift and diffusion".into(),
            ));
        }
        if let Some(f) = self.sde_multiplier {
            let (lo, hi) = f.range_on(Region::All);
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidSpec("sde_multiplier must be finite".into()));
            }
        }
        let alpha = self.kernel.alpha_range(Region::All);
        let truncated = matches!(
            self.kernel.family,
            Family::SymmetricStable { truncate: Some(_), .. } | Family::TemperedStable { .. }
        );
        match self.kernel.compensation {
            Compensation::Full => {
                if let Some((lo, _)) = alpha {
                    if lo <= 1.0 && !truncated {
                        return Err(Error::InvalidSpec(format!(
                            "full compensation needs ∫_{{|y|>1}}|y| N(x,dy) < ∞, but alpha reaches {lo} ≤ 1"
                        )));
                    }
                }
            }
            Compensation::None => {
                if let Some((_, hi)) = alpha {
                    if hi >= 1.0 {
                        return Err(Error::InvalidSpec(format!(
                            "no compensation needs ∫_{{|y|≤1}}|y| N(x,dy) < ∞, but alpha reaches {hi} ≥ 1"
                        )));
                    }
                }
            }
            Compensation::Truncated => {}
        }
        let f = self.flags;
        if f.pure_jump && !(self.drift.is_zero() && self.diffusion.is_zero()) {
            return Err(Error::InvalidSpec("pure_jump flag requires b ≡ 0 and Q ≡ 0".into()));
        }
        if f.martingale_type {
            if !(self.drift.is_zero() && self.diffusion.is_zero()) {
                return Err(Error::InvalidSpec(
                    "martingale_type flag requires b ≡ 0 and Q ≡ 0".into(),
                ));
            }
            if self.has_jumps() && self.kernel.compensation != Compensation::Full {
                return Err(Error::InvalidSpec(
                    "martingale_type flag requires full compensation".into(),
                ));
            }
        }
        if f.bounded_coefficients {
            let sups = coefficient_sups(self, Region::All, 1.0, 2.0)?;
            if !sups.m1.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "bounded_coefficients flag set but sup_x(|b|+|Q|+∫(|y|²∧1)N) = ∞ (witness {:?})",
                    sups.witness.map(|w| w.points)
                )));
            }
        }
        Ok(())
    }

    /// Parses and validates a JSON spec; schema errors name the field path and line.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: ProcessSpec = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            // serde_json already appends the line and column
            message: e.into_inner().to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization is infallible")
    }

    /// Compact serialization used for hashing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialization is infallible")
    }

    /// Measure frozen at `x`, in driver coordinates.
    pub fn measure_at(&self, x: f64) -> Result<Measure> {
        self.kernel.measure_at(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triplet::kernel::{JumpLaw, StableScale};

    fn stable_like() -> ProcessSpec {
        ProcessSpec::levy(
            JumpKernel::stable(1.2, StableScale::UNIT_SYMBOL)
                .with_modulation("alpha", Expr::sinusoidal(1.2, 0.3, 1.0, 0.0)),
        )
        .named("stable-like")
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let specs = vec![
            stable_like(),
            ProcessSpec::gbm(0.1, 0.3),
            ProcessSpec::levy(
                JumpKernel::compound_poisson(2.0, JumpLaw::TwoPoint { a: 3.0 }).with_compensation(Compensation::Full),
            ),
            ProcessSpec::levy(JumpKernel::tempered(0.7, StableScale::Density(0.1 + 0.2), 1.0 / 3.0)).with_multiplier(
                Expr::AffineClamped {
                    intercept: 0.5,
                    slope: 0.25,
                    min: 0.2,
                    max: 2.0,
                },
            ),
        ];
        for spec in specs {
            let text = spec.to_json_pretty();
            let back = ProcessSpec::from_json_str(&text).unwrap();
            assert_eq!(back, spec);
            assert_eq!(back.to_json_pretty(), text);
        }
    }

    #[test]
    fn schema_errors_name_the_field() {
        let text = r#"{
  "drift": {"type": "constant", "value": 0.0},
  "kernel": {"family": "symmetric_stable", "params": {"alpha": "one", "scale": 1.0}}
}"#;
        match ProcessSpec::from_json_str(text) {
            Err(Error::Schema { path, message }) => {
                assert!(path.contains("kernel"), "{path}");
                assert!(message.contains("line 3"), "{message}");
            }
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn flag_checks() {
        let mut s = ProcessSpec::gbm(0.0, 1.0);
        s.flags.bounded_coefficients = true;
        assert!(s.validate().is_err());
        let mut s = ProcessSpec::brownian(1.0);
        s.flags.pure_jump = true;
        assert!(s.validate().is_err());
        let mut s = ProcessSpec::levy(JumpKernel::compound_poisson(1.0, JumpLaw::TwoPoint { a: 1.0 }));
        s.flags.martingale_type = true;
        assert!(s.validate().is_err());
        s.kernel.compensation = Compensation::Full;
        s.flags.bounded_coefficients = true;
        s.validate().unwrap();
        let s =
            ProcessSpec::levy(JumpKernel::stable(0.9, StableScale::Density(1.0)).with_compensation(Compensation::Full));
        assert!(s.validate().is_err());
        let s =
            ProcessSpec::levy(JumpKernel::stable(1.1, StableScale::Density(1.0)).with_compensation(Compensation::None));
        assert!(s.validate().is_err());
    }
}
