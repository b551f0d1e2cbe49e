use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::E;
use std::str::FromStr;

/// The closed catalog of moment functions.
///
/// | function            | submultiplicative constant | comparable C² majorant        |
/// |---------------------|----------------------------|-------------------------------|
/// | `1`                 | 1                          | itself                        |
/// | `\|x\|^p ∨ 1`       | `2^p`                      | `(1 + x²)^{p/2}`              |
/// | `exp(\|x\|^β)`      | 1                          | `exp((1 + x²)^{β/2})`         |
/// | `log(\|x\| ∨ e)`    | 2                          | `log(e + x²)`                 |
/// | `exp(ζx)`           | 1                          | itself                        |
///
/// `|x|^p` has the same tail as `|x|^p ∨ 1` and is accepted for tail questions.
/// `exp(x²)` is not submultiplicative and serves as a negative control for condition checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MomentFunction {
    One,
    Power { p: f64 },
    PowerOrOne { p: f64 },
    ExpPower { beta: f64 },
    LogOrE,
    Exponential { zeta: f64 },
    ExpSquare,
}

impl MomentFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MomentFunction::Power { p } | MomentFunction::PowerOrOne { p } if !(p >= 0.0 && p.is_finite()) => {
                Err(Error::domain(format!("power must be finite and nonnegative, got {p}")))
            }
            MomentFunction::ExpPower { beta } if !(beta > 0.0 && beta <= 1.0) => {
                Err(Error::domain(format!("exp(|x|^β) needs β ∈ (0, 1], got {beta}")))
            }
            MomentFunction::Exponential { zeta } if !zeta.is_finite() => {
                Err(Error::domain(format!("exp(ζx) needs finite ζ, got {zeta}")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            MomentFunction::One => 1.0,
            MomentFunction::Power { p } => x.abs().powf(p),
            MomentFunction::PowerOrOne { p } => x.abs().powf(p).max(1.0),
            MomentFunction::ExpPower { beta } => x.abs().powf(beta).exp(),
            MomentFunction::LogOrE => x.abs().max(E).ln(),
            MomentFunction::Exponential { zeta } => (zeta * x).exp(),
            MomentFunction::ExpSquare => (x * x).exp(),
        }
    }

    /// `ln f(x)`, finite wherever `f` is positive even if `f(x)` overflows.
    pub fn ln_eval(&self, x: f64) -> f64 {
        match *self {
            MomentFunction::One => 0.0,
            MomentFunction::Power { p } => p * x.abs().ln(),
            MomentFunction::PowerOrOne { p } => (p * x.abs().ln()).max(0.0),
            MomentFunction::ExpPower { beta } => x.abs().powf(beta),
            MomentFunction::LogOrE => x.abs().max(E).ln().ln(),
            MomentFunction::Exponential { zeta } => zeta * x,
            MomentFunction::ExpSquare => x * x,
        }
    }

    /// Derivative where it exists; one-sided at kinks, `∞` at cusps.
    pub fn derivative(&self, x: f64) -> f64 {
        let sgn = if x > 0.0 {
            1.0
        } else if x < 0.0 {
            -1.0
        } else {
            0.0
        };
        let a = x.abs();
        match *self {
            MomentFunction::One => 0.0,
            MomentFunction::Power { p } => {
                if a == 0.0 {
                    if p < 1.0 {
                        f64::INFINITY
                    } else if p == 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    sgn * p * a.powf(p - 1.0)
                }
            }
            MomentFunction::PowerOrOne { p } => {
                if a > 1.0 {
                    sgn * p * a.powf(p - 1.0)
                } else {
                    0.0
                }
            }
            MomentFunction::ExpPower { beta } => {
                if a == 0.0 {
                    if beta < 1.0 {
                        f64::INFINITY
                    } else {
                        1.0
                    }
                } else {
                    sgn * beta * a.powf(beta - 1.0) * self.eval(x)
                }
            }
            MomentFunction::LogOrE => {
                if a > E {
                    1.0 / x
                } else {
                    0.0
                }
            }
            MomentFunction::Exponential { zeta } => zeta * self.eval(x),
            MomentFunction::ExpSquare => 2.0 * x * self.eval(x),
        }
    }

    /// Whether the function belongs to the moment-existence catalog.
    pub fn in_existence_catalog(&self) -> bool {
        !matches!(self, MomentFunction::ExpSquare)
    }

    /// `c` with `f(x + y) ≤ c f(x) f(y)` (None when no such constant exists).
    pub fn submultiplicative_constant(&self) -> Option<f64> {
        match *self {
            MomentFunction::One | MomentFunction::ExpPower { .. } | MomentFunction::Exponential { .. } => Some(1.0),
            MomentFunction::PowerOrOne { p } => Some(2f64.powf(p)),
            MomentFunction::LogOrE => Some(2.0),
            MomentFunction::Power { .. } | MomentFunction::ExpSquare => None,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            MomentFunction::One => "1".into(),
            MomentFunction::Power { p } => format!("|y|^{p}"),
            MomentFunction::PowerOrOne { p } => format!("|y|^{p}∨1"),
            MomentFunction::ExpPower { beta } => format!("exp(|y|^{beta})"),
            MomentFunction::LogOrE => "log(|y|∨e)".into(),
            MomentFunction::Exponential { zeta } => format!("exp({zeta}y)"),
            MomentFunction::ExpSquare => "exp(y²)".into(),
        }
    }
}

/// Accepts `one`, `power:p`, `power-or-one:p`, `exp-power:β`, `log-or-e`, `exponential:ζ`,
/// `exp-square`, or the JSON form.
impl FromStr for MomentFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            let f: MomentFunction = serde_json::from_str(s)?;
            f.validate()?;
            return Ok(f);
        }
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let param = || -> Result<f64> {
            arg.ok_or_else(|| Error::domain(format!("`{name}` needs a parameter, as in `{name}:1`")))?
                .trim()
                .parse()
                .map_err(|e| Error::domain(format!("bad parameter in `{s}`: {e}")))
        };
        let f = match name.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "one" => MomentFunction::One,
            "power" => MomentFunction::Power { p: param()? },
            "power-or-one" => MomentFunction::PowerOrOne { p: param()? },
            "exp-power" => MomentFunction::ExpPower { beta: param()? },
            "log-or-e" => MomentFunction::LogOrE,
            "exponential" => MomentFunction::Exponential { zeta: param()? },
            "exp-square" => MomentFunction::ExpSquare,
            _ => return Err(Error::domain(format!("unknown moment function `{s}`"))),
        };
        f.validate()?;
        Ok(f)
    }
}
