use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// State region over which suprema are taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Region {
    All,
    Interval { lo: f64, hi: f64 },
}

impl Region {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Region::Interval { lo, hi }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Region::Interval { .. })
    }

    /// Bounds used for grid searches; unbounded regions are searched on `[-50, 50]`.
    pub fn search_bounds(&self) -> (f64, f64) {
        match *self {
            Region::All => (-50.0, 50.0),
            Region::Interval { lo, hi } => (lo, hi),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Region::All => x.is_finite(),
            Region::Interval { lo, hi } => lo <= x && x <= hi,
        }
    }
}

/// Closed-form state functions used for modulated parameters and bounded coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Expr {
    Constant {
        value: f64,
    },
    /// `clamp(intercept + slope·x, min, max)`
    AffineClamped {
        intercept: f64,
        slope: f64,
        min: f64,
        max: f64,
    },
    /// `mean + amplitude·sin(frequency·x + phase)`
    Sinusoidal {
        mean: f64,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl Expr {
    pub fn constant(value: f64) -> Self {
        Expr::Constant { value }
    }

    pub fn sinusoidal(mean: f64, amplitude: f64, frequency: f64, phase: f64) -> Self {
        Expr::Sinusoidal {
            mean,
            amplitude,
            frequency,
            phase,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Expr::Constant { value } => value,
            Expr::AffineClamped {
                intercept,
                slope,
                min,
                max,
            } => (intercept + slope * x).clamp(min, max),
            Expr::Sinusoidal {
                mean,
                amplitude,
                frequency,
                phase,
            } => mean + amplitude * (frequency * x + phase).sin(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            Expr::Constant { .. } => true,
            Expr::AffineClamped { slope, min, max, .. } => slope == 0.0 || min == max,
            Expr::Sinusoidal {
                amplitude, frequency, ..
            } => amplitude == 0.0 || frequency == 0.0,
        }
    }

    /// Lipschitz constant in `x`.
    pub fn lipschitz(&self) -> f64 {
        match *self {
            Expr::Constant { .. } => 0.0,
            Expr::AffineClamped { slope, .. } => slope.abs(),
            Expr::Sinusoidal {
                amplitude, frequency, ..
            } => (amplitude * frequency).abs(),
        }
    }

    /// States beyond which the expression is constant (clamp saturation points).
    pub fn saturation_points(&self) -> Vec<f64> {
        match *self {
            Expr::AffineClamped {
                intercept,
                slope,
                min,
                max,
            } if slope != 0.0 => [min, max]
                .iter()
                .filter(|v| v.is_finite())
                .map(|v| (v - intercept) / slope)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Exact range `[min, max]` of the expression on a region.
    pub fn range_on(&self, region: Region) -> (f64, f64) {
        match (*self, region) {
            (Expr::Constant { value }, _) => (value, value),
            (
                Expr::AffineClamped {
                    intercept,
                    slope,
                    min,
                    max,
                },
                Region::All,
            ) => {
                if slope == 0.0 {
                    let v = intercept.clamp(min, max);
                    (v, v)
                } else {
                    (min, max)
                }
            }
            (Expr::AffineClamped { .. }, Region::Interval { lo, hi }) => {
                let (a, b) = (self.eval(lo), self.eval(hi));
                (a.min(b), a.max(b))
            }
            (
                Expr::Sinusoidal {
                    mean,
                    amplitude,
                    frequency,
                    phase,
                },
                region,
            ) => {
                let amp = amplitude.abs();
                if amp == 0.0 || frequency == 0.0 {
                    let v = self.eval(0.0);
                    return (v, v);
                }
                let (lo, hi) = match region {
                    Region::All => return (mean - amp, mean + amp),
                    Region::Interval { lo, hi } => (lo, hi),
                };
                if (hi - lo) * frequency.abs() >= 2.0 * PI {
                    return (mean - amp, mean + amp);
                }
                let (mut rmin, mut rmax) = {
                    let (a, b) = (self.eval(lo), self.eval(hi));
                    (a.min(b), a.max(b))
                };
                // interior critical points: frequency·x + phase = π/2 + kπ
                let (ulo, uhi) = {
                    let (a, b) = (frequency * lo + phase, frequency * hi + phase);
                    (a.min(b), a.max(b))
                };
                let mut k = ((ulo - PI / 2.0) / PI).ceil();
                while PI / 2.0 + k * PI <= uhi {
                    let v = mean + amplitude * (PI / 2.0 + k * PI).sin();
                    rmin = rmin.min(v);
                    rmax = rmax.max(v);
                    k += 1.0;
                }
                (rmin, rmax)
            }
        }
    }
}
