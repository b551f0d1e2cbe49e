//! Characteristic exponent `ψ(η) = ∫ (1 - e^{izη} + izη·1_{|z|≤ρ}) ν(dz)` of a catalog measure
//! and its derivatives, in driver coordinates.

use super::Method;
use crate::quad::{integrate, integrate_power_weight, integrate_to_infinity, QuadConfig};
use crate::special::{normal_pdf, one_minus_cos, stable_symbol_constant};
use crate::triplet::{JumpLaw, Measure};
use num_complex::Complex64;
use statrs::function::gamma::gamma;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn quad_cfg() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_intervals: 6000,
    }
}

/// Switch point between quadrature and the asymptotic expansion for oscillatory tails.
const ASYMPTOTIC_FROM: f64 = 60.0;

/// `∫_A^∞ e^{iu} u^{-s} du` for `A ≥ ASYMPTOTIC_FROM` by its asymptotic series.
fn oscillatory_tail_asymptotic(a: f64, s: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(a.powf(-s), 0.0);
    let mut best = f64::INFINITY;
    for n in 0..60 {
        let mag = term.norm();
        if mag > best {
            break;
        }
        best = mag;
        sum += term;
        if mag < 1e-18 * sum.norm() {
            break;
        }
        term *= -I * (s + n as f64) / a;
    }
    I * Complex64::from_polar(1.0, a) * sum
}

/// `∫_A^∞ cos(u) u^{-s} du` for `A > 0` and `1 < s < 3`.
fn cos_power_tail(a: f64, s: f64) -> f64 {
    if a >= ASYMPTOTIC_FROM {
        return oscillatory_tail_asymptotic(a, s).re;
    }
    let cfg = quad_cfg();
    let mut total = oscillatory_tail_asymptotic(ASYMPTOTIC_FROM, s).re;
    let mid = a.max(1.0);
    total += integrate(|u: f64| u.cos() * u.powf(-s), mid, ASYMPTOTIC_FROM, &cfg).value;
    if a < 1.0 {
        // ∫_A^1 cos u·u^{-s} = ∫_A^1 u^{-s} - ∫_A^1 (1 - cos u) u^{-s}
        let plain = (1.0 - a.powf(1.0 - s)) / (1.0 - s);
        let g = |u: f64| {
            if u == 0.0 {
                0.5
            } else {
                one_minus_cos(u) / (u * u)
            }
        };
        let smooth =
            integrate_power_weight(g, 2.0 - s, 1.0, &cfg).value - integrate_power_weight(g, 2.0 - s, a, &cfg).value;
        total += plain - smooth;
    }
    total
}

fn uniform_one_minus_sinc(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let x2 = x * x;
        x2 / 6.0 - x2 * x2 / 120.0 + x2 * x2 * x2 / 5040.0 - x2 * x2 * x2 * x2 / 362_880.0
    } else {
        1.0 - x.sin() / x
    }
}

/// `1 - e^{w}` for complex `w` without cancellation.
fn one_minus_exp(w: Complex64) -> Complex64 {
    let (a, b) = (w.re, w.im);
    let re = -(a.exp_m1() * b.cos() - one_minus_cos(b));
    let im = -(a.exp() * b.sin());
    Complex64::new(re, im)
}

fn tempered_psi(alpha: f64, c: f64, lambda: f64, eta: f64) -> f64 {
    let u = eta / lambda;
    if (alpha - 1.0).abs() < 1e-9 {
        return 2.0 * c * (eta * u.atan() - 0.5 * lambda * (u * u).ln_1p());
    }
    let theta = u.atan();
    let bracket = (0.5 * alpha * (u * u).ln_1p()).exp_m1() * (alpha * theta).cos() - one_minus_cos(alpha * theta);
    -2.0 * c * gamma(-alpha) * lambda.powf(alpha) * bracket
}

fn stable_truncated_psi(alpha: f64, c: f64, truncate: f64, eta: f64) -> Option<f64> {
    let a = truncate * eta.abs();
    if a < ASYMPTOTIC_FROM {
        return None;
    }
    // ∫_A^∞ (1 - cos u) u^{-1-α} du = A^{-α}/α - ∫_A^∞ cos u·u^{-1-α} du
    let tail = a.powf(-alpha) / alpha - cos_power_tail(a, 1.0 + alpha);
    Some(c * eta.abs().powf(alpha) * (stable_symbol_constant(alpha) - 2.0 * tail))
}

/// Closed form of `ψ(η)` where the family admits one.
pub fn psi_closed(m: &Measure, rho: f64, eta: f64) -> Option<Complex64> {
    let re = |v: f64| Some(Complex64::new(v, 0.0));
    match *m {
        Measure::Zero => re(0.0),
        Measure::Stable { alpha, c, truncate } if truncate.is_infinite() => {
            re(c * stable_symbol_constant(alpha) * eta.abs().powf(alpha))
        }
        Measure::Stable { alpha, c, truncate } => {
            stable_truncated_psi(alpha, c, truncate, eta).map(|v| Complex64::new(v, 0.0))
        }
        Measure::Tempered {
            alpha,
            c,
            lambda,
            truncate,
        } if truncate.is_infinite() => re(tempered_psi(alpha, c, lambda, eta)),
        Measure::Tempered { .. } => None,
        Measure::Poisson { rate, law } => match law {
            JumpLaw::TwoPoint { a } => re(rate * one_minus_cos(a * eta)),
            JumpLaw::Uniform { a } => re(rate * uniform_one_minus_sinc(a * eta)),
            JumpLaw::Gaussian { mu, sigma } => {
                let phi_part = one_minus_exp(Complex64::new(-0.5 * sigma * sigma * eta * eta, mu * eta));
                let comp = m.signed_first_between(0.0, rho);
                Some(rate * phi_part + I * eta * comp)
            }
        },
    }
}

/// Symmetric density on `(0, T]` with `density(z) ~ z^{-1-sing}` near 0.
struct SymmetricDensity<'a> {
    density: Box<dyn Fn(f64) -> f64 + 'a>,
    sing: f64,
    truncate: f64,
    /// `Some(c)` when the tail is the pure power `c z^{-1-α}`.
    pure_power: Option<(f64, f64)>,
}

fn symmetric_density(m: &Measure) -> Option<SymmetricDensity<'_>> {
    match *m {
        Measure::Stable { alpha, c, truncate } => Some(SymmetricDensity {
            density: Box::new(move |z: f64| c * z.powf(-1.0 - alpha)),
            sing: alpha,
            truncate,
            pure_power: truncate.is_infinite().then_some((alpha, c)),
        }),
        Measure::Tempered {
            alpha,
            c,
            lambda,
            truncate,
        } => Some(SymmetricDensity {
            density: Box::new(move |z: f64| c * (-lambda * z).exp() * z.powf(-1.0 - alpha)),
            sing: alpha,
            truncate,
            pure_power: None,
        }),
        Measure::Poisson {
            rate,
            law: JumpLaw::Uniform { a },
        } => Some(SymmetricDensity {
            density: Box::new(move |_| rate / (2.0 * a)),
            sing: -1.0,
            truncate: a,
            pure_power: None,
        }),
        _ => None,
    }
}

impl SymmetricDensity<'_> {
    /// `2∫_0^T z^p h(z) d(z) dz` where `h` is smooth and bounded; requires `p - 1 - sing > -1`.
    fn weighted(&self, p: f64, h: &dyn Fn(f64) -> f64) -> f64 {
        let cfg = quad_cfg();
        let split = self.truncate.min(1.0);
        let s = p - 1.0 - self.sing;
        let d = &self.density;
        let head = integrate_power_weight(|z: f64| h(z) * d(z) * z.powf(1.0 + self.sing), s, split, &cfg).value;
        let f = |z: f64| z.powf(p) * h(z) * d(z);
        let tail = if self.truncate <= 1.0 {
            0.0
        } else if self.truncate.is_finite() {
            integrate(f, 1.0, self.truncate, &cfg).value
        } else {
            integrate_to_infinity(f, 1.0, &cfg).value
        };
        2.0 * (head + tail)
    }
}

fn discrete_atoms(m: &Measure) -> Option<[(f64, f64); 2]> {
    match *m {
        Measure::Poisson {
            rate,
            law: JumpLaw::TwoPoint { a },
        } => Some([(a, 0.5 * rate), (-a, 0.5 * rate)]),
        _ => None,
    }
}

fn gaussian_real_line(mu: f64, sigma: f64, cuts: &[f64], f: &dyn Fn(f64) -> f64) -> f64 {
    let cfg = quad_cfg();
    let (lo, hi) = (mu - 40.0 * sigma, mu + 40.0 * sigma);
    let mut pts = vec![lo, hi, mu - 4.0 * sigma, mu + 4.0 * sigma];
    pts.extend(cuts.iter().copied().filter(|c| *c > lo && *c < hi));
    pts.sort_by(f64::total_cmp);
    pts.windows(2)
        .map(|w| integrate(|z| f(z) * normal_pdf((z - mu) / sigma) / sigma, w[0], w[1], &cfg).value)
        .sum()
}

/// `ψ(η)` by quadrature of the Lévy–Khintchine integrand (atoms are summed directly).
pub fn psi_quadrature(m: &Measure, rho: f64, eta: f64) -> Complex64 {
    if eta == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if let Some(atoms) = discrete_atoms(m) {
        return atoms
            .iter()
            .map(|&(z, w)| {
                let comp = if z.abs() <= rho {
                    I * z * eta
                } else {
                    Complex64::new(0.0, 0.0)
                };
                w * (1.0 - Complex64::from_polar(1.0, z * eta) + comp)
            })
            .sum();
    }
    if let Some(sd) = symmetric_density(m) {
        if let Some((alpha, c)) = sd.pure_power {
            // ∫_0^1 by power weight; ∫_1^∞ (1 - cos zη) c z^{-1-α} = c/α - c|η|^α ∫_{|η|}^∞ cos u·u^{-1-α}
            let cfg = quad_cfg();
            let g = |z: f64| {
                if z == 0.0 {
                    0.5 * eta * eta * c
                } else {
                    c * one_minus_cos(z * eta) / (z * z)
                }
            };
            let head = integrate_power_weight(g, 1.0 - alpha, 1.0, &cfg).value;
            let tail = c / alpha - c * eta.abs().powf(alpha) * cos_power_tail(eta.abs(), 1.0 + alpha);
            return Complex64::new(2.0 * (head + tail), 0.0);
        }
        let h = |z: f64| {
            if z == 0.0 {
                0.5 * eta * eta
            } else {
                one_minus_cos(z * eta) / (z * z)
            }
        };
        return Complex64::new(sd.weighted(2.0, &h), 0.0);
    }
    match *m {
        Measure::Poisson {
            rate,
            law: JumpLaw::Gaussian { mu, sigma },
        } => {
            let re = gaussian_real_line(mu, sigma, &[], &|z| one_minus_cos(z * eta));
            let im = gaussian_real_line(mu, sigma, &[-rho, rho], &|z| {
                -(z * eta).sin() + if z.abs() <= rho { z * eta } else { 0.0 }
            });
            rate * Complex64::new(re, im)
        }
        _ => Complex64::new(0.0, 0.0),
    }
}

pub fn psi(m: &Measure, rho: f64, eta: f64, method: Method) -> (Complex64, Method) {
    if eta == 0.0 {
        return (Complex64::new(0.0, 0.0), Method::ClosedForm);
    }
    if method == Method::ClosedForm {
        if let Some(v) = psi_closed(m, rho, eta) {
            return (v, Method::ClosedForm);
        }
    }
    (psi_quadrature(m, rho, eta), Method::Quadrature)
}

/// `E[Z^k e^{iZη}]` for `Z ~ N(μ, σ²)`.
fn gaussian_fourier_moment(mu: f64, sigma: f64, k: usize, eta: f64) -> Complex64 {
    let g1 = Complex64::new(-sigma * sigma * eta, mu);
    let s2 = sigma * sigma;
    let (mut p_prev, mut p) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    for j in 0..k {
        let next = g1 * p - (j as f64) * s2 * p_prev;
        p_prev = p;
        p = next;
    }
    let phi = Complex64::from_polar((-0.5 * s2 * eta * eta).exp(), mu * eta);
    (-I).powu(k as u32) * phi * p
}

/// `∂^k ψ(η)` for `k ≥ 1`. Callers check that `∫_{|z|>1}|z|^k ν(dz) < ∞`.
pub fn psi_derivative(m: &Measure, rho: f64, k: usize, eta: f64) -> (Complex64, Method) {
    let ik2 = I.powu((k + 2) as u32);
    let closed = |v: Complex64| (v, Method::ClosedForm);
    if eta == 0.0 {
        // moments of the measure
        if k == 1 {
            let above = if rho.is_infinite() {
                0.0
            } else {
                m.signed_first_between(rho, f64::INFINITY)
            };
            return closed(Complex64::new(0.0, -above));
        }
        let raw = match *m {
            Measure::Poisson {
                rate,
                law: JumpLaw::Gaussian { mu, sigma },
            } => rate * gaussian_fourier_moment(mu, sigma, k, 0.0).re,
            _ if k % 2 == 1 => 0.0,
            _ => m.moment_between(k as f64, 0.0, f64::INFINITY),
        };
        return closed(ik2 * raw);
    }
    match *m {
        Measure::Zero => return closed(Complex64::new(0.0, 0.0)),
        Measure::Stable { alpha, c, truncate } if truncate.is_infinite() && k == 1 => {
            return closed(Complex64::new(
                c * stable_symbol_constant(alpha) * alpha * eta.abs().powf(alpha - 1.0) * eta.signum(),
                0.0,
            ));
        }
        Measure::Tempered {
            alpha,
            c,
            lambda,
            truncate,
        } if truncate.is_infinite() => {
            if k == 1 {
                let theta = (eta / lambda).atan();
                let v = if (alpha - 1.0).abs() < 1e-9 {
                    2.0 * c * theta
                } else {
                    let r = lambda.hypot(eta);
                    2.0 * c * gamma(1.0 - alpha) * r.powf(alpha - 1.0) * ((1.0 - alpha) * theta).sin()
                };
                return closed(Complex64::new(v, 0.0));
            }
            let e = alpha - k as f64;
            let minus = Complex64::new(lambda, -eta).powf(e);
            let plus = Complex64::new(lambda, eta).powf(e);
            let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            return closed(ik2 * c * gamma(k as f64 - alpha) * (minus + sign * plus));
        }
        Measure::Poisson {
            rate,
            law: JumpLaw::Gaussian { mu, sigma },
        } => {
            if k == 1 {
                let below = m.signed_first_between(0.0, rho);
                let phi = Complex64::from_polar((-0.5 * sigma * sigma * eta * eta).exp(), mu * eta);
                return closed(I * (below - rate * phi * Complex64::new(mu, sigma * sigma * eta)));
            }
            return closed(ik2 * rate * gaussian_fourier_moment(mu, sigma, k, eta));
        }
        _ => {}
    }
    if let Some(atoms) = discrete_atoms(m) {
        let v: Complex64 = atoms
            .iter()
            .map(|&(z, w)| {
                let e = Complex64::from_polar(1.0, z * eta);
                if k == 1 {
                    let ind = if z.abs() <= rho { 1.0 } else { 0.0 };
                    I * w * z * (ind - e)
                } else {
                    ik2 * w * z.powi(k as i32) * e
                }
            })
            .sum();
        return closed(v);
    }
    let sd = symmetric_density(m).expect("remaining catalog measures have symmetric densities");
    let v = if k == 1 {
        // i∫z(1_{|z|≤ρ} - e^{izη})ν = ∫ z sin(zη) ν for symmetric ν
        Complex64::new(
            sd.weighted(2.0, &|z: f64| {
                if z == 0.0 {
                    eta
                } else {
                    (z * eta).sin() / z
                }
            }),
            0.0,
        )
    } else if k.is_multiple_of(2) {
        ik2 * sd.weighted(k as f64, &|z: f64| (z * eta).cos())
    } else {
        ik2 * I * sd.weighted(k as f64, &|z: f64| (z * eta).sin())
    };
    (v, Method::Quadrature)
}
