//! Special functions used by the closed-form kernel integrals.

use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma, gamma_li, gamma_ui};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Symbol constant of the symmetric stable density `|y|^{-1-α}`:
/// `∫ (1 - cos yξ) |y|^{-1-α} dy = κ_α |ξ|^α`.
pub fn stable_symbol_constant(alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-12 {
        return PI;
    }
    2.0 * gamma(1.0 - alpha) * (PI * alpha / 2.0).cos() / alpha
}

/// Density coefficient `c` for which `c|y|^{-1-α}` has symbol exactly `|ξ|^α`.
pub fn unit_symbol_density(alpha: f64) -> f64 {
    1.0 / stable_symbol_constant(alpha)
}

/// Exponential integral `E_1(x)` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0);
    if x <= 1.0 {
        const EULER: f64 = 0.577_215_664_901_532_9;
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        -EULER - x.ln() + sum
    } else {
        // modified Lentz continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..300 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Upper incomplete gamma `Γ(a, x)` for any real `a` and `x > 0`.
pub fn upper_gamma(a: f64, x: f64) -> f64 {
    assert!(x > 0.0);
    if a > 0.0 {
        return gamma_ui(a, x);
    }
    if a == 0.0 {
        return exp_integral_e1(x);
    }
    // Γ(a, x) = (Γ(a+1, x) - x^a e^{-x}) / a
    let next = upper_gamma(a + 1.0, x);
    (next - x.powf(a) * (-x).exp()) / a
}

/// Lower incomplete gamma `γ(a, x)` for `a > 0`, `x ≥ 0`.
pub fn lower_gamma(a: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    gamma_li(a, x)
}

/// `∫_lo^hi y^{s-1} e^{-λy} dy` for `0 ≤ lo ≤ hi ≤ ∞`; requires `s > 0` when `lo = 0`.
pub fn tempered_power_integral(s: f64, lambda: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let scale = lambda.powf(-s);
    if lo == 0.0 {
        if hi.is_infinite() {
            return scale * gamma(s);
        }
        return scale * lower_gamma(s, lambda * hi);
    }
    let upper_hi = if hi.is_infinite() {
        0.0
    } else {
        upper_gamma(s, lambda * hi)
    };
    scale * (upper_gamma(s, lambda * lo) - upper_hi)
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// `1 - cos(x)` without cancellation.
pub fn one_minus_cos(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    2.0 * s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn stable_constant_matches_reference_values() {
        let table = [
            (0.5, 5.013_256_549_262_001),
            (0.8, 3.546_621_813_817_492),
            (1.0, PI),
            (1.2, 2.998_056_390_811_656),
            (1.5, 3.342_171_032_841_334),
            (1.9, 10.989_918_867_996_7),
        ];
        for (alpha, expected) in table {
            assert_relative_eq!(stable_symbol_constant(alpha), expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn stable_constant_is_continuous_through_one() {
        let below = stable_symbol_constant(1.0 - 1e-7);
        let above = stable_symbol_constant(1.0 + 1e-7);
        assert!((below - PI).abs() < 1e-5 && (above - PI).abs() < 1e-5);
    }

    #[test]
    fn incomplete_gamma_reference_values() {
        // 2Γ(1.2, 1) and 2γ(0.7, 1)
        assert_relative_eq!(
            2.0 * upper_gamma(1.2, 1.0),
            0.831_947_031_770_620_5,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            2.0 * lower_gamma(0.7, 1.0),
            1.976_127_307_821_473_4,
            max_relative = 1e-12
        );
    }

    #[test]
    fn negative_order_upper_gamma_matches_quadrature() {
        use crate::quad::{integrate_to_infinity, QuadConfig};
        for &(a, x) in &[
            (-0.5, 0.3),
            (-1.0, 0.7),
            (-1.5, 2.0),
            (0.0, 0.2),
            (0.0, 3.0),
            (-0.2, 1e-3),
        ] {
            let q = integrate_to_infinity(|t: f64| t.powf(a - 1.0) * (-t).exp(), x, &QuadConfig::default());
            assert_relative_eq!(upper_gamma(a, x), q.value, max_relative = 1e-9);
        }
    }

    #[test]
    fn tempered_mass_above_cutoff() {
        // 2 ∫_{1e-3}^∞ y^{-2.5} e^{-y} dy
        let v = 2.0 * tempered_power_integral(-1.5, 1.0, 1e-3, f64::INFINITY);
        assert_relative_eq!(v, 42_041.874_334_247_1, max_relative = 1e-11);
    }
}
