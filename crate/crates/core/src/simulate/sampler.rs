use super::{SimConfig, SmallJumpMode, StableSampler};
use crate::error::{Error, Result};
use crate::special::stable_symbol_constant;
use crate::triplet::{FrozenKernel, JumpLaw, Measure};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use std::f64::consts::PI;

/// Distance from 2 below which stable variates are drawn as Gaussians.
pub const GAUSSIAN_SWITCH: f64 = 1e-6;

/// One symmetric stable variate with characteristic function `exp(−scale·|ξ|^α)`.
///
/// Uses the trigonometric transform of a uniform angle and a unit exponential.
pub fn sample_stable<R: Rng + ?Sized>(alpha: f64, scale: f64, rng: &mut R) -> f64 {
    debug_assert!(alpha > 0.0 && alpha <= 2.0);
    if 2.0 - alpha <= GAUSSIAN_SWITCH {
        let z: f64 = rng.sample(StandardNormal);
        return (2.0 * scale).sqrt() * z;
    }
    let v = PI * (rng.random::<f64>() - 0.5);
    let s = if (alpha - 1.0).abs() < 1e-12 {
        v.tan()
    } else {
        let w: f64 = rng.sample(Exp1);
        (alpha * v).sin() / v.cos().powf(1.0 / alpha) * ((v * (1.0 - alpha)).cos() / w).powf((1.0 - alpha) / alpha)
    };
    scale.powf(1.0 / alpha) * s
}

/// Absolute jump size of a symmetric power-law measure restricted to `(lo, hi]`, by inversion.
fn power_law_radius<R: Rng + ?Sized>(alpha: f64, lo: f64, hi: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let (a, b) = (lo.powf(-alpha), if hi.is_finite() { hi.powf(-alpha) } else { 0.0 });
    (b + u * (a - b)).powf(-1.0 / alpha)
}

fn random_sign<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random::<bool>() {
        1.0
    } else {
        -1.0
    }
}

fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

#[derive(Debug, Clone, Copy)]
enum Jumps {
    None,
    /// Exact increment `(h c κ_α)^{1/α} S_α`.
    Stable {
        alpha: f64,
        scale: f64,
    },
    /// Finite activity: all jumps drawn.
    Poisson {
        mean: f64,
        law: JumpLaw,
    },
    /// Power-law jumps above the cutoff, thinned by `exp(−λ(|z| − δ))` when tempered.
    Cutoff {
        mean: f64,
        alpha: f64,
        lo: f64,
        hi: f64,
        lambda: f64,
        small_sd: f64,
    },
}

/// Exact one-step sampler for a Lévy triplet frozen over a step of length `h`.
#[derive(Debug, Clone, Copy)]
pub struct StepSampler {
    mean: f64,
    sd: f64,
    dilation: f64,
    jumps: Jumps,
}

impl StepSampler {
    /// `drift` and `diffusion` are in state coordinates; the kernel is dilated by `k.dilation`.
    pub fn new(drift: f64, diffusion: f64, k: &FrozenKernel, h: f64, cfg: &SimConfig) -> Result<Self> {
        if !(diffusion >= 0.0) || !drift.is_finite() || !diffusion.is_finite() {
            return Err(Error::domain(format!(
                "coefficients (b, Q) = ({drift}, {diffusion}) are not admissible"
            )));
        }
        let delta = cfg.small_jump_cutoff;
        // compensator in driver coordinates: h ∫_{|z|≤ρ} z ν(dz)
        let compensator = if k.rho > 0.0 {
            h * k.measure.signed_first_between(0.0, k.rho)
        } else {
            0.0
        };
        let jumps = match k.measure {
            Measure::Zero => Jumps::None,
            Measure::Stable { alpha, c, truncate }
                if truncate.is_infinite() && cfg.stable_sampler == StableSampler::Exact =>
            {
                Jumps::Stable {
                    alpha,
                    scale: h * c * stable_symbol_constant(alpha),
                }
            }
            Measure::Stable { alpha, c, truncate } => {
                Self::cutoff(alpha, c, 0.0, truncate, h, delta, cfg.small_jump_mode, &k.measure)
            }
            Measure::Tempered {
                alpha,
                c,
                lambda,
                truncate,
            } => Self::cutoff(alpha, c, lambda, truncate, h, delta, cfg.small_jump_mode, &k.measure),
            Measure::Poisson { rate, law } => Jumps::Poisson { mean: rate * h, law },
        };
        if let Jumps::Cutoff { mean, .. } | Jumps::Poisson { mean, .. } = jumps {
            if !mean.is_finite() {
                return Err(Error::domain(format!(
                    "jump intensity above the cutoff is not finite: {mean}"
                )));
            }
        }
        Ok(StepSampler {
            mean: drift * h - k.dilation * compensator,
            sd: (diffusion * h).sqrt(),
            dilation: k.dilation,
            jumps,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn cutoff(
        alpha: f64,
        c: f64,
        lambda: f64,
        truncate: f64,
        h: f64,
        delta: f64,
        mode: SmallJumpMode,
        m: &Measure,
    ) -> Jumps {
        let lo = delta.min(truncate);
        // dominating power law c e^{-λδ}|z|^{-1-α} on (δ, R]
        let upper = if truncate.is_finite() {
            truncate.powf(-alpha)
        } else {
            0.0
        };
        let mean = h * 2.0 * c * (-lambda * lo).exp() * (lo.powf(-alpha) - upper) / alpha;
        let small_sd = match mode {
            SmallJumpMode::Drop => 0.0,
            SmallJumpMode::GaussianCorrection => (h * m.moment_between(2.0, 0.0, lo)).sqrt(),
        };
        Jumps::Cutoff {
            mean,
            alpha,
            lo,
            hi: truncate,
            lambda,
            small_sd,
        }
    }

    /// Draws one increment and the number of discrete jumps it contains.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, u64) {
        let mut dx = self.mean;
        if self.sd > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            dx += self.sd * z;
        }
        let (driver, count) = match self.jumps {
            Jumps::None => (0.0, 0),
            Jumps::Stable { alpha, scale } => (sample_stable(alpha, scale, rng), 0),
            Jumps::Poisson { mean, law } => {
                let n = poisson(mean, rng);
                let mut sum = 0.0;
                for _ in 0..n {
                    sum += match law {
                        JumpLaw::TwoPoint { a } => random_sign(rng) * a,
                        JumpLaw::Uniform { a } => a * (2.0 * rng.random::<f64>() - 1.0),
                        JumpLaw::Gaussian { mu, sigma } => mu + sigma * rng.sample::<f64, _>(StandardNormal),
                    };
                }
                (sum, n)
            }
            Jumps::Cutoff {
                mean,
                alpha,
                lo,
                hi,
                lambda,
                small_sd,
            } => {
                let n = poisson(mean, rng);
                let mut sum = 0.0;
                let mut accepted = 0;
                for _ in 0..n {
                    let r = power_law_radius(alpha, lo, hi, rng);
                    if lambda > 0.0 && rng.random::<f64>() >= (-lambda * (r - lo)).exp() {
                        continue;
                    }
                    sum += random_sign(rng) * r;
                    accepted += 1;
                }
                if small_sd > 0.0 {
                    sum += small_sd * rng.sample::<f64, _>(StandardNormal);
                }
                (sum, accepted)
            }
        };
        (dx + self.dilation * driver, count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::path_rng;
    use crate::stats::mean_se;

    #[test]
    fn alpha_two_is_gaussian() {
        let mut rng = path_rng(7, 0);
        let sigma: f64 = 1.7;
        let v: Vec<f64> = (0..100_000)
            .map(|_| sample_stable(2.0, 0.5 * sigma * sigma, &mut rng).powi(2))
            .collect();
        let (m, se) = mean_se(&v);
        assert!((m - sigma * sigma).abs() < 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn cauchy_median_is_zero() {
        let mut rng = path_rng(11, 0);
        let mut v: Vec<f64> = (0..100_000).map(|_| sample_stable(1.0, 1.0, &mut rng)).collect();
        v.sort_by(f64::total_cmp);
        assert!(v[50_000].abs() < 0.02, "{}", v[50_000]);
    }

    #[test]
    fn stable_characteristic_function() {
        let mut rng = path_rng(13, 0);
        let draws: Vec<f64> = (0..100_000).map(|_| sample_stable(1.5, 1.0, &mut rng)).collect();
        for xi in [0.5, 1.0, 2.0] {
            let c: Vec<f64> = draws.iter().map(|x: &f64| (xi * x).cos()).collect();
            let (m, se) = mean_se(&c);
            let expect = (-f64::powf(xi, 1.5)).exp();
            assert!((m - expect).abs() < 3.0 * se, "xi={xi}: {m} vs {expect} ± {se}");
        }
    }

    #[test]
    fn power_law_radius_inverts_the_tail() {
        // P(R > r) = (r^{-α} − R^{-α}) / (δ^{-α} − R^{-α})
        let mut rng = path_rng(17, 0);
        let (alpha, lo, hi) = (0.7, 0.01, 5.0);
        let n = 200_000;
        let r: f64 = 0.1;
        let hits = (0..n).filter(|_| power_law_radius(alpha, lo, hi, &mut rng) > r).count() as f64 / n as f64;
        let expect = (r.powf(-alpha) - hi.powf(-alpha)) / (lo.powf(-alpha) - hi.powf(-alpha));
        let se = (expect * (1.0 - expect) / n as f64).sqrt();
        assert!((hits - expect).abs() < 4.0 * se, "{hits} vs {expect}");
    }
}
