//! Streaming moments and least-squares fits.

use serde::{Deserialize, Serialize};

/// Welford accumulator; `merge` is associative up to rounding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Welford {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Mean and standard error of a sample, with the mean computed as `sum / n`.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Ordinary least squares of `y` on `x`.
pub fn linear_fit(points: &[(f64, f64)]) -> LinearFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    LinearFit {
        slope,
        intercept,
        residual: (rss / n).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn merge_matches_single_pass(v in proptest::collection::vec(-100.0..100.0f64, 2..200), split in 0usize..200) {
            let split = split.min(v.len());
            let mut all = Welford::default();
            v.iter().for_each(|&x| all.push(x));
            let (mut a, mut b) = (Welford::default(), Welford::default());
            v[..split].iter().for_each(|&x| a.push(x));
            v[split..].iter().for_each(|&x| b.push(x));
            a.merge(&b);
            prop_assert_eq!(a.n, all.n);
            prop_assert!((a.mean - all.mean).abs() < 1e-9);
            prop_assert!((a.variance() - all.variance()).abs() < 1e-7 * (1.0 + all.variance()));
        }
    }

    #[test]
    fn exact_line_has_zero_residual() {
        let pts: Vec<_> = (0..10).map(|i| (i as f64, 2.5 * i as f64 - 1.0)).collect();
        let f = linear_fit(&pts);
        assert!((f.slope - 2.5).abs() < 1e-14 && (f.intercept + 1.0).abs() < 1e-13 && f.residual < 1e-13);
    }
}
