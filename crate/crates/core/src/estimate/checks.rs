use super::slope::fit_points;
use super::{column, combined_se, require_paths, sample_snapshots, snap_to_grid, SlopeFit};
use crate::bounds::{check_condition, moment_exists, Condition, MomentFunction, PairGrid};
use crate::error::{Error, Result};
use crate::simulate::{map_paths, simulate_path_with, PathObserver, SimConfig};
use crate::stats::mean_se;
use crate::symbol::{eval_symbol, growth_constants};
use crate::triplet::{coefficient_sups, Compensation, ProcessSpec, Region};
use serde::{Deserialize, Serialize};

/// Largest relative spread of the backward ratio across seeds.
pub const BACKWARD_STABILITY: f64 = 0.2;
/// Least small-time slope of an even moment consistent with a linear bound.
pub const GROWTH_SLOPE_FLOOR: f64 = 0.9;
/// Rounding slack for checks that hold with equality.
const ROUNDING: f64 = 1e-12;
/// Allowed growth of the maximal ratio from the upper to the lower half of the grid.
const MAXIMAL_GROWTH: f64 = 1.5;

/// Zero drift with jumps either absent or fully compensated, or the declared flag.
pub fn is_martingale(spec: &ProcessSpec) -> bool {
    spec.flags.martingale_type
        || (spec.drift.is_zero() && (!spec.has_jumps() || spec.kernel.compensation == Compensation::Full))
}

fn require_bounded(spec: &ProcessSpec) -> Result<()> {
    let m1 = coefficient_sups(spec, Region::All, 1.0, 2.0)?.m1;
    if m1.is_finite() {
        Ok(())
    } else {
        Err(Error::Refused(
            "coefficients are unbounded: sup_x(|b|+|Q|+∫(|y|²∧1)N) = ∞".into(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaldCheck {
    pub x0: f64,
    pub half_width: f64,
    pub horizon: f64,
    /// Mean of `X_{τ∧T}`.
    pub mean: f64,
    pub std_error: f64,
    /// `mean ± 3 SE`
    pub interval: (f64, f64),
    /// Fraction of paths that left the interval before the horizon.
    pub stopped_fraction: f64,
    pub n_paths: u64,
    pub pass: bool,
}

struct StopOnExit {
    x0: f64,
    a: f64,
    x: f64,
    stopped: bool,
}

impl PathObserver for StopOnExit {
    fn observe(&mut self, _k: usize, _t: f64, x: f64, _sup: f64) {
        self.x = x;
        self.stopped |= (x - self.x0).abs() > self.a;
    }

    fn done(&self) -> bool {
        self.stopped
    }
}

/// Optional stopping at the first grid exit from `[x0 − a, x0 + a]`, capped at `horizon`.
pub fn wald_check(
    spec: &ProcessSpec,
    x0: f64,
    a: f64,
    horizon: f64,
    n_paths: u64,
    cfg: &SimConfig,
) -> Result<WaldCheck> {
    if !is_martingale(spec) {
        return Err(Error::Refused("Wald's identity needs a martingale-type spec".into()));
    }
    if !(a > 0.0) {
        return Err(Error::domain(format!("interval half-width must be positive, got {a}")));
    }
    require_paths(n_paths)?;
    let (cut, _) = snap_to_grid(cfg, &[horizon])?;
    let ends = map_paths(0..n_paths, |i| {
        let mut obs = StopOnExit {
            x0,
            a,
            x: x0,
            stopped: false,
        };
        simulate_path_with(spec, x0, &cut, i, &mut obs)?;
        Ok((obs.x, obs.stopped))
    })?;
    let xs: Vec<f64> = ends.iter().map(|e| e.0).collect();
    let (mean, se) = mean_se(&xs);
    Ok(WaldCheck {
        x0,
        half_width: a,
        horizon: cut.t_end,
        mean,
        std_error: se,
        interval: (mean - 3.0 * se, mean + 3.0 * se),
        stopped_fraction: ends.iter().filter(|e| e.1).count() as f64 / n_paths as f64,
        n_paths,
        pass: (mean - x0).abs() <= 3.0 * se + ROUNDING * (1.0 + x0.abs()),
    })
}

/// `f(t) = sup_x E^x|X_t − x|^α` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubadditivityPoint {
    pub t: f64,
    pub value: f64,
    pub std_error: f64,
    /// Sampled start point attaining the sup.
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubadditivityCheck {
    pub alpha: f64,
    pub points: Vec<SubadditivityPoint>,
    /// `(t, s)` maximizing `f(t+s) − f(t) − f(s)`.
    pub worst_pair: (f64, f64),
    pub worst_violation: f64,
    pub combined_se: f64,
    pub pass: bool,
}

/// Worst violation of `f(t+s) ≤ f(t) + f(s)` over grid pairs.
pub fn subadditivity_check(
    spec: &ProcessSpec,
    alpha: f64,
    t_grid: &[f64],
    xs: &[f64],
    n_paths: u64,
    cfg: &SimConfig,
) -> Result<SubadditivityCheck> {
    require_bounded(spec)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("subadditivity needs 0 < α ≤ 1, got {alpha}")));
    }
    let m = moment_exists(spec, MomentFunction::PowerOrOne { p: alpha }, Region::All)?;
    if !m.exists {
        return Err(Error::Refused(format!(
            "moment of order {alpha} is not finite: {}",
            m.reason.unwrap_or_default()
        )));
    }
    if xs.is_empty() {
        return Err(Error::domain("no start points to sample"));
    }
    require_paths(n_paths)?;
    let mut times: Vec<f64> = t_grid.to_vec();
    for &t in t_grid {
        for &s in t_grid {
            times.push(t + s);
        }
    }
    times.sort_by(f64::total_cmp);
    times.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    let (cut, idx) = snap_to_grid(cfg, &times)?;
    let mut best: Vec<Option<SubadditivityPoint>> = vec![None; times.len()];
    for &x in xs {
        let rows = sample_snapshots(spec, x, &cut, &idx, n_paths)?;
        for (j, b) in best.iter_mut().enumerate() {
            let v: Vec<f64> = column(&rows, j)
                .iter()
                .map(|&(y, _)| (y - x).abs().powf(alpha))
                .collect();
            let (value, std_error) = mean_se(&v);
            if b.is_none_or(|p| value > p.value) {
                *b = Some(SubadditivityPoint {
                    t: times[j],
                    value,
                    std_error,
                    x,
                });
            }
        }
    }
    let points: Vec<SubadditivityPoint> = best.into_iter().map(|p| p.expect("one start point at least")).collect();
    let at = |t: f64| {
        points
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .copied()
            .expect("nonempty")
    };
    let mut worst = (f64::NEG_INFINITY, (0.0, 0.0), 0.0);
    for (i, &t) in t_grid.iter().enumerate() {
        for &s in &t_grid[i..] {
            let (ft, fs, fts) = (at(t), at(s), at(t + s));
            let v = fts.value - ft.value - fs.value;
            if v > worst.0 {
                worst = (v, (t, s), combined_se(&[ft.std_error, fs.std_error, fts.std_error]));
            }
        }
    }
    let scale = points.iter().map(|p| p.value).fold(1.0, f64::max);
    Ok(SubadditivityCheck {
        alpha,
        points,
        worst_pair: worst.1,
        worst_violation: worst.0,
        combined_se: worst.2,
        pass: worst.0 <= 3.0 * worst.2 + ROUNDING * scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardCheck {
    pub function: MomentFunction,
    pub t: f64,
    /// Conditions verified on the default pair grid.
    pub conditions: Vec<Condition>,
    pub seeds: Vec<u64>,
    /// `max_s Ê f(X_s − x0) / Ê f(X_t − x0)` per seed.
    pub ratios: Vec<f64>,
    /// `(max − min) / mean` of the ratios.
    pub spread: f64,
    pub pass: bool,
}

/// Ratio of the worst earlier moment to the moment at `t`, repeated over seeds.
#[allow(clippy::too_many_arguments)]
pub fn backward_moment_check(
    spec: &ProcessSpec,
    f: MomentFunction,
    x0: f64,
    t: f64,
    s_grid: &[f64],
    seeds: &[u64],
    n_paths: u64,
    cfg: &SimConfig,
) -> Result<BackwardCheck> {
    f.validate()?;
    let mut conditions = Vec::new();
    for c in Condition::ALL {
        if check_condition(f, c, PairGrid::default())?.holds() {
            conditions.push(c);
        }
    }
    if conditions.is_empty() {
        return Err(Error::Refused(format!(
            "{} satisfies none of the conditions on the pair grid",
            f.label()
        )));
    }
    if s_grid.iter().any(|&s| !(s > 0.0 && s <= t)) {
        return Err(Error::InsufficientGrid(format!("backward times must lie in (0, {t}]")));
    }
    if seeds.is_empty() {
        return Err(Error::domain("no seeds given"));
    }
    require_paths(n_paths)?;
    let mut times = s_grid.to_vec();
    times.push(t);
    let mut ratios = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let mut c = *cfg;
        c.seed = seed;
        let (cut, idx) = snap_to_grid(&c, &times)?;
        let rows = sample_snapshots(spec, x0, &cut, &idx, n_paths)?;
        let means: Vec<f64> = (0..idx.len())
            .map(|j| {
                mean_se(
                    &column(&rows, j)
                        .iter()
                        .map(|&(y, _)| f.eval(y - x0))
                        .collect::<Vec<_>>(),
                )
                .0
            })
            .collect();
        let end = means[means.len() - 1];
        ratios.push(
            means[..means.len() - 1]
                .iter()
                .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
                / end,
        );
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r)));
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = if hi == lo { 0.0 } else { (hi - lo) / mean };
    Ok(BackwardCheck {
        function: f,
        t,
        conditions,
        seeds: seeds.to_vec(),
        pass: ratios.iter().all(|r| r.is_finite()) && spread < BACKWARD_STABILITY,
        ratios,
        spread,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximalRow {
    pub t: f64,
    /// `P̂(sup_{s≤t}|X_s − x0| > r)`
    pub probability: f64,
    pub std_error: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalCheck {
    pub r: f64,
    /// `sup_{|y−x0|≤r} sup_{|ξ|≤1/r} |q(y, ξ)|`
    pub symbol_sup: f64,
    pub rows: Vec<MaximalRow>,
    /// Largest ratio on the grid, an empirical stand-in for the unnamed constant.
    pub empirical_constant: f64,
    /// No growth from the upper to the lower half of the grid beyond noise.
    pub bounded: bool,
}

const MAXIMAL_STATE_POINTS: usize = 41;
const MAXIMAL_FREQ_POINTS: usize = 81;

fn local_symbol_sup(spec: &ProcessSpec, x0: f64, r: f64) -> Result<f64> {
    let states: Vec<f64> = if spec.is_state_independent() {
        vec![x0]
    } else {
        (0..MAXIMAL_STATE_POINTS)
            .map(|i| x0 - r + 2.0 * r * i as f64 / (MAXIMAL_STATE_POINTS - 1) as f64)
            .collect()
    };
    let mut best = 0.0f64;
    for y in states {
        for j in 0..MAXIMAL_FREQ_POINTS {
            let xi = (2.0 * j as f64 / (MAXIMAL_FREQ_POINTS - 1) as f64 - 1.0) / r;
            best = best.max(eval_symbol(spec, y, xi)?.value.norm());
        }
    }
    Ok(best)
}

/// Exit probabilities of the `r`-ball against `t` times the local symbol sup.
pub fn maximal_ratio_check(
    spec: &ProcessSpec,
    x0: f64,
    r: f64,
    t_grid: &[f64],
    n_paths: u64,
    cfg: &SimConfig,
) -> Result<MaximalCheck> {
    require_bounded(spec)?;
    if !(r > 0.0) {
        return Err(Error::domain(format!("radius must be positive, got {r}")));
    }
    require_paths(n_paths)?;
    let symbol_sup = local_symbol_sup(spec, x0, r)?;
    let (cut, idx) = snap_to_grid(cfg, t_grid)?;
    let rows_raw = sample_snapshots(spec, x0, &cut, &idx, n_paths)?;
    let rows: Vec<MaximalRow> = (0..idx.len())
        .map(|j| {
            let hits = column(&rows_raw, j).iter().filter(|&&(_, s)| s > r).count() as f64;
            let p = hits / n_paths as f64;
            let se = (p * (1.0 - p) / n_paths as f64).sqrt();
            let t = cut.time(idx[j]);
            let ratio = if p == 0.0 { 0.0 } else { p / (t * symbol_sup) };
            MaximalRow {
                t,
                probability: p,
                std_error: se,
                ratio,
            }
        })
        .collect();
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.t.total_cmp(&b.t));
    let half = sorted.len() / 2;
    let upper = sorted[half..].iter().fold(0.0f64, |m, r| m.max(r.ratio));
    let bounded = sorted[..half].iter().all(|row| {
        let se_ratio = if symbol_sup > 0.0 {
            row.std_error / (row.t * symbol_sup)
        } else {
            0.0
        };
        row.ratio - 3.0 * se_ratio <= MAXIMAL_GROWTH * upper
    });
    Ok(MaximalCheck {
        r,
        symbol_sup,
        empirical_constant: rows.iter().fold(0.0f64, |m, r| m.max(r.ratio)),
        rows,
        bounded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub n: u32,
    /// `(t, Ê(X_t − x0)^{2n}, se)`
    pub rows: Vec<(f64, f64, f64)>,
    pub fit: SlopeFit,
    pub pass: bool,
}

/// Small-time slope of `Ê[(X_t − x0)^{2n}]`, which a linear-in-`t` bound keeps at least 1.
pub fn moment_growth_check(
    spec: &ProcessSpec,
    x0: f64,
    n: u32,
    t_grid: &[f64],
    n_paths: u64,
    cfg: &SimConfig,
) -> Result<GrowthCheck> {
    if n == 0 {
        return Err(Error::domain("moment order 2n needs n ≥ 1"));
    }
    if t_grid.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::InsufficientGrid("growth times must lie in (0, 1]".into()));
    }
    let p = 2.0 * n as f64;
    for k in 1..=2 * n as usize {
        let g = growth_constants(spec, k, Region::All).map_err(|e| Error::Refused(e.to_string()))?;
        if !g.c_k.is_finite() {
            return Err(Error::Refused(format!("growth constant of order {k} is not finite")));
        }
    }
    let m = moment_exists(spec, MomentFunction::PowerOrOne { p }, Region::All)?;
    if !m.exists {
        return Err(Error::Refused(format!(
            "moment of order {p} is not finite: {}",
            m.reason.unwrap_or_default()
        )));
    }
    require_paths(n_paths)?;
    let (cut, idx) = snap_to_grid(cfg, t_grid)?;
    let raw = sample_snapshots(spec, x0, &cut, &idx, n_paths)?;
    let rows: Vec<(f64, f64, f64)> = (0..idx.len())
        .map(|j| {
            let v: Vec<f64> = column(&raw, j)
                .iter()
                .map(|&(y, _)| (y - x0).powi(2 * n as i32))
                .collect();
            let (e, se) = mean_se(&v);
            (cut.time(idx[j]), e, se)
        })
        .collect();
    let window = (
        rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
        rows.iter().map(|r| r.0).fold(0.0, f64::max),
    );
    let fit = fit_points(&rows.iter().map(|r| (r.0, r.1)).collect::<Vec<_>>(), window)?;
    Ok(GrowthCheck {
        n,
        pass: fit.slope >= GROWTH_SLOPE_FLOOR,
        rows,
        fit,
    })
}
