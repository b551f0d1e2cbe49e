use super::functions::MomentFunction;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Relative growth of a sup under refinement that still counts as bounded.
pub const STABILITY_TOLERANCE: f64 = 0.1;
/// Relative growth of a Hölder constant under refinement that still accepts the exponent.
pub const HOLDER_TOLERANCE: f64 = 0.01;
/// Radius of the shift window in the gradient-ratio condition.
pub const GRADIENT_RADIUS: f64 = 0.5;
/// Candidate Hölder exponents, tried from the largest down.
const HOLDER_STEPS: usize = 20;

/// Sufficient conditions for time-independence of `E^x f(X_t) < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// (a) `f(x + y) ≤ c f(x) f(y)` and `f` locally bounded.
    Submultiplicative,
    /// (b) `log f` is Hölder continuous.
    LogHolder,
    /// (c) `f` is Hölder continuous and `inf f > 0`.
    HolderBoundedBelow,
    /// (d) `sup_y sup_{|z|≤r} |f'(y + z)| / f(y) < ∞`.
    GradientRatio,
    /// (e) `inf f > 0`, `sup |f'|/f < ∞` and `f'` uniformly continuous.
    GradientRatioUniform,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::Submultiplicative,
        Condition::LogHolder,
        Condition::HolderBoundedBelow,
        Condition::GradientRatio,
        Condition::GradientRatioUniform,
    ];

    pub fn letter(&self) -> char {
        match self {
            Condition::Submultiplicative => 'a',
            Condition::LogHolder => 'b',
            Condition::HolderBoundedBelow => 'c',
            Condition::GradientRatio => 'd',
            Condition::GradientRatioUniform => 'e',
        }
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_matches(|c| c == '(' || c == ')').to_ascii_lowercase();
        Condition::ALL
            .into_iter()
            .find(|c| s.len() == 1 && s.starts_with(c.letter()))
            .or_else(|| serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).ok())
            .ok_or_else(|| Error::domain(format!("unknown condition `{s}`")))
    }
}

/// A symmetric grid of `n` points on `[lo, hi]`; pairs range over its square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Default for PairGrid {
    fn default() -> Self {
        PairGrid {
            lo: -10.0,
            hi: 10.0,
            n: 201,
        }
    }
}

impl PairGrid {
    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n).map(|i| self.lo + h * i as f64).collect()
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    /// Twice the extent at half the spacing.
    pub fn refined(&self) -> PairGrid {
        PairGrid {
            lo: 2.0 * self.lo,
            hi: 2.0 * self.hi,
            n: 4 * self.n - 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionWitness {
    pub x: f64,
    pub y: Option<f64>,
    /// The quantity that failed to stay bounded.
    pub value: f64,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnGrid,
    Violated { witness: ConditionWitness },
}

/// Grid-based falsification result; a pass is evidence, not proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub function: MomentFunction,
    pub verdict: Verdict,
    /// The fitted constant on the base grid.
    pub constant: f64,
    pub refined_constant: f64,
    pub holder_exponent: Option<f64>,
    pub grid: PairGrid,
    pub refined_grid: PairGrid,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, Verdict::HoldsOnGrid)
    }
}

/// Largest value and where it occurs.
#[derive(Debug, Clone, Copy)]
struct Max {
    value: f64,
    x: f64,
    y: Option<f64>,
}

impl Max {
    fn new() -> Self {
        Max {
            value: f64::NEG_INFINITY,
            x: f64::NAN,
            y: None,
        }
    }

    fn offer(&mut self, value: f64, x: f64, y: Option<f64>) {
        if value > self.value || (value.is_nan() && !self.value.is_nan()) {
            *self = Max { value, x, y };
        }
    }

    fn finite(&self) -> bool {
        self.value.is_finite()
    }
}

fn stable_within(base: &Max, refined: &Max, tol: f64) -> bool {
    base.finite() && refined.finite() && refined.value <= base.value * (1.0 + tol) + 1e-12
}

fn stable(base: &Max, refined: &Max) -> bool {
    stable_within(base, refined, STABILITY_TOLERANCE)
}

fn witness(m: &Max, description: impl Into<String>) -> Verdict {
    Verdict::Violated {
        witness: ConditionWitness {
            x: m.x,
            y: m.y,
            value: m.value,
            description: description.into(),
        },
    }
}

fn submultiplicative_max(f: &MomentFunction, g: &PairGrid) -> Max {
    let pts = g.points();
    let vals: Vec<f64> = pts.iter().map(|&x| f.eval(x)).collect();
    let mut best = Max::new();
    for (i, &x) in pts.iter().enumerate() {
        for (j, &y) in pts.iter().enumerate().skip(i) {
            let ratio = f.eval(x + y) / (vals[i] * vals[j]);
            let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
            best.offer(ratio, x, Some(y));
        }
    }
    best
}

/// `max |h(x) − h(y)| / |x − y|^γ` over distinct grid pairs.
fn holder_max(values: &[f64], pts: &[f64], gamma: f64) -> Max {
    let mut best = Max::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = (values[i] - values[j]).abs();
            let q = d / (pts[j] - pts[i]).powf(gamma);
            best.offer(if q.is_nan() { f64::INFINITY } else { q }, pts[i], Some(pts[j]));
        }
    }
    best
}

struct HolderFit {
    gamma: Option<f64>,
    base: Max,
    refined: Max,
}

/// Largest candidate exponent whose constant is finite and stable under refinement.
fn holder_fit(h: &dyn Fn(f64) -> f64, g: &PairGrid) -> HolderFit {
    let r = g.refined();
    let (pb, pr) = (g.points(), r.points());
    let (vb, vr): (Vec<f64>, Vec<f64>) = (pb.iter().map(|&x| h(x)).collect(), pr.iter().map(|&x| h(x)).collect());
    let mut last = None;
    for k in (1..=HOLDER_STEPS).rev() {
        let gamma = k as f64 / HOLDER_STEPS as f64;
        let base = holder_max(&vb, &pb, gamma);
        let refined = holder_max(&vr, &pr, gamma);
        if stable_within(&base, &refined, HOLDER_TOLERANCE) {
            return HolderFit {
                gamma: Some(gamma),
                base,
                refined,
            };
        }
        last = Some((base, refined));
    }
    let (base, refined) = last.expect("at least one candidate exponent");
    HolderFit {
        gamma: None,
        base,
        refined,
    }
}

/// Smallest value of `f` on the grid, negated so larger means worse.
fn lower_bound(f: &MomentFunction, g: &PairGrid) -> Max {
    let mut best = Max::new();
    for x in g.points() {
        best.offer(-f.eval(x), x, None);
    }
    best
}

fn bounded_below(f: &MomentFunction, g: &PairGrid) -> Option<Verdict> {
    let (b, r) = (lower_bound(f, g), lower_bound(f, &g.refined()));
    let (inf_b, inf_r) = (-b.value, -r.value);
    if !(inf_b > 0.0) {
        return Some(witness(&b, format!("f({}) = {inf_b} is not positive", b.x)));
    }
    if inf_r < inf_b / (1.0 + STABILITY_TOLERANCE) {
        return Some(witness(
            &r,
            format!("inf f drops from {inf_b:e} to {inf_r:e} under refinement"),
        ));
    }
    None
}

fn gradient_ratio_max(f: &MomentFunction, g: &PairGrid, shifts: usize) -> Max {
    let mut best = Max::new();
    for y in g.points() {
        let fy = f.eval(y);
        for k in 0..shifts {
            let z = -GRADIENT_RADIUS + 2.0 * GRADIENT_RADIUS * k as f64 / (shifts - 1) as f64;
            let q = f.derivative(y + z).abs() / fy;
            best.offer(if q.is_nan() || fy <= 0.0 { f64::INFINITY } else { q }, y, Some(y + z));
        }
    }
    best
}

/// `max |f'(x_{i+1}) − f'(x_i)|` over adjacent grid points.
fn derivative_oscillation(f: &MomentFunction, g: &PairGrid) -> Max {
    let pts = g.points();
    let mut best = Max::new();
    for w in pts.windows(2) {
        let d = (f.derivative(w[1]) - f.derivative(w[0])).abs();
        best.offer(if d.is_nan() { f64::INFINITY } else { d }, w[0], Some(w[1]));
    }
    best
}

/// Falsifies `condition` for `f` on a pair grid and its refinement.
pub fn check_condition(f: MomentFunction, condition: Condition, grid: PairGrid) -> Result<ConditionReport> {
    f.validate()?;
    if grid.n < 3 || !(grid.lo < grid.hi) {
        return Err(Error::InsufficientGrid(format!(
            "need at least 3 points on a nonempty interval, got {grid:?}"
        )));
    }
    let refined_grid = grid.refined();
    let report = |verdict, base: &Max, refined: &Max, gamma| ConditionReport {
        condition,
        function: f,
        verdict,
        constant: base.value,
        refined_constant: refined.value,
        holder_exponent: gamma,
        grid,
        refined_grid,
    };
    let out = match condition {
        Condition::Submultiplicative => {
            let (b, r) = (
                submultiplicative_max(&f, &grid),
                submultiplicative_max(&f, &refined_grid),
            );
            let verdict = if !b.finite() {
                witness(&b, "f(x+y)/(f(x)f(y)) overflows")
            } else if !stable(&b, &r) {
                witness(
                    &b,
                    format!("c ≥ {:e} here and reaches {:e} under refinement", b.value, r.value),
                )
            } else {
                Verdict::HoldsOnGrid
            };
            report(verdict, &b, &r, None)
        }
        Condition::LogHolder | Condition::HolderBoundedBelow => {
            let below = if condition == Condition::HolderBoundedBelow {
                bounded_below(&f, &grid)
            } else {
                None
            };
            let fit = if condition == Condition::LogHolder {
                holder_fit(&|x| f.ln_eval(x), &grid)
            } else {
                holder_fit(&|x| f.eval(x), &grid)
            };
            let verdict = match (below, fit.gamma) {
                (Some(v), _) => v,
                (None, Some(_)) => Verdict::HoldsOnGrid,
                (None, None) => witness(&fit.refined, "no Hölder exponent in (0, 1] has a stable constant"),
            };
            report(verdict, &fit.base, &fit.refined, fit.gamma)
        }
        Condition::GradientRatio | Condition::GradientRatioUniform => {
            let (b, r) = (
                gradient_ratio_max(&f, &grid, 11),
                gradient_ratio_max(&f, &refined_grid, 21),
            );
            let mut verdict = if stable(&b, &r) {
                Verdict::HoldsOnGrid
            } else {
                witness(&r, format!("|f'(y+z)|/f(y) grows from {:e} to {:e}", b.value, r.value))
            };
            if condition == Condition::GradientRatioUniform && verdict == Verdict::HoldsOnGrid {
                if let Some(v) = bounded_below(&f, &grid) {
                    verdict = v;
                } else {
                    let (ob, or) = (
                        derivative_oscillation(&f, &grid),
                        derivative_oscillation(&f, &refined_grid),
                    );
                    let shrinks = or.finite() && (or.value <= 0.75 * ob.value || or.value <= 1e-9);
                    if !shrinks {
                        verdict = witness(
                            &or,
                            format!("f' jumps by {:e} at spacing {:e}", or.value, refined_grid.spacing()),
                        );
                    }
                }
            }
            report(verdict, &b, &r, None)
        }
    };
    Ok(out)
}
