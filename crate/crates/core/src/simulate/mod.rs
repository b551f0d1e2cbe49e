//! Path skeletons on a uniform time grid with running suprema.
//!
//! Constant triplets are stepped with exact increments. State-dependent triplets are frozen at
//! the current state for one step (first-order Euler). Path `i` draws from its own ChaCha stream
//! selected by `(seed, i)`, so results do not depend on scheduling or thread count.

mod sampler;

pub use sampler::{sample_stable, StepSampler, GAUSSIAN_SWITCH};

use crate::error::{Error, Result};
use crate::triplet::ProcessSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default grid density.
pub const STEPS_PER_UNIT: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallJumpMode {
    Drop,
    GaussianCorrection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExactLevy,
    FrozenEuler,
}

/// How untruncated stable jumps are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StableSampler {
    /// One stable variate per step.
    #[default]
    Exact,
    /// Compound Poisson above the cutoff plus the small-jump mode.
    Cutoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t_end: f64,
    pub n_steps: usize,
    #[serde(default = "default_cutoff")]
    pub small_jump_cutoff: f64,
    #[serde(default = "default_mode")]
    pub small_jump_mode: SmallJumpMode,
    pub seed: u64,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default)]
    pub stable_sampler: StableSampler,
}

fn default_cutoff() -> f64 {
    1e-3
}

fn default_mode() -> SmallJumpMode {
    SmallJumpMode::GaussianCorrection
}

fn default_scheme() -> Scheme {
    Scheme::FrozenEuler
}

impl SimConfig {
    /// `n_steps` steps on `[0, t_end]` with default jump handling and the Euler scheme.
    pub fn new(t_end: f64, n_steps: usize, seed: u64) -> Self {
        SimConfig {
            t_end,
            n_steps,
            small_jump_cutoff: default_cutoff(),
            small_jump_mode: default_mode(),
            seed,
            scheme: default_scheme(),
            stable_sampler: StableSampler::Exact,
        }
    }

    /// `STEPS_PER_UNIT` steps per unit time (at least one step).
    pub fn with_default_grid(t_end: f64, seed: u64) -> Self {
        Self::new(t_end, ((t_end * STEPS_PER_UNIT as f64).ceil() as usize).max(1), seed)
    }

    pub fn scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn small_jumps(mut self, cutoff: f64, mode: SmallJumpMode) -> Self {
        self.small_jump_cutoff = cutoff;
        self.small_jump_mode = mode;
        self
    }

    pub fn stable_sampler(mut self, s: StableSampler) -> Self {
        self.stable_sampler = s;
        self
    }

    pub fn step(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }

    /// `t_k = k·t_end/n`, exact at `k = n`.
    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_end
        } else {
            self.t_end * k as f64 / self.n_steps as f64
        }
    }

    /// Grid index of the last time not after `t` (up to rounding of `t` onto the grid).
    pub fn index_of(&self, t: f64) -> usize {
        let k = (t / self.t_end * self.n_steps as f64 + 1e-9).floor();
        (k.max(0.0) as usize).min(self.n_steps)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 1 {
            return Err(Error::domain("n_steps must be at least 1"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::domain(format!(
                "t_end must be positive and finite, got {}",
                self.t_end
            )));
        }
        if !(self.small_jump_cutoff > 0.0 && self.small_jump_cutoff <= 1.0) {
            return Err(Error::domain(format!(
                "small-jump cutoff must lie in (0, 1], got {}",
                self.small_jump_cutoff
            )));
        }
        Ok(())
    }
}

/// A simulated path on the time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSkeleton {
    pub times: Vec<f64>,
    pub states: Vec<f64>,
    /// `max_{j≤k} |X_{t_j} − X_{t_0}|`
    pub running_sup: Vec<f64>,
    /// Discrete jumps drawn (exact stable increments count none).
    pub jump_count: u64,
}

/// Receives each grid point of a path as it is generated.
pub trait PathObserver {
    fn observe(&mut self, k: usize, t: f64, x: f64, running_sup: f64);

    /// Ends the path early once true; checked after every observation.
    fn done(&self) -> bool {
        false
    }
}

impl<F: FnMut(usize, f64, f64, f64) + ?Sized> PathObserver for F {
    fn observe(&mut self, k: usize, t: f64, x: f64, running_sup: f64) {
        self(k, t, x, running_sup)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub path_id: u64,
    /// State and running sup at the last simulated step.
    pub final_state: f64,
    pub final_sup: f64,
    pub jump_count: u64,
}

/// The random stream of path `path_id`.
pub fn path_rng(seed: u64, path_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_id);
    rng
}

/// Whether every coefficient is constant in the state.
pub fn has_constant_triplet(spec: &ProcessSpec) -> bool {
    spec.is_state_independent() && spec.drift.is_constant() && spec.diffusion.is_constant()
}

fn run<O: PathObserver + ?Sized>(
    spec: &ProcessSpec,
    x0: f64,
    cfg: &SimConfig,
    path_id: u64,
    rng: &mut ChaCha8Rng,
    frozen: bool,
    obs: &mut O,
) -> Result<PathSummary> {
    cfg.validate()?;
    let h = cfg.step();
    let sampler_at = |x: f64| -> Result<StepSampler> {
        StepSampler::new(spec.drift_at(x), spec.diffusion_at(x), &spec.kernel_at(x)?, h, cfg)
    };
    let fixed = if frozen { None } else { Some(sampler_at(x0)?) };
    let (mut x, mut sup, mut jumps) = (x0, 0.0f64, 0u64);
    obs.observe(0, 0.0, x, 0.0);
    for k in 1..=cfg.n_steps {
        let step = match fixed {
            Some(s) => s,
            None => sampler_at(x).map_err(|e| Error::PathAborted {
                path: path_id,
                step: k,
                reason: e.to_string(),
            })?,
        };
        let (dx, n) = step.sample(rng);
        x += dx;
        jumps += n;
        if !x.is_finite() {
            return Err(Error::PathAborted {
                path: path_id,
                step: k,
                reason: format!("state became {x}"),
            });
        }
        sup = sup.max((x - x0).abs());
        obs.observe(k, cfg.time(k), x, sup);
        if obs.done() {
            break;
        }
    }
    Ok(PathSummary {
        path_id,
        final_state: x,
        final_sup: sup,
        jump_count: jumps,
    })
}

fn collect(
    cfg: &SimConfig,
    f: impl FnOnce(&mut dyn FnMut(usize, f64, f64, f64)) -> Result<PathSummary>,
) -> Result<PathSkeleton> {
    let n = cfg.n_steps + 1;
    let (mut times, mut states, mut running_sup) =
        (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let summary = f(&mut |_, t, x, s| {
        times.push(t);
        states.push(x);
        running_sup.push(s);
    })?;
    Ok(PathSkeleton {
        times,
        states,
        running_sup,
        jump_count: summary.jump_count,
    })
}

/// Exact increments of a constant-triplet spec started at 0.
pub fn simulate_levy(spec: &ProcessSpec, cfg: &SimConfig, rng: &mut ChaCha8Rng) -> Result<PathSkeleton> {
    if !has_constant_triplet(spec) {
        return Err(Error::Refused("exact Lévy stepping needs constant coefficients".into()));
    }
    collect(cfg, |obs| run(spec, 0.0, cfg, 0, rng, false, obs))
}

/// Frozen-coefficient steps from `x0`.
pub fn simulate_levy_type(spec: &ProcessSpec, x0: f64, cfg: &SimConfig, rng: &mut ChaCha8Rng) -> Result<PathSkeleton> {
    collect(cfg, |obs| run(spec, x0, cfg, 0, rng, true, obs))
}

/// Streams path `path_id` into `obs` using the configured scheme and its derived stream.
pub fn simulate_path_with<O: PathObserver + ?Sized>(
    spec: &ProcessSpec,
    x0: f64,
    cfg: &SimConfig,
    path_id: u64,
    obs: &mut O,
) -> Result<PathSummary> {
    let mut rng = path_rng(cfg.seed, path_id);
    let frozen = match cfg.scheme {
        Scheme::ExactLevy if has_constant_triplet(spec) => false,
        Scheme::ExactLevy => return Err(Error::Refused("exact Lévy stepping needs constant coefficients".into())),
        Scheme::FrozenEuler => !has_constant_triplet(spec),
    };
    run(spec, x0, cfg, path_id, &mut rng, frozen, obs)
}

/// Path `path_id` as a full skeleton.
pub fn simulate_path(spec: &ProcessSpec, x0: f64, cfg: &SimConfig, path_id: u64) -> Result<PathSkeleton> {
    collect(cfg, |obs| simulate_path_with(spec, x0, cfg, path_id, obs))
}

/// Applies `f` to every path id in parallel and returns the results in id order.
pub fn map_paths<T, F>(paths: std::ops::Range<u64>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    paths.into_par_iter().map(f).collect()
}

/// Runs `f` on a pool capped at `threads` workers (the global pool when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::mean_se;
    use crate::triplet::{Diffusion, Drift, Expr, JumpKernel, JumpLaw, StableScale};

    fn mean_of(spec: &ProcessSpec, cfg: &SimConfig, n: u64, f: impl Fn(f64) -> f64 + Sync + Send) -> (f64, f64) {
        let v = map_paths(0..n, |i| {
            simulate_path_with(spec, 0.0, cfg, i, &mut |_, _, _, _| {}).map(|s| f(s.final_state))
        })
        .unwrap();
        mean_se(&v)
    }

    #[test]
    fn brownian_second_moment() {
        let cfg = SimConfig::new(1.0, 16, 1).scheme(Scheme::ExactLevy);
        let (m, se) = mean_of(&ProcessSpec::brownian(1.0), &cfg, 100_000, |x| x * x);
        assert!((m - 1.0).abs() < 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn cauchy_half_moment_matches_quadrature() {
        // E|X_1|^{1/2} = ∫ |x|^{1/2} / (π(1 + x²)) dx = 1/cos(π/4) = √2
        let q = crate::quad::integrate_to_infinity(
            |x: f64| 2.0 * x.sqrt() / (std::f64::consts::PI * (1.0 + x * x)),
            0.0,
            &crate::quad::QuadConfig::default(),
        );
        let oracle = q.value;
        assert!((oracle - 2f64.sqrt()).abs() < 1e-6, "{q:?}");
        let spec = ProcessSpec::levy(JumpKernel::stable(1.0, StableScale::UNIT_SYMBOL));
        let cfg = SimConfig::new(1.0, 1, 2).scheme(Scheme::ExactLevy);
        let (m, se) = mean_of(&spec, &cfg, 100_000, |x| x.abs().sqrt());
        assert!((m - oracle).abs() < 3.0 * se, "{m} vs {oracle} ± {se}");
    }

    #[test]
    fn poisson_jump_count() {
        let spec = ProcessSpec::levy(JumpKernel::compound_poisson(2.0, JumpLaw::TwoPoint { a: 3.0 }));
        let cfg = SimConfig::new(1.0, 32, 3).scheme(Scheme::ExactLevy);
        let counts = map_paths(0..20_000, |i| {
            simulate_path_with(&spec, 0.0, &cfg, i, &mut |_, _, _, _| {}).map(|s| s.jump_count as f64)
        })
        .unwrap();
        let (m, se) = mean_se(&counts);
        assert!((m - 2.0).abs() < 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn skeleton_invariants_and_determinism() {
        let spec = ProcessSpec::levy(
            JumpKernel::stable(1.2, StableScale::UNIT_SYMBOL)
                .with_modulation("alpha", Expr::sinusoidal(1.2, 0.3, 1.0, 0.0)),
        );
        let cfg = SimConfig::new(1.0, 256, 42);
        let a = simulate_path(&spec, 0.0, &cfg, 5).unwrap();
        let b = simulate_path(&spec, 0.0, &cfg, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.states, simulate_path(&spec, 0.0, &cfg, 6).unwrap().states);
        assert_eq!(a.running_sup[0], 0.0);
        assert_eq!(a.times[0], 0.0);
        assert_eq!(*a.times.last().unwrap(), 1.0);
        assert!(a.times.windows(2).all(|w| w[1] > w[0]));
        assert!(a.running_sup.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let spec = ProcessSpec::levy(JumpKernel::compound_poisson(
            1.0,
            JumpLaw::Gaussian { mu: 0.3, sigma: 1.0 },
        ));
        let cfg = SimConfig::new(1.0, 64, 9);
        let run = || {
            map_paths(0..200, |i| {
                simulate_path_with(&spec, 0.0, &cfg, i, &mut |_, _, _, _| {}).map(|s| s.final_state)
            })
            .unwrap()
        };
        assert_eq!(with_threads(Some(1), run).unwrap(), with_threads(Some(3), run).unwrap());
    }

    #[test]
    fn gbm_second_moment_at_zero_drift() {
        let spec = ProcessSpec::gbm(0.0, 1.0);
        let cfg = SimConfig::with_default_grid(1.0, 4);
        let v = map_paths(0..20_000, |i| {
            simulate_path_with(&spec, 1.0, &cfg, i, &mut |_, _, _, _| {}).map(|s| (s.final_state - 1.0).powi(2))
        })
        .unwrap();
        let (m, se) = mean_se(&v);
        let oracle = std::f64::consts::E - 1.0;
        assert!((m - oracle).abs() < 3.0 * se, "{m} vs {oracle} ± {se}");
    }

    #[test]
    fn invalid_coefficients_abort_the_path() {
        // Q(x) = -x² < 0 is rejected when the path is frozen there
        let spec = ProcessSpec::new(
            Drift::Constant { value: 1.0 },
            Diffusion::ScaledSquare { sigma2: -1.0 },
            JumpKernel::none(),
        );
        let err = simulate_path(&spec, 1.0, &SimConfig::new(1.0, 4, 0), 0).unwrap_err();
        assert!(matches!(err, Error::PathAborted { step: 1, .. }), "{err}");
    }
}
