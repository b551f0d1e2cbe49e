//! The `levy-moments` command line: JSON specs in, CSV or JSON reports out.
//!
//! Every output carries a [`RunManifest`]; CSV files start with it as `# key: value` lines.
//! Exit codes: 0 success (or a passing check), 1 a failing check, 2 an inapplicable check,
//! a refused input or any other error.

mod manifest;

pub use manifest::{spec_hash, write_csv, write_json, RunManifest};

use crate::bounds::{envelope, large_time_exponent, moment_exists, small_time_exponent, MomentFunction, Regime};
use crate::error::{Error, Result};
use crate::estimate::{
    backward_moment_check, estimate_endpoint_moment, estimate_sup_moments, is_martingale, maximal_ratio_check,
    moment_growth_check, subadditivity_check, verify_large_time_slope, verify_small_time_slope, wald_check,
};
use crate::presets::preset;
use crate::simulate::{map_paths, simulate_path, with_threads, Scheme, SimConfig, SmallJumpMode, StableSampler};
use crate::symbol::{bg_index, symbol_table};
use crate::triplet::{coefficient_sups, Measure, ProcessSpec, Region};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INAPPLICABLE: i32 = 2;

/// Absolute tolerance of the index check.
const INDEX_TOLERANCE: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(
    name = "levy-moments",
    version,
    about = "Moment bounds and Monte Carlo checks for Lévy-type processes"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Spec JSON file, or `preset:ac1` .. `preset:ac10`.
    #[arg(long, global = true)]
    pub spec: Option<String>,
    /// Base seed; also read from LEVY_SEED. Overrides the config file; 0 when unset.
    #[arg(long, global = true, env = "LEVY_SEED")]
    pub seed: Option<u64>,
    /// Number of Monte Carlo paths.
    #[arg(long, global = true)]
    pub paths: Option<u64>,
    /// Time steps per unit time.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Simulation config JSON; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Envelope of a regime at the given times.
    Bound {
        #[arg(long)]
        regime: Regime,
        #[arg(long)]
        kappa: f64,
        /// Times, comma separated or `dyadic:lo:hi` for 2^lo..2^hi.
        #[arg(long, default_value = "1")]
        t: String,
        /// Outer moment order (index at ∞ for the symbol-growth regimes).
        #[arg(long)]
        alpha: f64,
        /// Inner moment order (index at 0 for the symbol-growth regimes); defaults to alpha.
        #[arg(long)]
        beta: Option<f64>,
        /// State region `lo:hi`; the whole line when omitted.
        #[arg(long)]
        region: Option<String>,
    },
    /// Path skeletons as CSV.
    Simulate {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        /// One row per path instead of one per grid point.
        #[arg(long)]
        summary: bool,
    },
    /// Sup-moment curves, or an endpoint moment with `--function`.
    Estimate {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        /// Orders of the sup moment; repeat or comma separate.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        kappa: Vec<f64>,
        #[arg(long, default_value = "0.25,0.5,1")]
        t: String,
        /// Endpoint moment of this function (`power:2`, `exp-power:0.5`, ...) at the last time.
        #[arg(long)]
        function: Option<MomentFunction>,
    },
    /// Runs one check; exit 0 pass, 1 fail, 2 inapplicable.
    Verify {
        check: Check,
        #[command(flatten)]
        params: VerifyParams,
    },
    /// Index estimates at states, or a symbol table with `--xi`.
    Index {
        #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
        x: Vec<f64>,
        /// Frequencies for a `(ξ, Re q, Im q)` table at the first state.
        #[arg(long)]
        xi: Option<String>,
    },
    /// Validation, coefficient sups, indices, exponents and moment existence for a spec.
    Report {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        x0: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1")]
        kappa: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    SlopeSmall,
    SlopeLarge,
    Wald,
    Subadd,
    Backward,
    Maximal,
    Growth,
    BgIndex,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyParams {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Times; each check has its own default.
    #[arg(long)]
    pub t: Option<String>,
    /// Interval half-width (wald).
    #[arg(long, default_value_t = 5.0)]
    pub a: f64,
    /// Stopping horizon (wald) or end time (backward).
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Ball radius (maximal).
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Half the even moment order (growth).
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Moment function (backward).
    #[arg(long)]
    pub function: Option<MomentFunction>,
    /// Moment order (subadd).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Start points sampled for the sup over x (subadd).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub xs: Option<Vec<f64>>,
    /// Number of seeds for the stability test (backward).
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    /// Expected index at ∞ (bg-index); derived from the process when omitted.
    #[arg(long)]
    pub expected: Option<f64>,
}

/// Simulation settings read from `--config`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub steps_per_unit: Option<usize>,
    pub paths: Option<u64>,
    pub seed: Option<u64>,
    pub small_jump_cutoff: Option<f64>,
    pub small_jump_mode: Option<SmallJumpMode>,
    pub scheme: Option<Scheme>,
    pub stable_sampler: Option<StableSampler>,
}

/// Resolved settings shared by the simulation-backed commands.
#[derive(Debug, Clone, Serialize)]
struct Settings {
    steps_per_unit: usize,
    paths: u64,
    seed: u64,
    small_jump_cutoff: f64,
    small_jump_mode: SmallJumpMode,
    scheme: Scheme,
    stable_sampler: StableSampler,
}

impl Settings {
    fn resolve(common: &Common, default_paths: u64) -> Result<Self> {
        let file: RunConfig = match &common.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                let de = &mut serde_json::Deserializer::from_str(&text);
                serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
                    path: e.path().to_string(),
                    message: e.into_inner().to_string(),
                })?
            }
            None => RunConfig::default(),
        };
        let defaults = SimConfig::new(1.0, 1, 0);
        Ok(Settings {
            steps_per_unit: common
                .steps
                .or(file.steps_per_unit)
                .unwrap_or(crate::simulate::STEPS_PER_UNIT),
            paths: common.paths.or(file.paths).unwrap_or(default_paths),
            seed: common.seed.or(file.seed).unwrap_or(0),
            small_jump_cutoff: file.small_jump_cutoff.unwrap_or(defaults.small_jump_cutoff),
            small_jump_mode: file.small_jump_mode.unwrap_or(defaults.small_jump_mode),
            scheme: file.scheme.unwrap_or(defaults.scheme),
            stable_sampler: file.stable_sampler.unwrap_or(defaults.stable_sampler),
        })
    }

    /// A grid covering `[0, t_end]` at the configured density.
    fn sim(&self, t_end: f64) -> SimConfig {
        let n = ((t_end * self.steps_per_unit as f64).ceil() as usize).max(1);
        SimConfig::new(t_end, n, self.seed)
            .scheme(self.scheme)
            .small_jumps(self.small_jump_cutoff, self.small_jump_mode)
            .stable_sampler(self.stable_sampler)
    }

    fn json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("settings serialize")
    }
}

/// Comma-separated numbers, or `dyadic:lo:hi` for `2^lo, …, 2^hi`.
pub fn parse_times(s: &str) -> Result<Vec<f64>> {
    if let Some(rest) = s.trim().strip_prefix("dyadic:") {
        let (lo, hi) = rest
            .split_once(':')
            .ok_or_else(|| Error::domain(format!("expected dyadic:lo:hi, got `{s}`")))?;
        let (lo, hi): (i32, i32) = (
            lo.trim().parse().map_err(|e| Error::domain(format!("`{s}`: {e}")))?,
            hi.trim().parse().map_err(|e| Error::domain(format!("`{s}`: {e}")))?,
        );
        if lo > hi {
            return Err(Error::domain(format!("empty dyadic range `{s}`")));
        }
        return Ok((lo..=hi).map(|j| 2f64.powi(j)).collect());
    }
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| Error::domain(format!("bad number `{p}`: {e}")))
        })
        .collect()
}

fn parse_region(s: Option<&str>) -> Result<Region> {
    match s {
        None => Ok(Region::All),
        Some(r) => {
            let (lo, hi) = r
                .split_once(':')
                .ok_or_else(|| Error::domain(format!("expected lo:hi, got `{r}`")))?;
            let lo: f64 = lo.trim().parse().map_err(|e| Error::domain(format!("`{r}`: {e}")))?;
            let hi: f64 = hi.trim().parse().map_err(|e| Error::domain(format!("`{r}`: {e}")))?;
            Ok(Region::interval(lo, hi))
        }
    }
}

/// A spec file path or a `preset:` key.
pub fn load_spec(arg: Option<&str>) -> Result<ProcessSpec> {
    let arg = arg.ok_or_else(|| Error::InvalidSpec("--spec is required".into()))?;
    match arg.strip_prefix("preset:") {
        Some(key) => preset(key),
        None => ProcessSpec::from_file(Path::new(arg)),
    }
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

/// Parses `args` and runs the command, returning the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INAPPLICABLE } else { EXIT_PASS };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INAPPLICABLE
        }
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<i32> {
    let threads = cli.common.threads;
    with_threads(threads, || dispatch(cli))?
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let c = &cli.common;
    let started = Instant::now();
    let spec = load_spec(c.spec.as_deref())?;
    let out = c.out.as_deref();
    match &cli.command {
        Command::Bound {
            regime,
            kappa,
            t,
            alpha,
            beta,
            region,
        } => {
            let times = parse_times(t)?;
            let region = parse_region(region.as_deref())?;
            let sups = coefficient_sups(&spec, region, *alpha, beta.unwrap_or(*alpha))?;
            let bounds = times
                .iter()
                .map(|&t| envelope(&spec, *regime, *kappa, t, &sups))
                .collect::<Result<Vec<_>>>()?;
            let cfg = serde_json::json!({ "regime": regime, "kappa": kappa, "alpha": alpha, "beta": beta.unwrap_or(*alpha), "region": region });
            let m = RunManifest::new("bound", &spec, cfg, c.seed.unwrap_or(0), None).finish(started);
            match c.format.unwrap_or(Format::Json) {
                Format::Json => write_json(out, &m, &bounds)?,
                Format::Csv => {
                    let rows: Vec<Vec<String>> = bounds
                        .iter()
                        .map(|b| vec![fmt(b.t), fmt(b.value), fmt(b.shape), b.symbolic_constant.to_string()])
                        .collect();
                    write_csv(out, &m, &["t", "value", "shape", "symbolic_constant"], &rows)?
                }
            }
            Ok(EXIT_PASS)
        }
        Command::Simulate { x0, t_end, summary } => {
            let s = Settings::resolve(c, 10)?;
            let cfg = s.sim(*t_end);
            let paths = map_paths(0..s.paths, |i| simulate_path(&spec, *x0, &cfg, i))?;
            let mut j = s.json();
            j["x0"] = serde_json::json!(x0);
            j["t_end"] = serde_json::json!(t_end);
            let m = RunManifest::new("simulate", &spec, j, s.seed, Some(s.paths)).finish(started);
            if c.format == Some(Format::Json) {
                write_json(out, &m, &paths)?;
            } else if *summary {
                let rows: Vec<Vec<String>> = paths
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let last = p.states.len() - 1;
                        vec![
                            i.to_string(),
                            fmt(p.states[last]),
                            fmt(p.running_sup[last]),
                            p.jump_count.to_string(),
                        ]
                    })
                    .collect();
                write_csv(out, &m, &["path_id", "x_end", "running_sup", "jump_count"], &rows)?;
            } else {
                let rows: Vec<Vec<String>> = paths
                    .iter()
                    .enumerate()
                    .flat_map(|(i, p)| {
                        (0..p.times.len())
                            .map(move |k| vec![i.to_string(), fmt(p.times[k]), fmt(p.states[k]), fmt(p.running_sup[k])])
                    })
                    .collect();
                write_csv(out, &m, &["path_id", "t", "x", "running_sup"], &rows)?;
            }
            Ok(EXIT_PASS)
        }
        Command::Estimate { x0, kappa, t, function } => {
            let s = Settings::resolve(c, 10_000)?;
            let times = parse_times(t)?;
            let t_max = times.iter().cloned().fold(0.0, f64::max);
            let cfg = s.sim(t_max);
            let mut j = s.json();
            j["x0"] = serde_json::json!(x0);
            j["t"] = serde_json::json!(times);
            match function {
                Some(f) => {
                    j["function"] = serde_json::json!(f);
                    let e = estimate_endpoint_moment(&spec, *x0, *f, t_max, s.paths, &cfg)?;
                    let m = RunManifest::new("estimate", &spec, j, s.seed, Some(s.paths)).finish(started);
                    match c.format.unwrap_or(Format::Csv) {
                        Format::Json => write_json(out, &m, &e)?,
                        Format::Csv => write_csv(
                            out,
                            &m,
                            &["function", "t", "estimate", "se", "flagged"],
                            &[vec![
                                f.label().replace(',', ";"),
                                fmt(e.t),
                                fmt(e.value),
                                fmt(e.std_error),
                                e.flagged.to_string(),
                            ]],
                        )?,
                    }
                }
                None => {
                    j["kappa"] = serde_json::json!(kappa);
                    let curves = estimate_sup_moments(&spec, *x0, kappa, &times, s.paths, &cfg)?;
                    let m = RunManifest::new("estimate", &spec, j, s.seed, Some(s.paths)).finish(started);
                    match c.format.unwrap_or(Format::Csv) {
                        Format::Json => write_json(out, &m, &curves)?,
                        Format::Csv => {
                            let rows: Vec<Vec<String>> = curves
                                .iter()
                                .flat_map(|cv| {
                                    cv.rows().map(move |(t, e, se)| {
                                        vec![fmt(cv.kappa), fmt(t), fmt(e), fmt(se), cv.non_convergent.to_string()]
                                    })
                                })
                                .collect();
                            write_csv(out, &m, &["kappa", "t", "estimate", "se", "non_convergent"], &rows)?
                        }
                    }
                }
            }
            Ok(EXIT_PASS)
        }
        Command::Verify { check, params } => {
            let s = Settings::resolve(c, 10_000)?;
            let mut j = s.json();
            j["check"] = serde_json::json!(check);
            let outcome = verify(&spec, *check, params, &s);
            let (code, report) = match outcome {
                Ok((pass, details)) => (
                    if pass { EXIT_PASS } else { EXIT_FAIL },
                    serde_json::json!({ "check": check, "pass": pass, "details": details }),
                ),
                Err(e) if inapplicable(&e) => (
                    EXIT_INAPPLICABLE,
                    serde_json::json!({ "check": check, "pass": null, "inapplicable": e.to_string() }),
                ),
                Err(e) => return Err(e),
            };
            let m = RunManifest::new("verify", &spec, j, s.seed, Some(s.paths)).finish(started);
            write_json(out, &m, &report)?;
            let verdict = match code {
                EXIT_PASS => "PASS",
                EXIT_FAIL => "FAIL",
                _ => "INAPPLICABLE",
            };
            eprintln!(
                "{verdict} {}",
                serde_json::to_string(check).unwrap_or_default().trim_matches('"')
            );
            Ok(code)
        }
        Command::Index { x, xi } => {
            let m = RunManifest::new(
                "index",
                &spec,
                serde_json::json!({ "x": x, "xi": xi }),
                c.seed.unwrap_or(0),
                None,
            );
            match xi {
                Some(xi) => {
                    let xis = parse_times(xi)?;
                    let table = symbol_table(&spec, x[0], &xis)?;
                    let m = m.finish(started);
                    match c.format.unwrap_or(Format::Csv) {
                        Format::Json => write_json(out, &m, &table)?,
                        Format::Csv => {
                            let rows: Vec<Vec<String>> = table
                                .iter()
                                .map(|v| vec![fmt(v.xi), fmt(v.value.re), fmt(v.value.im)])
                                .collect();
                            write_csv(out, &m, &["xi", "re_q", "im_q"], &rows)?
                        }
                    }
                }
                None => {
                    let est = x.iter().map(|&x| bg_index(&spec, x)).collect::<Result<Vec<_>>>()?;
                    let m = m.finish(started);
                    match c.format.unwrap_or(Format::Json) {
                        Format::Json => write_json(out, &m, &est)?,
                        Format::Csv => {
                            let rows: Vec<Vec<String>> = est
                                .iter()
                                .map(|e| vec![fmt(e.x), fmt(e.beta0), fmt(e.beta_inf), e.poor_fit.to_string()])
                                .collect();
                            write_csv(out, &m, &["x", "beta0", "beta_inf", "poor_fit"], &rows)?
                        }
                    }
                }
            }
            Ok(EXIT_PASS)
        }
        Command::Report { x0, kappa } => {
            let r = report(&spec, *x0, kappa)?;
            let m = RunManifest::new(
                "report",
                &spec,
                serde_json::json!({ "x0": x0, "kappa": kappa }),
                c.seed.unwrap_or(0),
                None,
            )
            .finish(started);
            if c.format == Some(Format::Csv) {
                return Err(Error::domain("report is JSON only"));
            }
            write_json(out, &m, &r)?;
            Ok(EXIT_PASS)
        }
    }
}

fn inapplicable(e: &Error) -> bool {
    matches!(
        e,
        Error::Refused(_)
            | Error::RegimeInapplicable { .. }
            | Error::OutsideGuaranteedRange { .. }
            | Error::KappaOutOfRange { .. }
            | Error::NonConvergent
            | Error::MomentDoesNotExist { .. }
            | Error::GrowthHypothesis(_)
            | Error::UnsupportedFunction(_)
            | Error::InsufficientGrid(_)
    )
}

/// The index at ∞ the process is built to have at `x`.
pub fn nominal_index_at_infinity(spec: &ProcessSpec, x: f64) -> Result<f64> {
    if spec.diffusion_at(x) > 0.0 {
        return Ok(2.0);
    }
    Ok(match spec.measure_at(x)? {
        Measure::Stable { alpha, .. } | Measure::Tempered { alpha, .. } => alpha,
        Measure::Poisson { .. } | Measure::Zero => 0.0,
    })
}

fn need<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::domain(format!("this check needs --{what}")))
}

fn verify(spec: &ProcessSpec, check: Check, p: &VerifyParams, s: &Settings) -> Result<(bool, serde_json::Value)> {
    let times = |default: &str| parse_times(p.t.as_deref().unwrap_or(default));
    let tmax = |t: &[f64]| t.iter().cloned().fold(0.0, f64::max);
    let tmin = |t: &[f64]| t.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(match check {
        Check::SlopeSmall | Check::SlopeLarge => {
            let kappa = need(p.kappa, "kappa")?;
            let t = times(if check == Check::SlopeSmall {
                "dyadic:-10:-4"
            } else {
                "dyadic:0:6"
            })?;
            let curve = estimate_sup_moments(spec, p.x0, &[kappa], &t, s.paths, &s.sim(tmax(&t)))?.remove(0);
            let window = (tmin(&t), tmax(&t));
            let (fit, e) = if check == Check::SlopeSmall {
                verify_small_time_slope(spec, &curve, window)?
            } else {
                verify_large_time_slope(spec, &curve, window)?
            };
            (
                fit.pass == Some(true),
                serde_json::json!({ "fit": fit, "exponent": serde_json::to_value(&e)?, "curve": curve }),
            )
        }
        Check::Wald => {
            let horizon = p.horizon.unwrap_or(10.0);
            let w = wald_check(spec, p.x0, p.a, horizon, s.paths, &s.sim(horizon))?;
            (w.pass, serde_json::to_value(&w)?)
        }
        Check::Subadd => {
            let alpha = need(p.alpha.or(p.kappa), "alpha")?;
            let t = times("0.25,0.5,1")?;
            let xs = p.xs.clone().unwrap_or_else(|| vec![p.x0]);
            let r = subadditivity_check(spec, alpha, &t, &xs, s.paths, &s.sim(2.0 * tmax(&t)))?;
            (r.pass, serde_json::to_value(&r)?)
        }
        Check::Backward => {
            let f = need(p.function, "function")?;
            let t_end = p.horizon.unwrap_or(1.0);
            let grid: Vec<f64> = times("0.125,0.25,0.5,1")?.into_iter().filter(|&x| x <= t_end).collect();
            let seeds: Vec<u64> = (0..p.seeds).map(|i| s.seed.wrapping_add(i)).collect();
            let r = backward_moment_check(spec, f, p.x0, t_end, &grid, &seeds, s.paths, &s.sim(t_end))?;
            (r.pass, serde_json::to_value(&r)?)
        }
        Check::Maximal => {
            let t = times("dyadic:-10:-4")?;
            let r = maximal_ratio_check(spec, p.x0, p.r, &t, s.paths, &s.sim(tmax(&t)))?;
            (r.bounded, serde_json::to_value(&r)?)
        }
        Check::Growth => {
            let t = times("dyadic:-8:-2")?;
            let r = moment_growth_check(spec, p.x0, p.n, &t, s.paths, &s.sim(tmax(&t)))?;
            (r.pass, serde_json::to_value(&r)?)
        }
        Check::BgIndex => {
            let e = bg_index(spec, p.x0)?;
            let expected = match p.expected {
                Some(v) => v,
                None => nominal_index_at_infinity(spec, p.x0)?,
            };
            let pass = (e.beta_inf - expected).abs() <= INDEX_TOLERANCE;
            (
                pass,
                serde_json::json!({ "expected_beta_inf": expected, "tolerance": INDEX_TOLERANCE, "estimate": e }),
            )
        }
    })
}

#[derive(Debug, Serialize)]
struct SpecReport {
    spec: ProcessSpec,
    spec_hash: String,
    state_independent: bool,
    martingale: bool,
    coefficient_sups: Option<crate::triplet::CoefficientSups>,
    index: Option<crate::symbol::BgIndexEstimate>,
    exponents: Vec<serde_json::Value>,
    existence: Vec<serde_json::Value>,
}

fn report(spec: &ProcessSpec, x0: f64, kappas: &[f64]) -> Result<SpecReport> {
    let or_note = |r: Result<serde_json::Value>| r.unwrap_or_else(|e| serde_json::json!({ "error": e.to_string() }));
    let exponents = kappas
        .iter()
        .map(|&k| {
            serde_json::json!({
                "kappa": k,
                "small_time": or_note(small_time_exponent(spec, x0, k).map(|e| serde_json::json!({ "exponent": e.exponent, "index": e.index, "log_correction": e.log_correction }))),
                "large_time": or_note(large_time_exponent(spec, k).map(|e| serde_json::json!({ "exponent": e.exponent, "index": e.index }))),
            })
        })
        .collect();
    let catalog = [
        MomentFunction::One,
        MomentFunction::PowerOrOne { p: 1.0 },
        MomentFunction::PowerOrOne { p: 2.0 },
        MomentFunction::ExpPower { beta: 0.5 },
        MomentFunction::LogOrE,
        MomentFunction::Exponential { zeta: 1.0 },
    ];
    let existence = catalog
        .iter()
        .map(|&f| {
            let r = moment_exists(spec, f, Region::All).map(
                |m| serde_json::json!({ "function": f.label(), "exists": m.exists, "m2": m.m2, "reason": m.reason }),
            );
            or_note(r)
        })
        .collect();
    Ok(SpecReport {
        spec_hash: spec_hash(spec),
        state_independent: spec.is_state_independent(),
        martingale: is_martingale(spec),
        coefficient_sups: coefficient_sups(spec, Region::All, 1.0, 2.0).ok(),
        index: bg_index(spec, x0).ok(),
        exponents,
        existence,
        spec: spec.clone(),
    })
}
