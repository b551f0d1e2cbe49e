//! Acceptance suite: one PASS/FAIL line per criterion, then a single assertion over all of them.
//!
//! Runs without the test harness so the report is always printed: `cargo test --test acceptance`.

use levy_moments::bounds::{envelope, MomentFunction, Regime};
use levy_moments::estimate::{
    estimate_endpoint_moment, estimate_sup_moment, estimate_sup_moments, subadditivity_check, verify_large_time_slope,
    verify_small_time_slope, wald_check,
};
use levy_moments::presets::{preset, PRESETS};
use levy_moments::simulate::{simulate_path, SimConfig};
use levy_moments::symbol::{bg_index, eval_symbol, symbol_derivative};
use levy_moments::triplet::{
    coefficient_sups, Compensation, Diffusion, Drift, Family, JumpKernel, JumpLaw, ProcessSpec, Region, StableScale,
};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use std::time::Instant;

const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dyadic(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|j| 2f64.powi(j)).collect()
}

/// Second-moment specs with an independent closed form for `Q + ∫y²N`.
fn second_moment_catalog() -> Vec<(&'static str, ProcessSpec, f64)> {
    let (c, a, lam): (f64, f64, f64) = (0.8, 0.7, 1.5);
    let tempered = 2.0 * c * gamma(2.0 - a) * lam.powf(a - 2.0);
    let (ct, at, r): (f64, f64, f64) = (1.0, 1.3, 1.5);
    let truncated = 2.0 * ct * r.powf(2.0 - at) / (2.0 - at);
    vec![
        ("brownian", ProcessSpec::brownian(1.7), 1.7),
        (
            "tempered",
            ProcessSpec::levy(JumpKernel::tempered(a, StableScale::Density(c), lam)),
            tempered,
        ),
        (
            "tempered-full",
            ProcessSpec::levy(
                JumpKernel::tempered(a, StableScale::Density(c), lam).with_compensation(Compensation::Full),
            ),
            tempered,
        ),
        (
            "truncated-stable",
            ProcessSpec::levy(JumpKernel::new(Family::SymmetricStable {
                alpha: at,
                scale: StableScale::Density(ct),
                truncate: Some(r),
            })),
            truncated,
        ),
        (
            "cp-gaussian",
            ProcessSpec::levy(JumpKernel::compound_poisson(
                1.5,
                JumpLaw::Gaussian { mu: 0.4, sigma: 0.8 },
            )),
            1.5 * (0.16 + 0.64),
        ),
        (
            "cp-two-point",
            ProcessSpec::levy(JumpKernel::compound_poisson(2.0, JumpLaw::TwoPoint { a: 3.0 })),
            18.0,
        ),
        (
            "cp-uniform",
            ProcessSpec::levy(JumpKernel::compound_poisson(1.5, JumpLaw::Uniform { a: 2.0 })),
            1.5 * 4.0 / 3.0,
        ),
        (
            "jump-diffusion",
            ProcessSpec::new(
                Drift::Constant { value: 0.3 },
                Diffusion::Constant { value: 0.5 },
                JumpKernel::compound_poisson(2.0, JumpLaw::Gaussian { mu: -0.6, sigma: 1.3 })
                    .with_compensation(Compensation::None),
            ),
            0.5 + 2.0 * (0.36 + 1.69),
        ),
    ]
}

fn ac1() -> Outcome {
    let spec = preset("ac1").map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for i in 0..100 {
        let x = -PI + 2.0 * PI * i as f64 / 99.0;
        let alpha = 1.2 + 0.3 * x.sin();
        for j in 0..100 {
            let xi = 10f64.powf(-3.0 + 6.0 * j as f64 / 99.0) * if j % 2 == 0 { 1.0 } else { -1.0 };
            let exact = xi.abs().powf(alpha);
            let v = eval_symbol(&spec, x, xi).map_err(|e| e.to_string())?.value;
            let err = (v.re - exact).abs().max(v.im.abs()) / exact.max(1.0);
            worst = worst.max(err);
        }
    }
    check(worst <= 1e-10, format!("max error {worst:.2e} on 100×100 grid"))
}

fn ac2() -> Outcome {
    let h = 1e-3;
    let mut worst_rel = 0.0f64;
    let mut worst_fd = 0.0f64;
    let mut ok = true;
    for (name, spec, exact) in second_moment_catalog() {
        let d2 = symbol_derivative(&spec, 0.0, 2, 0.0)
            .map_err(|e| format!("{name}: {e}"))?
            .value;
        let rel = (d2.re - exact).abs().max(d2.im.abs()) / exact;
        worst_rel = worst_rel.max(rel);
        let m4 = symbol_derivative(&spec, 0.0, 4, 0.0)
            .map_err(|e| format!("{name}: {e}"))?
            .value
            .norm();
        let q = |xi: f64| eval_symbol(&spec, 0.0, xi).unwrap().value.re;
        let fd = (q(h) - 2.0 * q(0.0) + q(-h)) / (h * h);
        // the leading error term is h²·∫y⁴N/12
        let tol = h * h * (m4 / 6.0 + 1.0);
        worst_fd = worst_fd.max((fd - d2.re).abs() / tol);
        ok &= rel <= 1e-8 && (fd - d2.re).abs() <= tol;
    }
    check(
        ok,
        format!("max relative error {worst_rel:.2e}, max |fd − q''|/tol {worst_fd:.3}"),
    )
}

fn ac3() -> Outcome {
    let tol = 0.05;
    let mut rows = Vec::new();
    let mut ok = true;
    for alpha in [0.5, 1.0, 1.5] {
        let spec = ProcessSpec::levy(JumpKernel::stable(alpha, StableScale::UNIT_SYMBOL));
        let e = bg_index(&spec, 0.0).map_err(|e| e.to_string())?;
        ok &= (e.beta0 - alpha).abs() <= tol && (e.beta_inf - alpha).abs() <= tol;
        rows.push(format!("stable {alpha}: ({:.3}, {:.3})", e.beta0, e.beta_inf));
    }
    let sl = preset("ac3").map_err(|e| e.to_string())?;
    for x in [0.0, PI / 2.0, PI] {
        let e = bg_index(&sl, x).map_err(|e| e.to_string())?;
        let expected = 1.2 + 0.3 * f64::sin(x);
        ok &= (e.beta_inf - expected).abs() <= tol;
        rows.push(format!("stable-like x={x:.3}: β∞ {:.3} vs {expected:.3}", e.beta_inf));
    }
    let e = bg_index(&ProcessSpec::brownian(1.0), 0.0).map_err(|e| e.to_string())?;
    ok &= (e.beta0 - 2.0).abs() <= tol && (e.beta_inf - 2.0).abs() <= tol;
    rows.push(format!("brownian: ({:.3}, {:.3})", e.beta0, e.beta_inf));
    check(ok, rows.join("; "))
}

fn ac4() -> Outcome {
    let spec = preset("ac4").map_err(|e| e.to_string())?;
    let grid = dyadic(-10, -4);
    let cfg = SimConfig::new(grid[grid.len() - 1], 256, SEED);
    let curve = estimate_sup_moment(&spec, 0.0, 0.75, &grid, 100_000, &cfg).map_err(|e| e.to_string())?;
    let (fit, e) =
        verify_small_time_slope(&spec, &curve, (grid[0], grid[grid.len() - 1])).map_err(|e| e.to_string())?;
    check(
        (fit.slope - 0.5).abs() <= 0.07 && fit.pass == Some(true),
        format!(
            "slope {:.4} (predicted {:.4}, target 0.5 ± 0.07), 10^5 paths, 2^12 steps/unit",
            fit.slope, e.exponent
        ),
    )
}

fn ac5() -> Outcome {
    let spec = preset("ac5").map_err(|e| e.to_string())?;
    let grid = dyadic(0, 6);
    // 16 steps per unit: the grid sup bias shrinks as steps are added (see README)
    let cfg = SimConfig::new(64.0, 64 * 16, SEED);
    let curve = estimate_sup_moment(&spec, 0.0, 1.0, &grid, 20_000, &cfg).map_err(|e| e.to_string())?;
    let (fit, e) = verify_large_time_slope(&spec, &curve, (1.0, 64.0)).map_err(|e| e.to_string())?;
    check(
        (fit.slope - 2.0 / 3.0).abs() <= 0.07,
        format!(
            "slope {:.4} (predicted {:.4}, target 2/3 ± 0.07), 2·10^4 paths, 16 steps/unit",
            fit.slope, e.exponent
        ),
    )
}

fn ac6() -> Outcome {
    let spec = preset("ac6").map_err(|e| e.to_string())?;
    let sups = coefficient_sups(&spec, Region::All, 0.5, 0.5).map_err(|e| e.to_string())?;
    let grid = dyadic(-8, 0);
    let cfg = SimConfig::new(1.0, 1 << 10, SEED);
    let curve = estimate_sup_moment(&spec, 0.0, 0.5, &grid, 100_000, &cfg).map_err(|e| e.to_string())?;
    let mut worst = f64::NEG_INFINITY;
    for (t, est, se) in curve.rows() {
        let bound = envelope(&spec, Regime::BvSmallBeta, 0.5, t, &sups).map_err(|e| e.to_string())?;
        worst = worst.max((est - bound.value) / se.max(f64::MIN_POSITIVE));
    }
    check(
        worst <= 3.0,
        format!(
            "M = {:.4}, max (Ê − t·M)/SE = {worst:.2} over 9 dyadic times",
            sups.all_alpha
        ),
    )
}

fn ac7() -> Outcome {
    let spec = preset("ac7").map_err(|e| e.to_string())?;
    let cfg = SimConfig::new(1.0, 1 << 12, SEED);
    let start = Instant::now();
    let m = estimate_endpoint_moment(&spec, 1.0, MomentFunction::Power { p: 2.0 }, 1.0, 100_000, &cfg)
        .map_err(|e| e.to_string())?;
    let exact = std::f64::consts::E - 1.0;
    let err = (m.value - exact).abs();
    check(
        err <= 3.0 * m.std_error && err <= 0.05 * exact,
        format!(
            "Ê = {:.4} ± {:.4} vs e−1 = {exact:.4} in {:.1}s",
            m.value,
            m.std_error,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn ac8() -> Outcome {
    let spec = preset("ac8").map_err(|e| e.to_string())?;
    let cfg = SimConfig::new(10.0, 10 * 16, SEED);
    let w = wald_check(&spec, 0.0, 5.0, 10.0, 100_000, &cfg).map_err(|e| e.to_string())?;
    check(
        w.pass && w.mean.abs() <= 3.0 * w.std_error,
        format!(
            "mean X(τ∧T) = {:.4} ± {:.4}, stopped fraction {:.3}",
            w.mean, w.std_error, w.stopped_fraction
        ),
    )
}

fn ac9() -> Outcome {
    let spec = preset("ac9").map_err(|e| e.to_string())?;
    let cfg = SimConfig::new(2.0, 2 << 10, SEED);
    let s = subadditivity_check(&spec, 0.5, &[0.25, 0.5, 1.0], &[0.0], 20_000, &cfg).map_err(|e| e.to_string())?;
    check(
        s.pass && s.worst_violation <= 3.0 * s.combined_se,
        format!(
            "worst violation {:.4} at {:?}, 3·combined SE {:.4}",
            s.worst_violation,
            s.worst_pair,
            3.0 * s.combined_se
        ),
    )
}

fn ac10() -> Outcome {
    let mut specs: Vec<(String, ProcessSpec)> = PRESETS
        .iter()
        .map(|(k, _)| (k.to_string(), preset(k).unwrap()))
        .collect();
    specs.extend(second_moment_catalog().into_iter().map(|(n, s, _)| (n.to_string(), s)));
    specs.push((
        "stable".into(),
        ProcessSpec::levy(JumpKernel::stable(0.7, StableScale::Density(0.4))),
    ));
    specs.push(("gbm-drift".into(), ProcessSpec::gbm(0.3, 0.6)));
    let grid = dyadic(-4, 0);
    let mut failures = Vec::new();
    for (name, spec) in &specs {
        let x0 = if name == "ac7" || name == "gbm-drift" { 1.0 } else { 0.0 };
        for x in [-2.0, 0.0, 0.5, PI] {
            if !eval_symbol(spec, x, 0.0).is_ok_and(|v| v.value.re == 0.0 && v.value.im == 0.0) {
                failures.push(format!("{name}: q({x}, 0) ≠ 0"));
            }
        }
        let cfg = SimConfig::new(1.0, 64, SEED);
        let a = simulate_path(spec, x0, &cfg, 3);
        let b = simulate_path(spec, x0, &cfg, 3);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
                if bits(&a.states) != bits(&b.states) || bits(&a.running_sup) != bits(&b.running_sup) {
                    failures.push(format!("{name}: skeletons differ"));
                }
            }
            _ => failures.push(format!("{name}: simulation failed")),
        }
        match estimate_sup_moments(spec, x0, &[0.0, 0.5, 1.0, 2.0], &grid, 400, &cfg) {
            Ok(curves) => {
                for c in &curves {
                    if !c.is_nondecreasing() {
                        failures.push(format!("{name}: κ={} curve decreases", c.kappa));
                    }
                }
                if curves[0].estimates.iter().any(|&v| v != 1.0) || curves[0].std_errors.iter().any(|&s| s != 0.0) {
                    failures.push(format!("{name}: κ=0 curve is not exactly 1"));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "{} specs: bit-identical skeletons, monotone curves, κ=0 ≡ 1, q(x,0) = 0",
                specs.len()
            )
        } else {
            failures.join("; ")
        },
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1 symbol of the stable-like process", ac1),
        ("AC2 second derivative at zero", ac2),
        ("AC3 Blumenthal-Getoor indices", ac3),
        ("AC4 small-time exponent", ac4),
        ("AC5 large-time exponent", ac5),
        ("AC6 explicit-constant dominance", ac6),
        ("AC7 GBM endpoint moment", ac7),
        ("AC8 Wald identity", ac8),
        ("AC9 subadditivity", ac9),
        ("AC10 determinism and monotonicity", ac10),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(d) => println!("PASS {name}: {d} [{secs:.1}s]"),
            Err(d) => {
                println!("FAIL {name}: {d} [{secs:.1}s]");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
