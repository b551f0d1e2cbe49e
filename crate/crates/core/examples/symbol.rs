//! Symbol values, derivatives at the origin and Blumenthal-Getoor indices.

use levy_moments::symbol::{bg_index, eval_symbol, symbol_derivative};
use levy_moments::triplet::{Expr, JumpKernel, JumpLaw, ProcessSpec, StableScale};
use std::f64::consts::PI;

fn main() -> levy_moments::Result<()> {
    // stable-like: q(x, ξ) = |ξ|^{α(x)} with α(x) = 1.2 + 0.3 sin x
    let stable_like = ProcessSpec::levy(
        JumpKernel::stable(1.2, StableScale::UNIT_SYMBOL)
            .with_modulation("alpha", Expr::sinusoidal(1.2, 0.3, 1.0, 0.0)),
    );
    for x in [0.0, PI / 2.0] {
        let q = eval_symbol(&stable_like, x, 3.0)?;
        let idx = bg_index(&stable_like, x)?;
        println!("x = {x:.3}: q(x, 3) = {:.6}, index at ∞ ≈ {:.3}", q.value, idx.beta_inf);
    }

    // ∂²q(x, 0) = Q + ∫ y² N(dy) for a jump diffusion
    let jd = ProcessSpec::new(
        levy_moments::triplet::Drift::Constant { value: 0.1 },
        levy_moments::triplet::Diffusion::Constant { value: 0.5 },
        JumpKernel::compound_poisson(2.0, JumpLaw::TwoPoint { a: 1.5 }),
    );
    let d2 = symbol_derivative(&jd, 0.0, 2, 0.0)?;
    println!("∂²q(0) = {:.6} (Q + λa² = {})", d2.value.re, 0.5 + 2.0 * 1.5 * 1.5);
    Ok(())
}
