//! Moment envelopes and the small- and large-time exponents they imply.

use levy_moments::bounds::{envelope, large_time_exponent, small_time_exponent, Regime};
use levy_moments::presets::preset;
use levy_moments::triplet::{coefficient_sups, JumpKernel, ProcessSpec, Region, StableScale};

fn main() -> levy_moments::Result<()> {
    // pure-jump bounded variation: the κ = α term t·∫|y|^α N has no hidden constant
    let cp = preset("ac6")?;
    let sups = coefficient_sups(&cp, Region::All, 0.5, 0.5)?;
    for t in [0.25, 0.5, 1.0] {
        let b = envelope(&cp, Regime::BvSmallBeta, 0.5, t, &sups)?;
        println!("{} κ=0.5 t={t}: {:.4} ({})", b.regime, b.value, b.exponent);
    }

    let stable = ProcessSpec::levy(JumpKernel::stable(1.5, StableScale::UNIT_SYMBOL));
    let small = small_time_exponent(&stable, 0.0, 0.75)?;
    let large = large_time_exponent(&stable, 1.0)?;
    println!(
        "stable 1.5: t^{:.4} as t → 0 (κ = 0.75), t^{:.4} as t → ∞ (κ = 1)",
        small.exponent, large.exponent
    );

    // the boundary κ = α picks up a logarithm
    let b = small_time_exponent(&stable, 0.0, 1.5)?;
    println!("κ = α: exponent {:.3}, log-corrected: {}", b.exponent, b.log_correction);
    Ok(())
}
