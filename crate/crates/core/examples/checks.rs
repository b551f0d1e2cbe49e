//! Statistical checks: optional stopping, subadditivity, the maximal inequality and moment growth.

use levy_moments::estimate::{maximal_ratio_check, moment_growth_check, subadditivity_check, wald_check};
use levy_moments::presets::preset;
use levy_moments::simulate::SimConfig;

fn main() -> levy_moments::Result<()> {
    let martingale = preset("ac8")?;
    let w = wald_check(&martingale, 0.0, 5.0, 10.0, 20_000, &SimConfig::new(10.0, 160, 1))?;
    println!(
        "wald: mean X(τ∧T) = {:.4} ± {:.4}, pass {}",
        w.mean, w.std_error, w.pass
    );

    let stable = preset("ac9")?;
    let s = subadditivity_check(
        &stable,
        0.5,
        &[0.25, 0.5, 1.0],
        &[0.0],
        10_000,
        &SimConfig::new(2.0, 512, 2),
    )?;
    println!(
        "subadditivity: worst violation {:.4} (3 SE {:.4}), pass {}",
        s.worst_violation,
        3.0 * s.combined_se,
        s.pass
    );

    let grid: Vec<f64> = (-10..=-4).map(|j| 2f64.powi(j)).collect();
    let m = maximal_ratio_check(&stable, 0.0, 1.0, &grid, 10_000, &SimConfig::new(grid[6], 256, 3))?;
    println!(
        "maximal: empirical constant {:.3}, bounded {}",
        m.empirical_constant, m.bounded
    );

    let cp = preset("ac8")?;
    let grid: Vec<f64> = (-8..=-2).map(|j| 2f64.powi(j)).collect();
    let g = moment_growth_check(&cp, 0.0, 1, &grid, 20_000, &SimConfig::new(grid[6], 64, 4))?;
    println!("growth: slope {:.3}, pass {}", g.fit.slope, g.pass);
    Ok(())
}
