//! Sup-moment curves and log-log slope fits against the predicted exponents.

use levy_moments::estimate::{estimate_sup_moments, verify_small_time_slope};
use levy_moments::presets::preset;
use levy_moments::simulate::SimConfig;

fn main() -> levy_moments::Result<()> {
    let spec = preset("ac4")?;
    let grid: Vec<f64> = (-10..=-4).map(|j| 2f64.powi(j)).collect();
    let cfg = SimConfig::new(grid[grid.len() - 1], 256, 7);
    let curves = estimate_sup_moments(&spec, 0.0, &[0.5, 0.75], &grid, 20_000, &cfg)?;

    for c in &curves {
        let (fit, e) = verify_small_time_slope(&spec, c, (grid[0], grid[grid.len() - 1]))?;
        println!(
            "κ = {}: slope {:.3} vs predicted {:.3} (pass: {:?})",
            c.kappa, fit.slope, e.exponent, fit.pass
        );
        for (t, m, se) in c.rows() {
            println!("  t = {t:.5}  Ê sup^κ = {m:.5} ± {se:.5}");
        }
    }
    Ok(())
}
