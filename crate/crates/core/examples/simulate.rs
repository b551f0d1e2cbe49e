//! Seeded path skeletons for a Lévy-type process.

use levy_moments::presets::preset;
use levy_moments::simulate::{map_paths, simulate_path, SimConfig};

fn main() -> levy_moments::Result<()> {
    let spec = preset("ac1")?;
    let cfg = SimConfig::new(1.0, 256, 42);
    let paths = map_paths(0..1_000, |i| simulate_path(&spec, 0.0, &cfg, i))?;

    let sups: Vec<f64> = paths.iter().map(|p| *p.running_sup.last().unwrap()).collect();
    let mean_sup = sups.iter().sum::<f64>() / sups.len() as f64;
    println!("{} paths, mean sup|X − x0| at t = 1: {mean_sup:.4}", paths.len());

    let p = &paths[0];
    for k in (0..=cfg.n_steps).step_by(64) {
        println!(
            "t = {:.3}  x = {:+.4}  sup = {:.4}",
            p.times[k], p.states[k], p.running_sup[k]
        );
    }
    // same (spec, config, seed, path id), same path
    assert_eq!(&simulate_path(&spec, 0.0, &cfg, 0)?, p);
    Ok(())
}
