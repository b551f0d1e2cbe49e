//! Which moments are finite, and which functions have time-independent finiteness.

use levy_moments::bounds::{check_condition, moment_exists, Condition, MomentFunction, PairGrid};
use levy_moments::presets::preset;
use levy_moments::triplet::Region;

fn main() -> levy_moments::Result<()> {
    let tempered = preset("ac2")?;
    let stable = preset("ac4")?;
    for f in ["power:1.2", "power:2", "exponential:0.5", "log-or-e", "exp-square"] {
        let f: MomentFunction = f.parse()?;
        for (name, spec) in [("tempered", &tempered), ("stable 1.5", &stable)] {
            match moment_exists(spec, f, Region::All) {
                Ok(m) => println!("{name:>10} {:<16} exists: {}", f.label(), m.exists),
                Err(e) => println!("{name:>10} {:<16} {e}", f.label()),
            }
        }
    }

    for f in [MomentFunction::PowerOrOne { p: 1.0 }, MomentFunction::ExpSquare] {
        let letters: String = Condition::ALL
            .into_iter()
            .filter_map(|c| check_condition(f, c, PairGrid::default()).ok())
            .filter(|r| r.holds())
            .map(|r| r.condition.letter())
            .collect();
        println!("{}: conditions holding on the grid: [{letters}]", f.label());
    }
    Ok(())
}
