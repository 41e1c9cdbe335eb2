//! Radius of the coordinate shifts on planar absolute norms and the
//! inequality it forces on `|e1 + e2|`.

use nidx::constructions::{random_gauge, shift_bound_check};
use nidx::{Result, SpaceSpec};

pub fn run_example() -> Result<()> {
    let mut spaces = vec![];
    for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
        spaces.push(SpaceSpec::lp(2, p)?);
    }
    for seed in 0..4 {
        spaces.push(SpaceSpec::gauge2d(random_gauge(seed)));
    }
    println!("{:<28} {:>7} {:>7} {:>7} {:>8}", "space", "k", "lhs", "rhs", "margin");
    for e in &spaces {
        let r = shift_bound_check(e, 2000, 1)?;
        println!("{:<28} {:>7.4} {:>7.4} {:>7.4} {:>8.4}", e.describe(), r.k, r.lhs, r.rhs, r.margin);
        assert!(r.pass);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
