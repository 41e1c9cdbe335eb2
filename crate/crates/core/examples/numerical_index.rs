//! Numerical index by search: `l1` and `l_inf` have index 1, `l2` has index
//! 0, and `l_p^2` drops towards 0 as `p` approaches 2.

use nidx::{estimate_index, Result, SpaceSpec};

pub fn run_example() -> Result<()> {
    for p in [1.0, 1.2, 1.5, 1.8, 2.0, f64::INFINITY] {
        let s = SpaceSpec::lp(2, p)?;
        let e = estimate_index(&s, 4, 2000, 11)?;
        println!(
            "n({:<8}) <= {:.4}   witness v = {:.4}, |T| = {:.4}",
            s.describe(),
            e.value,
            e.numerator,
            e.denominator
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
