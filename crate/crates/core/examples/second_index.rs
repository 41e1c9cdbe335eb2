//! Second numerical index `n'(X)`, the best constant in `k |T + Z(X)| <= v(T)`.
//! Hilbert spaces give 1; gluing a line to a Hilbert plane drops it below sqrt3/2.

use nidx::{estimate_second_index_with, Result, SearchOptions, SpaceSpec};

pub fn run_example() -> Result<()> {
    let spaces = [
        SpaceSpec::lp(3, 2.0)?,
        SpaceSpec::absolute_sum(SpaceSpec::lp(2, f64::INFINITY)?, SpaceSpec::lp(2, 2.0)?, SpaceSpec::real())?,
        SpaceSpec::absolute_sum(SpaceSpec::lp(2, 1.0)?, SpaceSpec::lp(2, 2.0)?, SpaceSpec::real())?,
    ];
    let opts = SearchOptions::new(3, 2000, 4);
    for s in spaces {
        let e = estimate_second_index_with(&s, &opts)?;
        println!(
            "n'({}) <= {:.4}   dim Z = {:?}{}",
            s.describe(),
            e.value,
            e.lie_dimension,
            e.exact.as_deref().map(|n| format!("  [{n}]")).unwrap_or_default()
        );
        println!("  witness rows {:.4?}", e.witness.rows());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
