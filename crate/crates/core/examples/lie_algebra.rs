//! Skew-hermitian operators: the Lie algebra of a space, computed as the
//! null space of sampled duality constraints, and its Hilbert components.

use nidx::{detect_components, lie_basis, verify_skew, Operator, Result, SpaceSpec};

pub fn run_example() -> Result<()> {
    let spaces = [
        SpaceSpec::lp(3, 2.0)?,
        SpaceSpec::lp(3, 1.0)?,
        SpaceSpec::absolute_sum(SpaceSpec::lp(2, f64::INFINITY)?, SpaceSpec::lp(2, 2.0)?, SpaceSpec::real())?,
        SpaceSpec::absolute_sum(SpaceSpec::lp(2, 1.0)?, SpaceSpec::lp(2, 2.0)?, SpaceSpec::lp(2, 2.0)?)?,
    ];
    for s in spaces {
        let n = s.dim();
        let basis = lie_basis(&s, 40 * n * n, 5)?;
        let components = detect_components(&s, &basis)?;
        println!("{:<24} dim Z = {}  components {:?}", s.describe(), basis.dimension(), components);
        for m in &basis.elements {
            let v = verify_skew(&Operator::new(m.clone(), s.clone())?, 2000, 9)?;
            assert!(v < 1e-4);
        }
        for m in &basis.elements {
            let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
            println!("  {rows:.3?}");
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
