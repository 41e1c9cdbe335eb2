//! Distance from an operator to the Lie algebra. The operator `T1` on
//! `l2^2 (+)_inf R` has radius 3/2 but stays at distance at least sqrt 3.

use nidx::constructions::example_t1;
use nidx::{lie_basis, numerical_radius, op_norm, quotient_norm, Result, SpaceSpec, Witness};

pub fn run_example() -> Result<()> {
    let space = SpaceSpec::absolute_sum(SpaceSpec::lp(2, f64::INFINITY)?, SpaceSpec::lp(2, 2.0)?, SpaceSpec::real())?;
    let t = example_t1(&space)?;
    let basis = lie_basis(&space, 360, 1)?;
    let v = numerical_radius(&t, 4000, 1, 1e-6)?;
    let n = op_norm(&t, 4000, 1)?;
    let q = quotient_norm(&t, &basis, 4000, 1)?;
    println!("T1 on {}", space.describe());
    println!("v(T1)        {:.6}", v.value);
    println!("|T1|         {:.6}", n.value);
    println!("|T1 + Z(X)|  {:.6}  bracket {:?}  (sqrt 3 = {:.6})", q.value, q.bracket, 3f64.sqrt());
    if let Some(Witness::Coefficients { c, .. }) = &q.witness {
        println!("best coefficients {c:.6?}");
    }
    println!("ratio v/q    {:.6}  (sqrt3/2 = {:.6})", v.value / q.value, 3f64.sqrt() / 2.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
