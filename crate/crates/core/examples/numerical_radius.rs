//! Numerical radius: the closed form on a Hilbert space, sampled duality
//! pairs on a polyhedral sum, and the identity `v(T) = v(T*)`.

use nalgebra::DMatrix;
use nidx::{numerical_radius, numerical_radius_closed, Operator, Result, SpaceSpec};

pub fn run_example() -> Result<()> {
    let rows = vec![vec![1.0, 2.0, 0.0], vec![-1.0, 0.5, 1.0], vec![0.0, 3.0, -1.0]];

    let h = SpaceSpec::lp(3, 2.0)?;
    let t = Operator::from_rows(&rows, h)?;
    let sampled = numerical_radius(&t, 4000, 7, 1e-6)?;
    let sym = (t.matrix() + t.matrix().transpose()) * 0.5;
    let oracle = sym.symmetric_eigenvalues().amax();
    println!("l2^3       v = {:.6}  |(T+T^t)/2| = {:.6}", sampled.value, oracle);
    assert!((numerical_radius_closed(&t).expect("hilbert") - oracle).abs() < 1e-12);
    assert!(oracle - sampled.value < 2e-2);

    // Not Hilbert: the estimate comes from sampled pairs refined by ascent.
    let sum = SpaceSpec::absolute_sum(
        SpaceSpec::lp(2, 1.0)?,
        SpaceSpec::lp(2, f64::INFINITY)?,
        SpaceSpec::real(),
    )?;
    let t = Operator::new(DMatrix::from_fn(3, 3, |i, j| rows[i][j]), sum)?;
    let v = numerical_radius(&t, 4000, 7, 1e-6)?;
    let va = numerical_radius(&t.adjoint(), 4000, 7, 1e-6)?;
    println!("{}  v(T) = {:.6}  v(T*) = {:.6}  ({:?})", t.space().describe(), v.value, va.value, v.direction);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
