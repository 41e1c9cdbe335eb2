//! `l2^2`-valued functions on `m` points with the sup norm. The Lie algebra is
//! one rotation per point, and `T(f, g) = (f, sqrt2 f(t2))` keeps `n'` at most sqrt3/2.

use nidx::constructions::ck_operator;
use nidx::{lie_basis, numerical_radius, quotient_norm, Result};

pub fn run_example() -> Result<()> {
    for m in [2, 3] {
        let t = ck_operator(m)?;
        let n = t.dim();
        let basis = lie_basis(t.space(), 40 * n * n, 2)?;
        let v = numerical_radius(&t, 4000, 2, 1e-6)?.value;
        let q = quotient_norm(&t, &basis, 4000, 2)?.value;
        println!(
            "m = {m}: dim Z = {}  v = {v:.4}  |T + Z| = {q:.4}  v/q = {:.4}",
            basis.dimension(),
            v / q
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
