//! Operator norms on non-Euclidean unit balls, with their attaining vectors.

use nidx::{op_norm, Operator, Result, SpaceSpec, Witness};

pub fn run_example() -> Result<()> {
    let rows = vec![vec![2.0, -1.0], vec![0.5, 1.5]];
    for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
        let t = Operator::from_rows(&rows, SpaceSpec::lp(2, p)?)?;
        let e = op_norm(&t, 5000, 3)?;
        let x = match &e.witness {
            Some(Witness::Vector { x }) => format!("{x:.4?}"),
            _ => "-".into(),
        };
        println!("l_{p:<4} |T| = {:.6} {:?} at {x}", e.value, e.direction);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
