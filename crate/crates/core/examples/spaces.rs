//! Building normed spaces, evaluating norms and dual norms, and pairing
//! vectors with their norming functionals.

use nidx::{Result, SpaceSpec};

pub fn run_example() -> Result<()> {
    let h = SpaceSpec::lp(2, 2.0)?;
    let outer = SpaceSpec::lp(2, f64::INFINITY)?;
    let x_space = SpaceSpec::absolute_sum(outer, h, SpaceSpec::real())?;
    println!("space      {} (dim {})", x_space.describe(), x_space.dim());

    let x = [0.6, 0.8, -0.5];
    println!("|x|        {:.6}", x_space.norm(&x)?);
    println!("|x|_*      {:.6}", x_space.dual_norm(&x)?);

    // (0.6, 0.8) has norm 1 and dominates the scalar block, so the pair is smooth.
    let pair = x_space.norming_functional(&x)?;
    println!("x*         {:?}", pair.xstar);
    println!("gap        {:.2e}", pair.gap);

    let dual = SpaceSpec::dual_of(x_space.clone());
    println!("dual       {}", dual.describe());
    assert!((dual.norm(&x)? - x_space.dual_norm(&x)?).abs() < 1e-12);

    let json = x_space.to_json_string();
    let back = SpaceSpec::from_json_str(&json)?;
    assert_eq!(back.describe(), x_space.describe());
    println!("json round trip ok ({} bytes)", json.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
