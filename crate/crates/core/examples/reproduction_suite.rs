//! Runs a subset of the claim registry and prints the CSV report.

use nidx::suite::{run_suite, write_csv, SuiteConfig};
use nidx::Result;

pub fn run_example() -> Result<()> {
    let config = SuiteConfig {
        seed: 1,
        scale: 0.5,
        filter: Some("hilbert,lie,shift".into()),
    };
    let results = run_suite(&config)?;
    for r in &results {
        println!("{:<16} {:?}  margin {:+.3e}", r.claim_id, r.status, r.margin);
    }
    write_csv(&results, std::io::stdout().lock())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
