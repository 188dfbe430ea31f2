//! Certification sweep: random points in each strip A, B, C, a logarithmic
//! temperature grid, and every bound checked against exact enumeration.
//!
//!     cargo run --release --example certify -- [d] [points-per-strip] > report.json

use beg_dobrushin::verify::{run_sweep, SweepSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2);
    let per_region: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);

    let spec = SweepSpec::certification(d, per_region, 7)?;
    let report = run_sweep(&spec)?;
    for c in &report.checks {
        eprintln!(
            "{:<20} {}  cells={:<8} worst slack={:?}",
            c.name.name(),
            if c.pass { "pass" } else { "FAIL" },
            c.cells_checked,
            c.worst_slack
        );
    }
    println!("{}", report.to_json());
    if !report.all_pass() {
        std::process::exit(1);
    }
    Ok(())
}
