//! Along the line x = 0 with y < -1 the single-site condition breaks down once
//! the temperature is low enough. Scans β for the first failure at a few y.
//!
//!     cargo run --example low_temperature_failure -- [d]

use beg_dobrushin::specification::exact_max_tv;
use beg_dobrushin::verify::find_failure_beta;
use beg_dobrushin::ModelParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(2);
    println!("y,failure_beta,max_tv_at_failure,threshold");
    for y in [-1.5, -2.0, -3.0, -4.0] {
        match find_failure_beta(d, 0.0, y)? {
            Some(beta) => {
                let r = exact_max_tv(&ModelParams::new(0.0, y, beta, d)?)?;
                println!("{y},{beta:.9},{:.9},{:.9}", r.max_tv, 0.5 / d as f64);
            }
            None => println!("{y},none,,"),
        }
    }
    Ok(())
}
