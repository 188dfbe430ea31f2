//! Conditional law of the origin spin and the exact worst-case sensitivity
//! to one neighbor, across temperatures.
//!
//!     cargo run --example single_site -- [d] [x] [y]

use beg_dobrushin::specification::{conditional_distribution, exact_max_tv};
use beg_dobrushin::{ModelParams, NeighborConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2);
    let x: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(-3.0);
    let y: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.0);

    let mut spins = vec![0; 2 * d];
    spins[0] = 1;
    let nb = NeighborConfig::from_values(&spins)?;
    let p = conditional_distribution(&ModelParams::new(x, y, 1.0, d)?, &nb)?;
    println!(
        "beta=1, neighbors {spins:?}: P(-)={:.6e} P(0)={:.6} P(+)={:.6e}",
        p.p_minus(),
        p.p_zero(),
        p.p_plus()
    );

    println!("beta,max_tv,row_sum,satisfied,argmax_sigma,argmax_tilde");
    for beta in [0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0] {
        let r = exact_max_tv(&ModelParams::new(x, y, beta, d)?)?;
        let sigma: Vec<i32> = r.argmax.sigma.spins().iter().map(|s| s.value()).collect();
        println!(
            "{beta},{:.9},{:.9},{},{sigma:?},{}",
            r.max_tv,
            r.row_sum,
            r.satisfied,
            r.argmax.sigma1_tilde.value()
        );
    }
    Ok(())
}
