//! Exact center marginals of small boxes in two dimensions under different
//! boundary conditions, next to the single-site conditional law.
//!
//!     cargo run --example finite_volume -- [x] [y] [beta]

use beg_dobrushin::specification::{finite_volume_marginal, BoxBoundary};
use beg_dobrushin::{total_variation, ModelParams, Spin};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<f64>());
    let x = args.next().transpose()?.unwrap_or(-6.0);
    let y = args.next().transpose()?.unwrap_or(0.0);
    let beta = args.next().transpose()?.unwrap_or(1.0);
    let params = ModelParams::new(x, y, beta, 2)?;

    println!("side,boundary,p_minus,p_zero,p_plus");
    for side in 1..=3 {
        let zero = finite_volume_marginal(&params, &BoxBoundary::constant(side, Spin::ZERO))?;
        let plus = finite_volume_marginal(&params, &BoxBoundary::constant(side, Spin::PLUS))?;
        for (name, m) in [("zero", zero), ("plus", plus)] {
            println!(
                "{side},{name},{:.12e},{:.12e},{:.12e}",
                m.p_minus(),
                m.p_zero(),
                m.p_plus()
            );
        }
        println!(
            "# side {side}: TV(zero, plus) = {:.15e}",
            total_variation(&zero, &plus)
        );
    }
    Ok(())
}
