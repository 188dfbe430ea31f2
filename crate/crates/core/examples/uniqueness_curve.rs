//! Roots t_d, Blume-Capel critical couplings, and the curve x(d, y) as CSV.
//!
//!     cargo run --example uniqueness_curve > curve.csv

use beg_dobrushin::region::{blume_capel_xc, solve_t_d, UniquenessCurve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for d in 1..=7 {
        eprintln!(
            "d = {d}: t_d = {:.9}, x_c = {:.9}",
            solve_t_d(d)?,
            blume_capel_xc(d)?
        );
    }
    let curves = (1..=3)
        .map(UniquenessCurve::new)
        .collect::<Result<Vec<_>, _>>()?;
    println!("y,x_d1,x_d2,x_d3");
    for i in 0..=80 {
        let y = -4.0 + 0.1 * i as f64;
        let xs: Vec<String> = curves
            .iter()
            .map(|c| format!("{:.9}", c.evaluate(y)))
            .collect();
        println!("{y:.1},{}", xs.join(","));
    }
    Ok(())
}
