//! The closed-form bounds at one point of the disordered region, next to the
//! exact worst case, over a temperature grid.
//!
//!     cargo run --example bound_chain -- [d] [x] [y]

use beg_dobrushin::bounds::{
    beta_critical, exponents, lemma2_bound, lemma3_bound, r_of_t, theorem1_bound,
};
use beg_dobrushin::specification::exact_max_tv;
use beg_dobrushin::verify::log_grid;
use beg_dobrushin::ModelParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2);
    let x: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(-5.0);
    let y: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2.0);

    let ep = exponents(&ModelParams::new(x, y, 1.0, d)?)?;
    let bc = beta_critical(&ep)?;
    println!(
        "a = {}, b = {}, beta_c = {bc:.9}, r(a/b) = {:.9}",
        ep.a,
        ep.b,
        r_of_t(ep.ratio())?
    );

    println!("beta,exact,lemma2,lemma3,theorem1");
    let mut grid = log_grid(1e-3, 50.0, 25)?;
    grid.push(bc);
    grid.sort_by(f64::total_cmp);
    for beta in grid {
        let p = ModelParams::new(x, y, beta, d)?;
        println!(
            "{beta:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
            exact_max_tv(&p)?.max_tv,
            lemma2_bound(&p)?,
            lemma3_bound(&p)?,
            theorem1_bound(&p)?
        );
    }
    Ok(())
}
