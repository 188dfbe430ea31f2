//! Classifies a handful of coupling pairs and lists their ground bond types.
//!
//!     cargo run --example region_map

use beg_dobrushin::model::{classify_region, ground_pairs};

fn main() {
    let points = [
        (-5.0, 2.0),
        (-3.0, 0.0),
        (-1.0, -3.0),
        (-1.0, 0.5),
        (1.0, -3.0),
        (0.1, 0.0),
        (0.0, -2.0),
    ];
    for (x, y) in points {
        let label = classify_region(x, y);
        let ground = match ground_pairs(x, y) {
            Ok(set) => set
                .iter()
                .map(|[a, b]| format!("{a}{b}"))
                .collect::<Vec<_>>()
                .join(" "),
            Err(e) => format!("({e})"),
        };
        println!(
            "({x:>5}, {y:>5})  {:<16} {:<9} ground: {ground}",
            label.major.to_string(),
            label.sub.to_string()
        );
    }
}
