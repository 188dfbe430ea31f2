//! The uniqueness curve `x(d, y)` and membership in the Dobrushin region.
//!
//! Along `A ∪ B ∪ C` the worst case over `β` of the uniform bound is
//! `r(a/b)`, and `r` is strictly decreasing, so the region where
//! `r(a/b) < 1/(2d)` is cut out by `a/b = t_d`, the root of `r(t) = 1/(2d)`.
//! Solving `a(d, x, y) / b(y) = t_d` for `x` gives a piecewise-linear curve.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::bounds::{exponents, r_of_t};
use crate::error::{Error, Result};
use crate::model::{classify_region, ModelParams};

/// Absolute tolerance on `t` for [`solve_t_d`].
pub const ROOT_TOLERANCE: f64 = 1e-12;

const CACHED_DIMS: usize = 16;
static T_D_CACHE: [OnceLock<f64>; CACHED_DIMS] = [const { OnceLock::new() }; CACHED_DIMS];

fn check_d(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidParams("dimension must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Root of `r(t) = 1/(2d)` by bisection, without caching.
///
/// The bracket starts at `[1, 2]` (`r(1) = 1 > 1/(2d)`) and the upper end
/// doubles until `r` drops below the target.
pub fn compute_t_d(d: usize) -> Result<f64> {
    check_d(d)?;
    let target = 1.0 / (2.0 * d as f64);
    let f = |t: f64| r_of_t(t).map(|r| r - target);
    let (mut lo, mut hi) = (1.0, 2.0);
    while f(hi)? >= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > ROOT_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Cached [`compute_t_d`].
pub fn solve_t_d(d: usize) -> Result<f64> {
    check_d(d)?;
    match T_D_CACHE.get(d - 1) {
        Some(cell) => {
            if let Some(&t) = cell.get() {
                return Ok(t);
            }
            let t = compute_t_d(d)?;
            Ok(*cell.get_or_init(|| t))
        }
        None => compute_t_d(d),
    }
}

/// `x(d, y)` for a fixed dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessCurve {
    pub d: usize,
    pub t_d: f64,
}

impl UniquenessCurve {
    pub fn new(d: usize) -> Result<UniquenessCurve> {
        Ok(UniquenessCurve {
            d,
            t_d: solve_t_d(d)?,
        })
    }

    pub fn evaluate(&self, y: f64) -> f64 {
        let d = self.d as f64;
        let t = self.t_d;
        if y >= 1.0 {
            -(t + 2.0 * d) / (2.0 * d) * (y + 1.0)
        } else if y > -1.0 {
            -(d * (y + 1.0) + t) / d
        } else {
            -t / (2.0 * d) * (y.abs() + 1.0)
        }
    }

    /// Values of the two branches adjacent to `y = +1` and `y = -1`.
    pub fn branch_values_at_kinks(&self) -> [(f64, f64); 2] {
        let d = self.d as f64;
        let t = self.t_d;
        let upper = (-(t + 2.0 * d) / (2.0 * d) * 2.0, -(d * 2.0 + t) / d);
        let lower = (-(d * 0.0 + t) / d, -t / (2.0 * d) * 2.0);
        [upper, lower]
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        classify_region(x, y).sub.in_u() && x < self.evaluate(y)
    }
}

pub fn curve_x(d: usize, y: f64) -> Result<f64> {
    Ok(UniquenessCurve::new(d)?.evaluate(y))
}

/// `(x, y) ∈ A ∪ B ∪ C` and `x < x(d, y)`.
pub fn in_dobrushin_region(d: usize, x: f64, y: f64) -> Result<bool> {
    Ok(UniquenessCurve::new(d)?.contains(x, y))
}

/// Same region through the rate: `(x, y) ∈ A ∪ B ∪ C` and `r(a/b) < 1/(2d)`.
pub fn in_dobrushin_region_by_rate(d: usize, x: f64, y: f64) -> Result<bool> {
    check_d(d)?;
    let params = ModelParams::new(x, y, 1.0, d)?;
    if !classify_region(x, y).sub.in_u() {
        return Ok(false);
    }
    let ep = exponents(&params)?;
    Ok(r_of_t(ep.ratio())? < 1.0 / (2.0 * d as f64))
}

/// Critical coupling of the Blume-Capel model (`y = 0`): `-(d + t_d)/d`.
pub fn blume_capel_xc(d: usize) -> Result<f64> {
    let t = solve_t_d(d)?;
    let d = d as f64;
    Ok(-(d + t) / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_roots() {
        assert!((solve_t_d(2).unwrap() - 5.39315).abs() < 1e-4);
        assert!((solve_t_d(3).unwrap() - 8.33383).abs() < 1e-4);
    }

    #[test]
    fn root_residuals() {
        for d in 1..=7 {
            let t = solve_t_d(d).unwrap();
            let r = r_of_t(t).unwrap();
            assert!((r - 0.5 / d as f64).abs() <= 1e-10, "d={d} t={t} r={r}");
        }
        // beyond the cache
        let t = solve_t_d(40).unwrap();
        assert!((r_of_t(t).unwrap() - 1.0 / 80.0).abs() <= 1e-10);
        assert!(solve_t_d(0).is_err());
    }

    #[test]
    fn cached_equals_uncached() {
        for d in 1..=5 {
            assert_eq!(solve_t_d(d).unwrap(), compute_t_d(d).unwrap());
        }
    }

    #[test]
    fn curve_examples() {
        let t2 = solve_t_d(2).unwrap();
        assert!((curve_x(2, 0.0).unwrap() - (-(2.0 + t2) / 2.0)).abs() < 1e-15);
        assert!((curve_x(2, 0.0).unwrap() + 3.69658).abs() < 1e-4);
        assert!((curve_x(2, 1.0).unwrap() - (-(4.0 + t2) / 2.0)).abs() < 1e-12);
        assert!((curve_x(2, -1.0).unwrap() - (-t2 / 2.0)).abs() < 1e-12);
        assert!((curve_x(2, 2.0).unwrap() - (-(t2 + 4.0) / 4.0 * 3.0)).abs() < 1e-12);
    }

    #[test]
    fn kink_continuity() {
        for d in 1..=7 {
            let c = UniquenessCurve::new(d).unwrap();
            for (l, r) in c.branch_values_at_kinks() {
                assert!((l - r).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn membership_examples() {
        assert!(in_dobrushin_region(2, -6.0, 0.0).unwrap());
        assert!(!in_dobrushin_region(2, -3.0, 0.0).unwrap());
        assert!(!in_dobrushin_region(2, 1.0, -3.0).unwrap());
        assert!(!in_dobrushin_region(2, -5.0, 2.0).unwrap());
        assert!(in_dobrushin_region(2, -10.0, 2.0).unwrap());
        assert!(in_dobrushin_region_by_rate(2, -6.0, 0.0).unwrap());
        assert!(!in_dobrushin_region_by_rate(2, -3.0, 0.0).unwrap());
    }

    #[test]
    fn blume_capel_values() {
        assert!((blume_capel_xc(2).unwrap() + 3.69658).abs() < 1e-4);
        assert!((blume_capel_xc(3).unwrap() + 3.77794).abs() < 1e-4);
        for d in 1..=7 {
            assert_eq!(blume_capel_xc(d).unwrap(), curve_x(d, 0.0).unwrap());
        }
    }
}
