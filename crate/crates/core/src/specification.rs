//! Single-site Gibbs specification, total variation, and the exact Dobrushin
//! quantity by exhaustive enumeration of boundary pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, NeighborConfig, Spin};

/// Largest number of neighbor completions `3^(2d-1)` [`exact_max_tv`] will enumerate.
pub const MAX_COMPLETIONS: u128 = 10_000_000;

/// Largest box side accepted by [`finite_volume_marginal`].
pub const MAX_BOX_SIDE: usize = 3;

const NORMALIZATION_TOL: f64 = 1e-12;

/// Probability vector over `{-1, 0, +1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinDistribution {
    probs: [f64; 3],
}

impl SpinDistribution {
    pub fn new(p_minus: f64, p_zero: f64, p_plus: f64) -> Result<SpinDistribution> {
        let probs = [p_minus, p_zero, p_plus];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Domain(format!(
                "probabilities out of [0, 1]: {probs:?}"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Domain(format!("probabilities sum to {total}")));
        }
        Ok(SpinDistribution { probs })
    }

    pub fn uniform() -> SpinDistribution {
        SpinDistribution {
            probs: [1.0 / 3.0; 3],
        }
    }

    pub fn point_mass(s: Spin) -> SpinDistribution {
        let mut probs = [0.0; 3];
        probs[s.index()] = 1.0;
        SpinDistribution { probs }
    }

    /// Normalizes `exp(log_weights)` with the maximum subtracted first.
    pub fn from_log_weights(log_weights: [f64; 3]) -> SpinDistribution {
        let m = log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let w = log_weights.map(|l| (l - m).exp());
        let z: f64 = w.iter().sum();
        SpinDistribution {
            probs: w.map(|v| v / z),
        }
    }

    pub fn prob(&self, s: Spin) -> f64 {
        self.probs[s.index()]
    }

    pub fn p_minus(&self) -> f64 {
        self.probs[0]
    }

    pub fn p_zero(&self) -> f64 {
        self.probs[1]
    }

    pub fn p_plus(&self) -> f64 {
        self.probs[2]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.probs
    }

    /// Distribution of `-ξ`.
    pub fn reversed(&self) -> SpinDistribution {
        let [a, b, c] = self.probs;
        SpinDistribution { probs: [c, b, a] }
    }
}

pub fn total_variation(p: &SpinDistribution, q: &SpinDistribution) -> f64 {
    0.5 * p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}

/// Conditional law of the origin spin given its `2d` neighbors.
///
/// Uses the reduced weight `h(ξ) = exp(β ξ² (2dx + y Σσ_j²) + β ξ Σσ_j)`;
/// the factor depending only on the neighbors cancels in the normalization.
pub fn conditional_distribution(
    params: &ModelParams,
    nb: &NeighborConfig,
) -> Result<SpinDistribution> {
    conditional_from_spins(params, nb.spins())
}

/// [`conditional_distribution`] on a raw neighbor slice, in any order.
pub fn conditional_from_spins(params: &ModelParams, spins: &[Spin]) -> Result<SpinDistribution> {
    let expected = params.coordination();
    if spins.len() != expected {
        return Err(Error::NeighborCount {
            expected,
            got: spins.len(),
        });
    }
    let sq: i32 = spins.iter().map(|s| s.squared()).sum();
    let sum: i32 = spins.iter().map(|s| s.value()).sum();
    Ok(conditional_from_stats(params, sq as f64, sum as f64))
}

#[inline]
pub(crate) fn conditional_from_stats(
    params: &ModelParams,
    sigma_sq: f64,
    total: f64,
) -> SpinDistribution {
    let beta = params.beta();
    let field2 = 2.0 * params.d() as f64 * params.x() + params.y() * sigma_sq;
    let lw = |xi: f64| beta * (xi * xi * field2 + xi * total);
    SpinDistribution::from_log_weights([lw(-1.0), lw(0.0), lw(1.0)])
}

/// Two neighbor configurations that agree off the distinguished site.
///
/// `sigma` holds `σ` (with `σ_1` at index 0); `sigma1_tilde` is `σ̃_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryPair {
    pub sigma: NeighborConfig,
    pub sigma1_tilde: Spin,
}

impl BoundaryPair {
    pub fn new(sigma: NeighborConfig, sigma1_tilde: Spin) -> Result<BoundaryPair> {
        if sigma.distinguished() == sigma1_tilde {
            return Err(Error::IdenticalPair(sigma1_tilde.value()));
        }
        Ok(BoundaryPair {
            sigma,
            sigma1_tilde,
        })
    }

    pub fn sigma1(&self) -> Spin {
        self.sigma.distinguished()
    }

    pub fn tilde(&self) -> NeighborConfig {
        self.sigma.with_distinguished(self.sigma1_tilde)
    }

    /// Orders the pair so that `|σ̃_1| ≥ |σ_1|`, with `(σ_1, σ̃_1) = (-1, +1)`
    /// when the magnitudes tie. Total variation is unchanged.
    pub fn normalized(&self) -> BoundaryPair {
        let (s1, t1) = (self.sigma1(), self.sigma1_tilde);
        let swap =
            t1.squared() < s1.squared() || (t1.squared() == s1.squared() && t1 == Spin::MINUS);
        if swap {
            BoundaryPair {
                sigma: self.tilde(),
                sigma1_tilde: s1,
            }
        } else {
            self.clone()
        }
    }

    pub fn is_normalized(&self) -> bool {
        let n = self.normalized();
        n.sigma1() == self.sigma1()
    }

    /// Exact total variation between the two conditionals.
    pub fn exact_tv(&self, params: &ModelParams) -> Result<f64> {
        let p = conditional_distribution(params, &self.sigma)?;
        let q = conditional_distribution(params, &self.tilde())?;
        Ok(total_variation(&p, &q))
    }
}

/// The three normalized `(σ_1, σ̃_1)` pairs in enumeration order.
pub const NORMALIZED_PAIRS: [(Spin, Spin); 3] = [
    (Spin::MINUS, Spin::PLUS),
    (Spin::ZERO, Spin::PLUS),
    (Spin::ZERO, Spin::MINUS),
];

fn completions(d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidParams("dimension must be >= 1".into()));
    }
    let exp = 2 * d - 1;
    let needed = 3u128.checked_pow(exp as u32).unwrap_or(u128::MAX);
    if needed > MAX_COMPLETIONS {
        return Err(Error::Capacity {
            what: "neighbor completions",
            needed,
            limit: MAX_COMPLETIONS,
        });
    }
    Ok(needed as usize)
}

/// Every assignment of the `2d - 1` non-distinguished neighbors, in
/// balanced-ternary order (first non-distinguished spin fastest).
pub fn neighbor_completions(d: usize) -> Result<impl Iterator<Item = Vec<Spin>>> {
    let count = completions(d)?;
    let len = 2 * d - 1;
    Ok((0..count).map(move |mut m| {
        let mut rest = Vec::with_capacity(len);
        for _ in 0..len {
            rest.push(Spin::ALL[m % 3]);
            m /= 3;
        }
        rest
    }))
}

/// All normalized boundary pairs differing at the distinguished neighbor:
/// completions outer, [`NORMALIZED_PAIRS`] inner.
pub fn boundary_pairs(d: usize) -> Result<impl Iterator<Item = BoundaryPair>> {
    Ok(neighbor_completions(d)?.flat_map(|rest| {
        NORMALIZED_PAIRS
            .into_iter()
            .map(move |(s1, t1)| BoundaryPair {
                sigma: NeighborConfig::with_rest(s1, &rest).expect("2d spins"),
                sigma1_tilde: t1,
            })
    }))
}

/// Worst-case single-site sensitivity to a change at one neighbor.
#[derive(Clone, Debug, PartialEq)]
pub struct DobrushinReport {
    pub max_tv: f64,
    /// First pair (in enumeration order) attaining `max_tv`.
    pub argmax: BoundaryPair,
    /// `2d · max_tv`, the Dobrushin row sum.
    pub row_sum: f64,
    /// `max_tv < 1/(2d)`.
    pub satisfied: bool,
}

pub fn exact_max_tv(params: &ModelParams) -> Result<DobrushinReport> {
    let d = params.d();
    let mut best: Option<(f64, BoundaryPair)> = None;
    for pair in boundary_pairs(d)? {
        // Only (σ², Σσ) enter the conditional, so skip the NeighborConfig round trip.
        let sq = pair.sigma.sigma_sq() as f64;
        let tot = pair.sigma.total() as f64;
        let t1 = pair.sigma1_tilde;
        let s1 = pair.sigma1();
        let p = conditional_from_stats(params, sq, tot);
        let q = conditional_from_stats(
            params,
            sq + (t1.squared() - s1.squared()) as f64,
            tot + (t1.value() - s1.value()) as f64,
        );
        let tv = total_variation(&p, &q);
        if best.as_ref().is_none_or(|(m, _)| tv > *m) {
            best = Some((tv, pair));
        }
    }
    let (max_tv, argmax) = best.expect("at least one boundary pair");
    let coord = params.coordination() as f64;
    Ok(DobrushinReport {
        max_tv,
        argmax,
        row_sum: coord * max_tv,
        satisfied: max_tv < 1.0 / coord,
    })
}

/// Boundary spins surrounding a `side × side` box in `Z^2`.
///
/// Box sites are `(i, j)` with `0 ≤ i, j < side`; `south[i]` sits at
/// `(i, -1)`, `north[i]` at `(i, side)`, `west[j]` at `(-1, j)`, `east[j]`
/// at `(side, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxBoundary {
    pub side: usize,
    pub south: Vec<Spin>,
    pub north: Vec<Spin>,
    pub west: Vec<Spin>,
    pub east: Vec<Spin>,
}

impl BoxBoundary {
    pub fn new(
        side: usize,
        south: Vec<Spin>,
        north: Vec<Spin>,
        west: Vec<Spin>,
        east: Vec<Spin>,
    ) -> Result<Self> {
        if [&south, &north, &west, &east]
            .iter()
            .any(|v| v.len() != side)
        {
            return Err(Error::InvalidParams(format!(
                "each boundary face needs {side} spins"
            )));
        }
        Ok(BoxBoundary {
            side,
            south,
            north,
            west,
            east,
        })
    }

    pub fn constant(side: usize, s: Spin) -> BoxBoundary {
        let face = vec![s; side];
        BoxBoundary {
            side,
            south: face.clone(),
            north: face.clone(),
            west: face.clone(),
            east: face,
        }
    }

    pub fn flipped(&self) -> BoxBoundary {
        let f = |v: &Vec<Spin>| v.iter().map(|&s| -s).collect();
        BoxBoundary {
            side: self.side,
            south: f(&self.south),
            north: f(&self.north),
            west: f(&self.west),
            east: f(&self.east),
        }
    }

    /// Site whose marginal [`finite_volume_marginal`] reports: `(side/2, side/2)`.
    pub fn center(&self) -> (usize, usize) {
        (self.side / 2, self.side / 2)
    }
}

/// Exact marginal at the box center under the finite-volume Gibbs
/// distribution on a `side × side` box in two dimensions.
///
/// Sums `exp(-β H_Λ)` over all `3^(side²)` interior configurations, where
/// `H_Λ` collects every bond touching the box.
pub fn finite_volume_marginal(
    params: &ModelParams,
    boundary: &BoxBoundary,
) -> Result<SpinDistribution> {
    if params.d() != 2 {
        return Err(Error::InvalidParams(format!(
            "finite-volume marginals are implemented for d = 2, got d = {}",
            params.d()
        )));
    }
    let side = boundary.side;
    if side == 0 || side > MAX_BOX_SIDE {
        return Err(Error::Capacity {
            what: "box interior configurations",
            needed: 3u128.checked_pow((side * side) as u32).unwrap_or(u128::MAX),
            limit: 3u128.pow((MAX_BOX_SIDE * MAX_BOX_SIDE) as u32),
        });
    }
    let sites = side * side;
    let (x, y, beta) = (params.x(), params.y(), params.beta());
    let bond = |a: i32, b: i32| {
        let (a, b) = (a as f64, b as f64);
        a * b + y * a * a * b * b + x * (a * a + b * b)
    };
    let (cx, cy) = boundary.center();
    let center = cy * side + cx;

    let count = 3usize.pow(sites as u32);
    let mut log_w = Vec::with_capacity(count);
    let mut center_spin = Vec::with_capacity(count);
    let mut cfg = vec![0i32; sites];
    for mut m in 0..count {
        for c in cfg.iter_mut() {
            *c = (m % 3) as i32 - 1;
            m /= 3;
        }
        let at = |i: usize, j: usize| cfg[j * side + i];
        let mut minus_h = 0.0;
        for j in 0..side {
            for i in 0..side {
                let s = at(i, j);
                if i + 1 < side {
                    minus_h += bond(s, at(i + 1, j));
                }
                if j + 1 < side {
                    minus_h += bond(s, at(i, j + 1));
                }
            }
        }
        for t in 0..side {
            minus_h += bond(at(t, 0), boundary.south[t].value());
            minus_h += bond(at(t, side - 1), boundary.north[t].value());
            minus_h += bond(at(0, t), boundary.west[t].value());
            minus_h += bond(at(side - 1, t), boundary.east[t].value());
        }
        log_w.push(beta * minus_h);
        center_spin.push(cfg[center]);
    }

    let m = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut mass = [0.0f64; 3];
    for (lw, s) in log_w.iter().zip(&center_spin) {
        mass[(*s + 1) as usize] += (lw - m).exp();
    }
    let z: f64 = mass.iter().sum();
    let [a, b, c] = mass.map(|v| v / z);
    Ok(SpinDistribution { probs: [a, b, c] })
}
