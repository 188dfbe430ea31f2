//! Spins, couplings and the phase regions of the Blume-Emery-Griffiths model.
//!
//! The formal Hamiltonian on `Z^d` with zero field is
//!
//! ```text
//! H(σ) = -Σ_<ij> ( σ_i σ_j + y σ_i² σ_j² + x (σ_i² + σ_j²) ),   σ_i ∈ {-1, 0, +1}
//! ```
//!
//! The `(x, y)` plane splits into a ferromagnetic, a disordered and an
//! antiquadrupolar region according to which nearest-neighbor spin pairs have
//! the lowest energy. Inside the disordered region the three strips `A`, `B`,
//! `C` carry the closed-form total-variation bounds of [`crate::bounds`].

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hyperplane tolerance used by [`classify_region`].
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// A single spin-1 value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Spin(i8);

impl Spin {
    pub const MINUS: Spin = Spin(-1);
    pub const ZERO: Spin = Spin(0);
    pub const PLUS: Spin = Spin(1);

    /// All three values in ascending order.
    pub const ALL: [Spin; 3] = [Spin::MINUS, Spin::ZERO, Spin::PLUS];

    pub fn new(value: i32) -> Result<Spin> {
        match value {
            -1..=1 => Ok(Spin(value as i8)),
            other => Err(Error::InvalidSpin(other)),
        }
    }

    #[inline]
    pub fn value(self) -> i32 {
        self.0 as i32
    }

    #[inline]
    pub fn squared(self) -> i32 {
        (self.0 * self.0) as i32
    }

    /// Position in [`Spin::ALL`]: 0 for −1, 1 for 0, 2 for +1.
    #[inline]
    pub fn index(self) -> usize {
        (self.0 + 1) as usize
    }
}

impl Neg for Spin {
    type Output = Spin;
    fn neg(self) -> Spin {
        Spin(-self.0)
    }
}

impl TryFrom<i32> for Spin {
    type Error = Error;
    fn try_from(value: i32) -> Result<Spin> {
        Spin::new(value)
    }
}

impl From<Spin> for i32 {
    fn from(s: Spin) -> i32 {
        s.value()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            -1 => f.write_str("-"),
            0 => f.write_str("0"),
            _ => f.write_str("+"),
        }
    }
}

/// Couplings, inverse temperature and lattice dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    x: f64,
    y: f64,
    beta: f64,
    d: usize,
}

impl ModelParams {
    pub fn new(x: f64, y: f64, beta: f64, d: usize) -> Result<ModelParams> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidParams(format!(
                "couplings must be finite, got x={x}, y={y}"
            )));
        }
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidParams(format!(
                "beta must be finite and >= 0, got {beta}"
            )));
        }
        if d == 0 {
            return Err(Error::InvalidParams("dimension must be >= 1".into()));
        }
        Ok(ModelParams { x, y, beta, d })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of nearest neighbors, `2d`.
    pub fn coordination(&self) -> usize {
        2 * self.d
    }

    pub fn with_beta(&self, beta: f64) -> Result<ModelParams> {
        ModelParams::new(self.x, self.y, beta, self.d)
    }
}

/// The `2d` neighbor spins of the origin.
///
/// Index 0 holds the distinguished neighbor (the site where two boundary
/// conditions may differ); `k`, `n` are the nonzero count and the sum over
/// the remaining `2d - 1` neighbors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NeighborConfig {
    spins: Vec<Spin>,
    k: usize,
    n: i32,
    sigma_sq: usize,
}

impl NeighborConfig {
    pub fn new(spins: Vec<Spin>) -> Result<NeighborConfig> {
        if spins.len() < 2 || !spins.len().is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "a neighborhood on Z^d has an even number >= 2 of sites, got {}",
                spins.len()
            )));
        }
        let k = spins[1..].iter().filter(|s| s.value() != 0).count();
        let n = spins[1..].iter().map(|s| s.value()).sum();
        let sigma_sq = k + spins[0].squared() as usize;
        Ok(NeighborConfig {
            spins,
            k,
            n,
            sigma_sq,
        })
    }

    pub fn from_values(values: &[i32]) -> Result<NeighborConfig> {
        let spins = values
            .iter()
            .map(|&v| Spin::new(v))
            .collect::<Result<Vec<_>>>()?;
        NeighborConfig::new(spins)
    }

    /// Builds `[first, rest...]`.
    pub fn with_rest(first: Spin, rest: &[Spin]) -> Result<NeighborConfig> {
        let mut spins = Vec::with_capacity(rest.len() + 1);
        spins.push(first);
        spins.extend_from_slice(rest);
        NeighborConfig::new(spins)
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn dimension(&self) -> usize {
        self.spins.len() / 2
    }

    pub fn distinguished(&self) -> Spin {
        self.spins[0]
    }

    /// Nonzero spins among the non-distinguished neighbors.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Sum of the non-distinguished neighbors.
    pub fn n(&self) -> i32 {
        self.n
    }

    /// Sum of squares over all `2d` neighbors.
    pub fn sigma_sq(&self) -> usize {
        self.sigma_sq
    }

    /// Sum over all `2d` neighbors.
    pub fn total(&self) -> i32 {
        self.n + self.spins[0].value()
    }

    /// Same configuration with the distinguished spin replaced.
    pub fn with_distinguished(&self, s: Spin) -> NeighborConfig {
        let mut spins = self.spins.clone();
        spins[0] = s;
        NeighborConfig {
            sigma_sq: self.k + s.squared() as usize,
            spins,
            k: self.k,
            n: self.n,
        }
    }

    pub fn flipped(&self) -> NeighborConfig {
        NeighborConfig {
            spins: self.spins.iter().map(|&s| -s).collect(),
            k: self.k,
            n: -self.n,
            sigma_sq: self.sigma_sq,
        }
    }
}

impl Neg for &NeighborConfig {
    type Output = NeighborConfig;
    fn neg(self) -> NeighborConfig {
        self.flipped()
    }
}

/// Energy of one nearest-neighbor bond.
pub fn pair_energy(si: Spin, sj: Spin, x: f64, y: f64) -> f64 {
    let (a, b) = (si.value() as f64, sj.value() as f64);
    -(a * b + y * a * a * b * b + x * (a * a + b * b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MajorRegion {
    Ferromagnetic,
    Disordered,
    Antiquadrupolar,
    Boundary,
}

/// Strips of the disordered region carrying the closed-form bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubRegion {
    /// `x + y + 1 < 0`, `x < 0`, `y ≥ 1`
    A,
    /// `x + y + 1 < 0`, `x < 0`, `-1 < y < 1`
    B,
    /// `x + y + 1 < 0`, `x < 0`, `y ≤ -1`
    C,
    OutsideU,
}

impl SubRegion {
    pub fn in_u(self) -> bool {
        self != SubRegion::OutsideU
    }
}

impl fmt::Display for MajorRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for SubRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Region membership of a coupling pair.
///
/// `sub` is `A`, `B` or `C` only for disordered points; every other point
/// carries `OutsideU`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub major: MajorRegion,
    pub sub: SubRegion,
}

pub fn classify_region(x: f64, y: f64) -> RegionLabel {
    classify_region_with_tolerance(x, y, BOUNDARY_TOLERANCE)
}

/// Like [`classify_region`], labeling points within `tol` of a defining
/// hyperplane as [`MajorRegion::Boundary`].
pub fn classify_region_with_tolerance(x: f64, y: f64, tol: f64) -> RegionLabel {
    let f1 = 1.0 + 2.0 * x + y;
    let f2 = 1.0 + x + y;
    let major = if f1 > tol && f2 > tol {
        MajorRegion::Ferromagnetic
    } else if f1 < -tol && x < -tol {
        MajorRegion::Disordered
    } else if f2 < -tol && x > tol {
        MajorRegion::Antiquadrupolar
    } else {
        MajorRegion::Boundary
    };
    let sub = if major == MajorRegion::Disordered && f2 < 0.0 && x < 0.0 {
        if y >= 1.0 {
            SubRegion::A
        } else if y > -1.0 {
            SubRegion::B
        } else {
            SubRegion::C
        }
    } else {
        SubRegion::OutsideU
    };
    RegionLabel { major, sub }
}

/// Unordered spin pair, stored with the smaller spin first.
pub type SpinPair = [Spin; 2];

fn unordered(a: Spin, b: Spin) -> SpinPair {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

/// Lowest-energy bond types, found by minimizing [`pair_energy`] over all
/// nine ordered pairs.
///
/// Minimizers related by the global flip `σ → −σ` form one ground class;
/// more than one class means `(x, y)` sits on a region boundary.
pub fn ground_pairs(x: f64, y: f64) -> Result<BTreeSet<SpinPair>> {
    let energies: Vec<(SpinPair, f64)> = Spin::ALL
        .iter()
        .flat_map(|&a| Spin::ALL.iter().map(move |&b| (a, b)))
        .map(|(a, b)| (unordered(a, b), pair_energy(a, b, x, y)))
        .collect();
    let min = energies.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let minimizers: BTreeSet<SpinPair> = energies
        .iter()
        .filter(|(_, e)| *e <= min + BOUNDARY_TOLERANCE)
        .map(|(p, _)| *p)
        .collect();

    let seed = *minimizers.iter().next().expect("nine pairs");
    let orbit: BTreeSet<SpinPair> = [seed, unordered(-seed[0], -seed[1])].into_iter().collect();
    if minimizers != orbit {
        return Err(Error::DegenerateGround { x, y });
    }
    Ok(minimizers)
}
