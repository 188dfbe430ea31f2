//! Grid sweeps that check every closed-form bound against exact enumeration.
//!
//! For each point and inverse temperature, all normalized boundary pairs are
//! enumerated; each requested check records a slack (bound minus the
//! quantity it dominates) per cell. A check passes when its worst slack is at
//! least `-SLACK_TOLERANCE`; [`CheckKind::DobrushinSatisfied`] instead needs
//! a strictly positive margin `1/(2d) - max_tv` in every cell.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, exponents, lemma2_bound, lemma3_bound, r_of_t, theorem1_bound};
use crate::error::{Error, Result};
use crate::model::{classify_region, ModelParams, NeighborConfig, Spin, SubRegion};
use crate::specification::{boundary_pairs, exact_max_tv, BoundaryPair};

/// Round-off allowance on analytically true inequalities.
pub const SLACK_TOLERANCE: f64 = 1e-12;

/// Failing cells kept per check, in sweep order.
pub const MAX_WITNESSES: usize = 20;

pub const GIT_REV: &str = env!("BEG_GIT_REV");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CheckKind {
    /// exact TV ≤ |θ₊| + |θ₋| + |ψ|, every pair.
    #[serde(rename = "TVvsLemma1")]
    TvVsLemma1,
    /// Single-pair bound ≤ [`lemma2_bound`] on `|σ_1| = |σ̃_1|` pairs.
    #[serde(rename = "Lemma1vsLemma2")]
    Lemma1VsLemma2,
    /// Single-pair bound ≤ [`lemma3_bound`] on `σ_1 = 0` pairs.
    #[serde(rename = "Lemma1vsLemma3")]
    Lemma1VsLemma3,
    /// `Σ|θ_s|` and `|ψ|` under their per-`k` bounds on `σ_1 = 0` pairs.
    #[serde(rename = "IntermediateBounds")]
    IntermediateBounds,
    /// Both case bounds ≤ `4e^{-aβ}(1 - e^{-bβ})`.
    #[serde(rename = "AllvsTheorem1")]
    AllVsTheorem1,
    /// `4e^{-aβ}(1 - e^{-bβ}) ≤ r(a/b)`.
    #[serde(rename = "Theorem1vsRate")]
    Theorem1VsRate,
    /// exact max TV < 1/(2d).
    #[serde(rename = "DobrushinSatisfied")]
    DobrushinSatisfied,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::TvVsLemma1,
        CheckKind::Lemma1VsLemma2,
        CheckKind::Lemma1VsLemma3,
        CheckKind::IntermediateBounds,
        CheckKind::AllVsTheorem1,
        CheckKind::Theorem1VsRate,
        CheckKind::DobrushinSatisfied,
    ];

    /// The domination chain, without the Dobrushin condition itself.
    pub const BOUND_CHAIN: [CheckKind; 6] = [
        CheckKind::TvVsLemma1,
        CheckKind::Lemma1VsLemma2,
        CheckKind::Lemma1VsLemma3,
        CheckKind::IntermediateBounds,
        CheckKind::AllVsTheorem1,
        CheckKind::Theorem1VsRate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::TvVsLemma1 => "TVvsLemma1",
            CheckKind::Lemma1VsLemma2 => "Lemma1vsLemma2",
            CheckKind::Lemma1VsLemma3 => "Lemma1vsLemma3",
            CheckKind::IntermediateBounds => "IntermediateBounds",
            CheckKind::AllVsTheorem1 => "AllvsTheorem1",
            CheckKind::Theorem1VsRate => "Theorem1vsRate",
            CheckKind::DobrushinSatisfied => "DobrushinSatisfied",
        }
    }

    /// Whether the check is only defined on `A ∪ B ∪ C`.
    pub fn needs_u(self) -> bool {
        matches!(
            self,
            CheckKind::Lemma1VsLemma2
                | CheckKind::Lemma1VsLemma3
                | CheckKind::AllVsTheorem1
                | CheckKind::Theorem1VsRate
        )
    }

    pub fn cell_passes(self, slack: f64) -> bool {
        match self {
            CheckKind::DobrushinSatisfied => slack > 0.0,
            _ => slack >= -SLACK_TOLERANCE,
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<CheckKind> {
        CheckKind::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidSweep(format!("unknown check `{s}`")))
    }
}

/// `n` logarithmically spaced points from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, n: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min && min.is_finite() && max.is_finite()) {
        return Err(Error::InvalidSweep(format!(
            "log grid needs 0 < min < max, got [{min}, {max}]"
        )));
    }
    match n {
        0 => Ok(Vec::new()),
        1 => Ok(vec![min]),
        _ => {
            let (lo, hi) = (min.ln(), max.ln());
            let step = (hi - lo) / (n - 1) as f64;
            let mut grid: Vec<f64> = (0..n).map(|i| (lo + step * i as f64).exp()).collect();
            grid[0] = min;
            grid[n - 1] = max;
            Ok(grid)
        }
    }
}

/// Default inverse-temperature grid: 40 log-spaced points on `[1e-3, 50]`.
pub fn default_beta_grid() -> Vec<f64> {
    log_grid(1e-3, 50.0, 40).expect("valid default grid")
}

/// Uniform random point strictly inside the strip `sub`, with `|y| ≤ 5` and
/// at most 8 below the `x + y + 1 = 0` (or `x = 0`) edge.
pub fn sample_point<R: Rng + ?Sized>(sub: SubRegion, rng: &mut R) -> Result<(f64, f64)> {
    const MARGIN: f64 = 1e-3;
    const DEPTH: f64 = 8.0;
    let (x, y) = match sub {
        SubRegion::A => {
            let y = rng.random_range(1.0..5.0);
            (rng.random_range(-(y + 1.0) - DEPTH..-(y + 1.0) - MARGIN), y)
        }
        SubRegion::B => {
            let y = rng.random_range(-1.0 + MARGIN..1.0);
            (rng.random_range(-(y + 1.0) - DEPTH..-(y + 1.0) - MARGIN), y)
        }
        SubRegion::C => {
            let y = rng.random_range(-5.0..=-1.0);
            (rng.random_range(-DEPTH..-MARGIN), y)
        }
        SubRegion::OutsideU => {
            return Err(Error::InvalidSweep(
                "cannot sample outside A ∪ B ∪ C".into(),
            ))
        }
    };
    debug_assert_eq!(classify_region(x, y).sub, sub);
    Ok((x, y))
}

/// What to sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub d: usize,
    pub points: Vec<(f64, f64)>,
    pub beta_grid: Vec<f64>,
    pub checks: BTreeSet<CheckKind>,
    /// Worker threads; `None` uses the available parallelism.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl SweepSpec {
    pub fn new(
        d: usize,
        points: Vec<(f64, f64)>,
        beta_grid: Vec<f64>,
        checks: impl IntoIterator<Item = CheckKind>,
    ) -> Result<Self> {
        let spec = SweepSpec {
            d,
            points,
            beta_grid,
            checks: checks.into_iter().collect(),
            workers: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `per_region` seeded random points in each of `A`, `B`, `C`, the
    /// default grid, and the full bound chain.
    pub fn certification(d: usize, per_region: usize, seed: u64) -> Result<Self> {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let mut points = Vec::with_capacity(3 * per_region);
        for sub in [SubRegion::A, SubRegion::B, SubRegion::C] {
            for _ in 0..per_region {
                points.push(sample_point(sub, &mut rng)?);
            }
        }
        SweepSpec::new(d, points, default_beta_grid(), CheckKind::BOUND_CHAIN)
    }

    pub fn with_workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidSweep("dimension must be >= 1".into()));
        }
        if self.beta_grid.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::InvalidSweep(
                "beta grid values must be finite and >= 0".into(),
            ));
        }
        if self.beta_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSweep(
                "beta grid must be strictly increasing".into(),
            ));
        }
        if let Some((x, y)) = self
            .points
            .iter()
            .find(|(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::InvalidSweep(format!("non-finite point ({x}, {y})")));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidSweep("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// One evaluated cell: point, inverse temperature, and for pair-level
/// checks the boundary pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<Spin>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma1_tilde: Option<Spin>,
    pub slack: f64,
}

impl Witness {
    fn cell(x: f64, y: f64, beta: f64, slack: f64) -> Witness {
        Witness {
            x,
            y,
            beta,
            sigma: None,
            sigma1_tilde: None,
            slack,
        }
    }

    fn pair(x: f64, y: f64, beta: f64, pair: &BoundaryPair, slack: f64) -> Witness {
        Witness {
            x,
            y,
            beta,
            sigma: Some(pair.sigma.spins().to_vec()),
            sigma1_tilde: Some(pair.sigma1_tilde),
            slack,
        }
    }

    pub fn boundary_pair(&self) -> Result<Option<BoundaryPair>> {
        match (&self.sigma, self.sigma1_tilde) {
            (Some(s), Some(t)) => Ok(Some(BoundaryPair::new(NeighborConfig::new(s.clone())?, t)?)),
            _ => Ok(None),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: CheckKind,
    pub pass: bool,
    pub cells_checked: u64,
    pub cells_failed: u64,
    /// Minimum slack over all checked cells; `None` if nothing was checked.
    pub worst_slack: Option<f64>,
    pub worst: Option<Witness>,
    /// First failing cells in sweep order, at most [`MAX_WITNESSES`].
    pub witnesses: Vec<Witness>,
    /// Points the check is not defined at (outside `A ∪ B ∪ C`).
    pub skipped_points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub d: usize,
    pub grid: Vec<f64>,
    pub git_rev: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub meta: SweepMeta,
    pub checks: Vec<CheckReport>,
}

impl SweepReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, kind: CheckKind) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Default)]
struct Accumulator {
    checked: u64,
    failed: u64,
    worst: Option<Witness>,
    witnesses: Vec<Witness>,
    skipped: Vec<(f64, f64)>,
}

impl Accumulator {
    fn record(&mut self, kind: CheckKind, slack: f64, witness: impl FnOnce(f64) -> Witness) {
        self.checked += 1;
        let fails = !kind.cell_passes(slack);
        let new_worst = self.worst.as_ref().is_none_or(|w| slack < w.slack);
        if !fails && !new_worst {
            return;
        }
        let w = witness(slack);
        if fails {
            self.failed += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w.clone());
            }
        }
        if new_worst {
            self.worst = Some(w);
        }
    }

    fn merge(&mut self, other: Accumulator) {
        self.checked += other.checked;
        self.failed += other.failed;
        if let Some(w) = other.worst {
            if self.worst.as_ref().is_none_or(|cur| w.slack < cur.slack) {
                self.worst = Some(w);
            }
        }
        let room = MAX_WITNESSES.saturating_sub(self.witnesses.len());
        self.witnesses
            .extend(other.witnesses.into_iter().take(room));
        self.skipped.extend(other.skipped);
    }

    fn finish(self, kind: CheckKind) -> CheckReport {
        CheckReport {
            name: kind,
            pass: self.failed == 0,
            cells_checked: self.checked,
            cells_failed: self.failed,
            worst_slack: self.worst.as_ref().map(|w| w.slack),
            worst: self.worst,
            witnesses: self.witnesses,
            skipped_points: self.skipped,
        }
    }
}

struct PointResult(BTreeMap<CheckKind, Accumulator>);

fn pair_slacks(
    kind: CheckKind,
    pair: &BoundaryPair,
    params: &ModelParams,
    tv: f64,
    terms: &bounds::BoundTerms,
    case: &Option<(f64, f64)>,
) -> Result<Option<f64>> {
    let lemma1 = terms.total();
    let zero_start = pair.sigma1() == Spin::ZERO;
    Ok(match kind {
        CheckKind::TvVsLemma1 => Some(lemma1 - tv),
        CheckKind::Lemma1VsLemma2 => match case {
            Some((l2, _)) if !zero_start => Some(l2 - lemma1),
            _ => None,
        },
        CheckKind::Lemma1VsLemma3 => match case {
            Some((_, l3)) if zero_start => Some(l3 - lemma1),
            _ => None,
        },
        CheckKind::IntermediateBounds if zero_start => {
            let k = pair.sigma.k();
            let theta_slack = bounds::theta_sum_bound(params, k)? - terms.theta_abs_sum();
            let psi_slack = bounds::psi_bound(params, k)? - terms.psi.abs();
            Some(theta_slack.min(psi_slack))
        }
        _ => None,
    })
}

fn cell_slack(kind: CheckKind, params: &ModelParams, max_tv: f64) -> Result<Option<f64>> {
    Ok(match kind {
        CheckKind::AllVsTheorem1 => {
            Some(theorem1_bound(params)? - lemma2_bound(params)?.max(lemma3_bound(params)?))
        }
        CheckKind::Theorem1VsRate => {
            Some(r_of_t(exponents(params)?.ratio())? - theorem1_bound(params)?)
        }
        CheckKind::DobrushinSatisfied => Some(1.0 / params.coordination() as f64 - max_tv),
        _ => None,
    })
}

fn sweep_point(spec: &SweepSpec, (x, y): (f64, f64)) -> Result<PointResult> {
    let in_u = classify_region(x, y).sub.in_u();
    let mut accs: BTreeMap<CheckKind, Accumulator> = spec
        .checks
        .iter()
        .map(|&c| (c, Accumulator::default()))
        .collect();
    let active: Vec<CheckKind> = spec
        .checks
        .iter()
        .copied()
        .filter(|c| in_u || !c.needs_u())
        .collect();
    for (kind, acc) in accs.iter_mut() {
        if !active.contains(kind) {
            acc.skipped.push((x, y));
        }
    }
    let pair_level: Vec<CheckKind> = active
        .iter()
        .copied()
        .filter(|c| {
            matches!(
                c,
                CheckKind::TvVsLemma1
                    | CheckKind::Lemma1VsLemma2
                    | CheckKind::Lemma1VsLemma3
                    | CheckKind::IntermediateBounds
            )
        })
        .collect();
    let cell_level: Vec<CheckKind> = active
        .iter()
        .copied()
        .filter(|c| {
            matches!(
                c,
                CheckKind::AllVsTheorem1
                    | CheckKind::Theorem1VsRate
                    | CheckKind::DobrushinSatisfied
            )
        })
        .collect();
    if pair_level.is_empty() && cell_level.is_empty() {
        return Ok(PointResult(accs));
    }

    let pairs: Vec<BoundaryPair> = boundary_pairs(spec.d)?.collect();
    for &beta in &spec.beta_grid {
        let params = ModelParams::new(x, y, beta, spec.d)?;
        let case = if in_u {
            Some((lemma2_bound(&params)?, lemma3_bound(&params)?))
        } else {
            None
        };
        let mut max_tv = 0.0f64;
        let mut argmax: Option<&BoundaryPair> = None;
        for pair in &pairs {
            let tv = pair.exact_tv(&params)?;
            if argmax.is_none() || tv > max_tv {
                max_tv = tv;
                argmax = Some(pair);
            }
            if pair_level.is_empty() {
                continue;
            }
            let terms = bounds::bound_terms(pair, &params)?;
            for &kind in &pair_level {
                if let Some(slack) = pair_slacks(kind, pair, &params, tv, &terms, &case)? {
                    accs.get_mut(&kind)
                        .expect("active check")
                        .record(kind, slack, |s| Witness::pair(x, y, beta, pair, s));
                }
            }
        }
        for &kind in &cell_level {
            if let Some(slack) = cell_slack(kind, &params, max_tv)? {
                let acc = accs.get_mut(&kind).expect("active check");
                match (kind, argmax) {
                    (CheckKind::DobrushinSatisfied, Some(p)) => {
                        acc.record(kind, slack, |s| Witness::pair(x, y, beta, p, s))
                    }
                    _ => acc.record(kind, slack, |s| Witness::cell(x, y, beta, s)),
                }
            }
        }
    }
    Ok(PointResult(accs))
}

/// Runs every requested check over `points × beta_grid`.
///
/// Points are processed in parallel and merged in input order, so the
/// report does not depend on the worker count.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    // surface capacity errors even when there are no points
    if spec
        .checks
        .iter()
        .any(|c| !matches!(c, CheckKind::AllVsTheorem1 | CheckKind::Theorem1VsRate))
    {
        let _ = crate::specification::neighbor_completions(spec.d)?;
    }
    let workers = spec.workers.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidSweep(format!("thread pool: {e}")))?;
    let partials: Vec<PointResult> = pool.install(|| {
        spec.points
            .par_iter()
            .map(|&p| sweep_point(spec, p))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut merged: BTreeMap<CheckKind, Accumulator> = spec
        .checks
        .iter()
        .map(|&c| (c, Accumulator::default()))
        .collect();
    for PointResult(part) in partials {
        for (kind, acc) in part {
            merged.get_mut(&kind).expect("same check set").merge(acc);
        }
    }
    Ok(SweepReport {
        meta: SweepMeta {
            d: spec.d,
            grid: spec.beta_grid.clone(),
            git_rev: GIT_REV.to_string(),
            points: spec.points.clone(),
        },
        checks: merged.into_iter().map(|(k, acc)| acc.finish(k)).collect(),
    })
}

/// Recomputes the slack recorded in `witness` for `kind` at dimension `d`.
pub fn evaluate_witness(kind: CheckKind, d: usize, witness: &Witness) -> Result<f64> {
    let params = ModelParams::new(witness.x, witness.y, witness.beta, d)?;
    let in_u = classify_region(witness.x, witness.y).sub.in_u();
    if kind.needs_u() && !in_u {
        return Err(Error::OutsideUniquenessRegion {
            x: witness.x,
            y: witness.y,
        });
    }
    match kind {
        CheckKind::AllVsTheorem1 | CheckKind::Theorem1VsRate => {
            Ok(cell_slack(kind, &params, 0.0)?.expect("cell-level check"))
        }
        CheckKind::DobrushinSatisfied => {
            let report = exact_max_tv(&params)?;
            Ok(cell_slack(kind, &params, report.max_tv)?.expect("cell-level check"))
        }
        _ => {
            let pair = witness.boundary_pair()?.ok_or_else(|| {
                Error::InvalidSweep(format!("{kind} witness needs a boundary pair"))
            })?;
            let tv = pair.exact_tv(&params)?;
            let terms = bounds::bound_terms(&pair, &params)?;
            let case = if in_u {
                Some((lemma2_bound(&params)?, lemma3_bound(&params)?))
            } else {
                None
            };
            pair_slacks(kind, &pair, &params, tv, &terms, &case)?
                .ok_or_else(|| Error::InvalidSweep(format!("{kind} does not apply to this pair")))
        }
    }
}

/// Where to look for a low-temperature failure of the Dobrushin condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FailureScan {
    pub beta_min: f64,
    pub beta_max: f64,
    pub steps: usize,
    /// Bisection width in `β` after the first failing grid point.
    pub tolerance: f64,
}

impl Default for FailureScan {
    fn default() -> Self {
        FailureScan {
            beta_min: 1e-3,
            beta_max: 100.0,
            steps: 400,
            tolerance: 1e-6,
        }
    }
}

impl FailureScan {
    /// Smallest `β` (to within `tolerance`) at which `max_tv ≥ 1/(2d)`:
    /// first failing grid point, then bisection against the grid point before
    /// it. `None` if the condition holds on the whole grid.
    pub fn run(&self, d: usize, x: f64, y: f64) -> Result<Option<f64>> {
        let fails = |beta: f64| -> Result<bool> {
            Ok(!exact_max_tv(&ModelParams::new(x, y, beta, d)?)?.satisfied)
        };
        let grid = log_grid(self.beta_min, self.beta_max, self.steps)?;
        let mut prev: Option<f64> = None;
        for &beta in &grid {
            if fails(beta)? {
                let Some(mut lo) = prev else {
                    return Ok(Some(beta));
                };
                let mut hi = beta;
                while hi - lo > self.tolerance {
                    let mid = 0.5 * (lo + hi);
                    if fails(mid)? {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Ok(Some(hi));
            }
            prev = Some(beta);
        }
        Ok(None)
    }
}

pub fn find_failure_beta(d: usize, x: f64, y: f64) -> Result<Option<f64>> {
    FailureScan::default().run(d, x, y)
}
