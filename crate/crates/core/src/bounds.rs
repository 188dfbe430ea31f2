//! Closed-form upper bounds on the single-site total variation distance.
//!
//! For two boundary conditions `σ`, `σ̃` that differ only at the
//! distinguished neighbor, the exact distance is dominated by
//! `|θ_{+1}| + |θ_{-1}| + |ψ|` ([`lemma1_bound`]). Taking the supremum over
//! the remaining neighbors gives one bound per pair class
//! ([`lemma2_bound`] for `|σ_1| = |σ̃_1|`, [`lemma3_bound`] for
//! `|σ_1| ≠ |σ̃_1|`), and both are dominated by
//! `w(a, b, β) = 4 e^{-aβ} (1 - e^{-bβ})` ([`theorem1_bound`]), whose maximum
//! over `β` is [`r_of_t`]`(a/b)`.
//!
//! Exponentials are combined in log space and `1 - e^{-u}` goes through
//! `expm1`, so large `β` underflows to zero instead of producing `inf * 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{classify_region, ModelParams, NeighborConfig, Spin, SubRegion};
use crate::specification::BoundaryPair;

/// `1 - e^{-u}`.
#[inline]
fn one_minus_exp_neg(u: f64) -> f64 {
    -(-u).exp_m1()
}

/// Exponents of the uniform bound `4 e^{-aβ} (1 - e^{-bβ})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub a: f64,
    pub b: f64,
}

impl ExponentPair {
    pub fn new(a: f64, b: f64) -> Result<ExponentPair> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Domain(format!(
                "exponents must be positive, got a={a}, b={b}"
            )));
        }
        Ok(ExponentPair { a, b })
    }

    /// `w(a, b, β) = 4 e^{-aβ} (1 - e^{-bβ})`.
    pub fn weight(&self, beta: f64) -> f64 {
        4.0 * (-self.a * beta).exp() * one_minus_exp_neg(self.b * beta)
    }

    pub fn ratio(&self) -> f64 {
        self.a / self.b
    }
}

fn sub_region(params: &ModelParams) -> Result<SubRegion> {
    let sub = classify_region(params.x(), params.y()).sub;
    if sub.in_u() {
        Ok(sub)
    } else {
        Err(Error::OutsideUniquenessRegion {
            x: params.x(),
            y: params.y(),
        })
    }
}

/// `a = 2d|x+y+1|` on `A ∪ B`, `2d|x|` on `C`; `b = y+1` on `A`, `2` on `B`,
/// `|y|+1` on `C`.
pub fn exponents(params: &ModelParams) -> Result<ExponentPair> {
    let (x, y) = (params.x(), params.y());
    let two_d = params.coordination() as f64;
    let (a, b) = match sub_region(params)? {
        SubRegion::A => (two_d * (x + y + 1.0).abs(), y + 1.0),
        SubRegion::B => (two_d * (x + y + 1.0).abs(), 2.0),
        SubRegion::C => (two_d * x.abs(), y.abs() + 1.0),
        SubRegion::OutsideU => unreachable!(),
    };
    ExponentPair::new(a, b)
}

pub fn theorem1_bound(params: &ModelParams) -> Result<f64> {
    Ok(exponents(params)?.weight(params.beta()))
}

/// Maximizer of `w(a, b, ·)`: `β_c = ln((a+b)/a) / b`.
pub fn beta_critical(ep: &ExponentPair) -> Result<f64> {
    let ep = ExponentPair::new(ep.a, ep.b)?;
    Ok((ep.b / ep.a).ln_1p() / ep.b)
}

/// `r(t) = 4/(1+t) · (1 + 1/t)^{-t}`, the maximum of `w` over `β` at `t = a/b`.
pub fn r_of_t(t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::Domain(format!("r(t) needs t > 0, got {t}")));
    }
    Ok(4.0 / (1.0 + t) * (-t * t.recip().ln_1p()).exp())
}

fn check_pair(nb: &NeighborConfig, sigma1_tilde: Spin, params: &ModelParams) -> Result<()> {
    if nb.distinguished() == sigma1_tilde {
        return Err(Error::IdenticalPair(sigma1_tilde.value()));
    }
    let expected = params.coordination();
    if nb.spins().len() != expected {
        return Err(Error::NeighborCount {
            expected,
            got: nb.spins().len(),
        });
    }
    Ok(())
}

/// `θ_s(σ, σ̃_1) = e^{β(2dx + yσ²)} (e^{βy(σ̃_1² − σ_1²)} e^{βs(σ̃_1 − σ_1)} − 1) e^{βs Σσ_j}`
/// for the pair exactly as given (no normalization).
pub fn theta(
    s: Spin,
    nb: &NeighborConfig,
    sigma1_tilde: Spin,
    params: &ModelParams,
) -> Result<f64> {
    if s == Spin::ZERO {
        return Err(Error::Domain("theta is defined for s = ±1 only".into()));
    }
    check_pair(nb, sigma1_tilde, params)?;
    let beta = params.beta();
    let s = s.value() as f64;
    let sigma1 = nb.distinguished();
    let d_sq = (sigma1_tilde.squared() - sigma1.squared()) as f64;
    let d_lin = (sigma1_tilde.value() - sigma1.value()) as f64;
    let outer = beta * (2.0 * params.d() as f64 * params.x() + params.y() * nb.sigma_sq() as f64)
        + beta * s * nb.total() as f64;
    let inner = beta * (params.y() * d_sq + s * d_lin);
    Ok(outer.exp() * inner.exp_m1())
}

/// `ψ(σ, σ̃_1) = 2 e^{β(4dx + 2yσ²)} e^{βy(σ̃_1² − σ_1²)} sinh(β(σ̃_1 − σ_1))`
/// for the pair exactly as given.
pub fn psi(nb: &NeighborConfig, sigma1_tilde: Spin, params: &ModelParams) -> Result<f64> {
    check_pair(nb, sigma1_tilde, params)?;
    let beta = params.beta();
    let sigma1 = nb.distinguished();
    let d_sq = (sigma1_tilde.squared() - sigma1.squared()) as f64;
    let z = beta * (sigma1_tilde.value() - sigma1.value()) as f64;
    if z == 0.0 {
        return Ok(0.0);
    }
    let e = beta * (4.0 * params.d() as f64 * params.x() + 2.0 * params.y() * nb.sigma_sq() as f64)
        + beta * params.y() * d_sq;
    // 2 sinh z = sign(z) e^{|z|} (1 - e^{-2|z|})
    Ok(z.signum() * (e + z.abs()).exp() * one_minus_exp_neg(2.0 * z.abs()))
}

/// `θ_{+1}`, `θ_{-1}` and `ψ` of one boundary pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub psi: f64,
}

impl BoundTerms {
    pub fn total(&self) -> f64 {
        self.theta_plus.abs() + self.theta_minus.abs() + self.psi.abs()
    }

    pub fn theta_abs_sum(&self) -> f64 {
        self.theta_plus.abs() + self.theta_minus.abs()
    }
}

/// `θ₊`, `θ₋` and `ψ` of `pair` after normalizing it.
pub fn bound_terms(pair: &BoundaryPair, params: &ModelParams) -> Result<BoundTerms> {
    let p = pair.normalized();
    Ok(BoundTerms {
        theta_plus: theta(Spin::PLUS, &p.sigma, p.sigma1_tilde, params)?,
        theta_minus: theta(Spin::MINUS, &p.sigma, p.sigma1_tilde, params)?,
        psi: psi(&p.sigma, p.sigma1_tilde, params)?,
    })
}

/// `|θ_{+1}| + |θ_{-1}| + |ψ|` for the normalized pair.
pub fn lemma1_bound(nb: &NeighborConfig, sigma1_tilde: Spin, params: &ModelParams) -> Result<f64> {
    let pair = BoundaryPair::new(nb.clone(), sigma1_tilde)?;
    Ok(bound_terms(&pair, params)?.total())
}

/// Uniform bound over pairs with `|σ_1| = |σ̃_1|`.
pub fn lemma2_bound(params: &ModelParams) -> Result<f64> {
    let (x, y, beta) = (params.x(), params.y(), params.beta());
    let two_d = params.coordination() as f64;
    let exponent = match sub_region(params)? {
        SubRegion::A | SubRegion::B => two_d * x + two_d * (y + 1.0),
        SubRegion::C => two_d * x + y + 1.0,
        SubRegion::OutsideU => unreachable!(),
    };
    Ok(4.0 * (beta * exponent).exp() * one_minus_exp_neg(2.0 * beta))
}

/// Uniform bound over pairs with `|σ_1| ≠ |σ̃_1|`.
pub fn lemma3_bound(params: &ModelParams) -> Result<f64> {
    let (x, y, beta) = (params.x(), params.y(), params.beta());
    let two_d = params.coordination() as f64;
    let top = beta * (two_d * x + two_d * (y + 1.0));
    Ok(match sub_region(params)? {
        SubRegion::A => 3.0 * top.exp() * one_minus_exp_neg(beta * (y + 1.0)),
        SubRegion::B => 3.0 * top.exp() * one_minus_exp_neg(2.0 * beta),
        SubRegion::C => 3.0 * (two_d * beta * x).exp() * one_minus_exp_neg(beta * (1.0 - y)),
        SubRegion::OutsideU => unreachable!(),
    })
}

fn check_k(params: &ModelParams, k: usize) -> Result<()> {
    if k >= params.coordination() {
        return Err(Error::Domain(format!(
            "k must be in 0..={}, got {k}",
            params.coordination() - 1
        )));
    }
    Ok(())
}

/// `(1 - e^{-β(y+1)})`, `(1 - e^{-2β})` or `(1 - e^{β(y-1)})` by y-regime;
/// `y = ±1` belong to the outer regimes.
fn regime_factor(beta: f64, y: f64) -> f64 {
    if y >= 1.0 {
        one_minus_exp_neg(beta * (y + 1.0))
    } else if y > -1.0 {
        one_minus_exp_neg(2.0 * beta)
    } else {
        one_minus_exp_neg(beta * (1.0 - y))
    }
}

/// Bound on `|θ_{+1}| + |θ_{-1}|` for `σ_1 = 0`, `σ̃_1 = ±1` with `k` nonzero
/// non-distinguished neighbors. Valid for every `x`.
pub fn theta_sum_bound(params: &ModelParams, k: usize) -> Result<f64> {
    check_k(params, k)?;
    let (x, y, beta) = (params.x(), params.y(), params.beta());
    let k = k as f64;
    let two_dx = params.coordination() as f64 * x;
    let exponent = if y > -1.0 {
        two_dx + (k + 1.0) * (y + 1.0)
    } else {
        two_dx + k * (y + 1.0)
    };
    Ok(2.0 * (beta * exponent).exp() * regime_factor(beta, y))
}

/// Bound on `|ψ|` for `σ_1 = 0`, `σ̃_1 = ±1` with `k` nonzero
/// non-distinguished neighbors. Valid for every `x`.
pub fn psi_bound(params: &ModelParams, k: usize) -> Result<f64> {
    check_k(params, k)?;
    let (x, y, beta) = (params.x(), params.y(), params.beta());
    let exponent = 2.0 * params.coordination() as f64 * x + (2.0 * k as f64 + 1.0) * y + 1.0;
    Ok((beta * exponent).exp() * regime_factor(beta, y))
}

/// Whichever of [`lemma2_bound`] / [`lemma3_bound`] covers this pair's class.
pub fn case_bound(pair: &BoundaryPair, params: &ModelParams) -> Result<f64> {
    if pair.sigma1().squared() == pair.sigma1_tilde.squared() {
        lemma2_bound(params)
    } else {
        lemma3_bound(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(x: f64, y: f64, beta: f64, d: usize) -> ModelParams {
        ModelParams::new(x, y, beta, d).unwrap()
    }

    fn nb(v: &[i32]) -> NeighborConfig {
        NeighborConfig::from_values(v).unwrap()
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(
            exponents(&params(-5.0, 2.0, 1.0, 2)).unwrap(),
            ExponentPair { a: 8.0, b: 3.0 }
        );
        assert_eq!(
            exponents(&params(-3.0, 0.0, 1.0, 2)).unwrap(),
            ExponentPair { a: 8.0, b: 2.0 }
        );
        assert_eq!(
            exponents(&params(-1.0, -3.0, 1.0, 2)).unwrap(),
            ExponentPair { a: 4.0, b: 4.0 }
        );
        assert!(matches!(
            exponents(&params(1.0, -3.0, 1.0, 2)),
            Err(Error::OutsideUniquenessRegion { .. })
        ));
    }

    #[test]
    fn theorem1_vanishes_at_both_ends() {
        let p = params(-5.0, 2.0, 0.0, 2);
        assert_eq!(theorem1_bound(&p).unwrap(), 0.0);
        assert_eq!(theorem1_bound(&p.with_beta(1e4).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn theorem1_at_beta_critical_is_r() {
        let p = params(-5.0, 2.0, 1.0, 2);
        let ep = exponents(&p).unwrap();
        let bc = beta_critical(&ep).unwrap();
        let w = theorem1_bound(&p.with_beta(bc).unwrap()).unwrap();
        // independent route: e^{-β_c b} = a/(a+b) so w = 4 (a/(a+b))^{a/b} · b/(a+b)
        let (a, b) = (8.0f64, 3.0f64);
        let direct = 4.0 * (a / (a + b)).powf(a / b) * (b / (a + b));
        assert!((w - direct).abs() < 1e-12);
        assert!((w - r_of_t(8.0 / 3.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn beta_critical_examples() {
        let bc = beta_critical(&ExponentPair { a: 1.0, b: 1.0 }).unwrap();
        assert!((bc - 2f64.ln()).abs() < 1e-15);
        assert!(((-bc).exp() - 0.5).abs() < 1e-15);
        assert!(beta_critical(&ExponentPair { a: 0.0, b: 1.0 }).is_err());
        assert!(beta_critical(&ExponentPair { a: 1.0, b: -1.0 }).is_err());
    }

    #[test]
    fn r_examples() {
        assert!((r_of_t(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((r_of_t(5.39315).unwrap() - 0.25).abs() < 1e-4);
        assert!((r_of_t(8.33383).unwrap() - 1.0 / 6.0).abs() < 1e-4);
        assert!(r_of_t(0.0).is_err());
        assert!(r_of_t(-1.0).is_err());
    }

    #[test]
    fn theta_psi_vanish_at_beta_zero() {
        let p = params(-5.0, 2.0, 0.0, 2);
        let n = nb(&[-1, 0, 1, 0]);
        for s in [Spin::MINUS, Spin::PLUS] {
            assert_eq!(theta(s, &n, Spin::PLUS, &p).unwrap(), 0.0);
        }
        assert_eq!(psi(&n, Spin::PLUS, &p).unwrap(), 0.0);
        assert_eq!(lemma1_bound(&n, Spin::PLUS, &p).unwrap(), 0.0);
    }

    #[test]
    fn theta_argument_checks() {
        let p = params(-5.0, 2.0, 0.5, 2);
        let n = nb(&[-1, 0, 1, 0]);
        assert!(theta(Spin::ZERO, &n, Spin::PLUS, &p).is_err());
        assert!(matches!(
            theta(Spin::PLUS, &n, Spin::MINUS, &p),
            Err(Error::IdenticalPair(-1))
        ));
        assert!(psi(&n, Spin::MINUS, &p).is_err());
    }

    #[test]
    fn theta_tie_inner_factor() {
        // σ_1 = -1, σ̃_1 = +1: inner factor is e^{2βs} - 1 whatever y is
        let beta = 0.7;
        let p = params(-2.5, 3.3, beta, 2);
        let n = nb(&[-1, 1, 0, 1]);
        let outer = (beta * (4.0 * -2.5 + 3.3 * 3.0)).exp();
        for s in [-1.0f64, 1.0] {
            let expected = outer * (2.0 * beta * s).exp_m1() * (beta * s * 1.0).exp();
            let spin = Spin::new(s as i32).unwrap();
            let got = theta(spin, &n, Spin::PLUS, &p).unwrap();
            assert!((got - expected).abs() <= 1e-15 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn psi_sign_symmetry_from_zero() {
        let p = params(-1.0, -3.0, 1.3, 2);
        let n = nb(&[0, 1, -1, 1]);
        let up = psi(&n, Spin::PLUS, &p).unwrap();
        let down = psi(&n, Spin::MINUS, &p).unwrap();
        assert!((up + down).abs() < 1e-18);
        assert!(up > 0.0);
    }

    #[test]
    fn psi_tie_closed_form() {
        let (beta, x, y) = (0.9, -2.0, 0.4);
        let p = params(x, y, beta, 2);
        let n = nb(&[-1, 1, 0, -1]);
        let k = 2.0;
        let expected = 2.0 * (beta * (8.0 * x + 2.0 * (k + 1.0) * y)).exp() * (2.0 * beta).sinh();
        let got = psi(&n, Spin::PLUS, &p).unwrap();
        assert!((got - expected).abs() < 1e-15 * expected);
    }

    #[test]
    fn lemma1_regression() {
        let p = params(-3.0, 0.0, 1.0, 2);
        let got = lemma1_bound(&nb(&[0, 1, 1, -1]), Spin::PLUS, &p).unwrap();
        let e = std::f64::consts::E;
        let closed = (-11f64).exp() * (e - 1.0)
            + (-13f64).exp() * (1.0 - 1.0 / e)
            + 2.0 * (-24f64).exp() * 1f64.sinh();
        assert!((got - closed).abs() < 1e-18);
        assert!((got - 3.012711839096913e-05).abs() < 1e-17);
    }

    #[test]
    fn lemma1_normalizes_unordered_pairs() {
        let p = params(-3.0, 0.5, 1.1, 2);
        let a = lemma1_bound(&nb(&[1, 1, 0, -1]), Spin::ZERO, &p).unwrap();
        let b = lemma1_bound(&nb(&[0, 1, 0, -1]), Spin::PLUS, &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lemma_bounds_at_beta_zero() {
        for &(x, y) in &[(-5.0, 2.0), (-3.0, 0.0), (-1.0, -3.0)] {
            let p = params(x, y, 0.0, 2);
            assert_eq!(lemma2_bound(&p).unwrap(), 0.0);
            assert_eq!(lemma3_bound(&p).unwrap(), 0.0);
            for k in 0..4 {
                assert_eq!(theta_sum_bound(&p, k).unwrap(), 0.0);
                assert_eq!(psi_bound(&p, k).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn lemma3_region_c_example() {
        let p = params(-1.0, -3.0, 1.0, 2);
        let expected = 3.0 * (-4f64).exp() * (1.0 - (-4f64).exp());
        assert!((lemma3_bound(&p).unwrap() - expected).abs() < 1e-16);
    }

    #[test]
    fn lemma_bounds_need_u() {
        let p = params(1.0, -3.0, 1.0, 2);
        assert!(lemma2_bound(&p).is_err());
        assert!(lemma3_bound(&p).is_err());
        assert!(theorem1_bound(&p).is_err());
    }

    #[test]
    fn k_range_checked() {
        let p = params(-3.0, 0.0, 1.0, 2);
        assert!(theta_sum_bound(&p, 3).is_ok());
        assert!(theta_sum_bound(&p, 4).is_err());
        assert!(psi_bound(&p, 4).is_err());
    }

    #[test]
    fn theta_sum_branches_agree_at_y_one() {
        let (x, beta) = (-4.0, 0.8);
        for k in 0..4 {
            let at = theta_sum_bound(&params(x, 1.0, beta, 2), k).unwrap();
            let expected = 2.0
                * (beta * (4.0 * x + 2.0 * (k as f64 + 1.0))).exp()
                * (1.0 - (-2.0 * beta).exp());
            assert!((at - expected).abs() < 1e-15);
            let below = theta_sum_bound(&params(x, 1.0 - 1e-12, beta, 2), k).unwrap();
            assert!((at - below).abs() < 1e-11);
        }
    }

    #[test]
    fn sinh_identity() {
        for i in 0..200 {
            let beta = i as f64 * 0.05;
            let lhs = 2.0 * beta.sinh();
            let rhs = beta.exp() * (1.0 - (-2.0 * beta).exp());
            assert!((lhs - rhs).abs() <= 1e-14 * lhs.max(1.0));
        }
    }

    #[test]
    fn case_bound_selects_class() {
        let p = params(-5.0, 2.0, 0.5, 2);
        let tie = BoundaryPair::new(nb(&[-1, 0, 0, 0]), Spin::PLUS).unwrap();
        let step = BoundaryPair::new(nb(&[0, 0, 0, 0]), Spin::PLUS).unwrap();
        assert_eq!(case_bound(&tie, &p).unwrap(), lemma2_bound(&p).unwrap());
        assert_eq!(case_bound(&step, &p).unwrap(), lemma3_bound(&p).unwrap());
    }
}
