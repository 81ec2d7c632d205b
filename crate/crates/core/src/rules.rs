//! Scale-sign invariant interval rules and their coverage probabilities.
//!
//! A rule `[c1, c2]` reports `c1 X <= mu <= c2 X` when `X > 0` and
//! `c2 X <= mu <= c1 X` when `X < 0`. With `lambda = mu / sigma` the
//! coverage is
//!
//! ```text
//! P(lambda; c1, c2) = Phi(|lambda| (1 - 1/c2)) - Phi(|lambda| (1 - 1/c1)) + 1{c1 <= 0 <= c2}
//! ```
//!
//! for `lambda != 0`, with `1/0` read as `-inf` for a lower endpoint at zero
//! (the limit `c1 -> 0-`) and `+inf` for an upper endpoint at zero
//! (`c2 -> 0+`). At `lambda = 0` the event reduces to the indicator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::brent_minimize;
use crate::special::{norm_cdf, norm_pdf, Probability};

/// Maximum number of components a mixture may carry.
pub const MAX_COMPONENTS: usize = 8;
/// Tolerance on the sum of mixture weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// One non-randomized invariant interval rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntervalRule {
    /// The rule that never reports an interval.
    Empty,
    Proper { c1: f64, c2: f64 },
}

impl IntervalRule {
    /// Builds `[c1, c2]`; `[0, 0]` becomes [`IntervalRule::Empty`].
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if c1 == 0.0 && c2 == 0.0 {
            return Ok(IntervalRule::Empty);
        }
        if !c1.is_finite() || !c2.is_finite() || c1 >= c2 {
            return Err(Error::InvalidRule { c1, c2 });
        }
        Ok(IntervalRule::Proper { c1, c2 })
    }

    pub fn empty() -> Self {
        IntervalRule::Empty
    }

    pub fn endpoints(&self) -> Option<(f64, f64)> {
        match *self {
            IntervalRule::Empty => None,
            IntervalRule::Proper { c1, c2 } => Some((c1, c2)),
        }
    }

    /// Multiplier length `c2 - c1` (0 for the empty rule).
    pub fn length(&self) -> f64 {
        self.endpoints().map_or(0.0, |(c1, c2)| c2 - c1)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            IntervalRule::Empty => Ok(()),
            IntervalRule::Proper { c1, c2 } => IntervalRule::new(c1, c2).map(|_| ()),
        }
    }
}

/// Coefficient `1 - 1/c` of `lambda` in the Phi term of a lower endpoint.
#[inline]
fn lower_slope(c1: f64) -> f64 {
    if c1 == 0.0 {
        f64::INFINITY
    } else {
        1.0 - 1.0 / c1
    }
}

/// Coefficient `1 - 1/c` of `lambda` in the Phi term of an upper endpoint.
#[inline]
fn upper_slope(c2: f64) -> f64 {
    if c2 == 0.0 {
        f64::NEG_INFINITY
    } else {
        1.0 - 1.0 / c2
    }
}

/// Precomputed slopes of one proper component.
#[derive(Debug, Clone, Copy)]
struct Term {
    weight: f64,
    d1: f64,
    d2: f64,
    straddles: bool,
}

impl Term {
    fn of(rule: &IntervalRule, weight: f64) -> Option<Term> {
        rule.endpoints().map(|(c1, c2)| Term {
            weight,
            d1: lower_slope(c1),
            d2: upper_slope(c2),
            straddles: c1 <= 0.0 && 0.0 <= c2,
        })
    }

    /// Coverage at `lam >= 0`.
    #[inline]
    fn coverage(&self, lam: f64) -> f64 {
        if lam == 0.0 {
            return if self.straddles { 1.0 } else { 0.0 };
        }
        let a1 = lam * self.d1;
        let a2 = lam * self.d2;
        let v = if self.straddles {
            norm_cdf(a2) + norm_cdf(-a1)
        } else if a1 > 0.0 {
            // both arguments positive: difference of upper tails
            norm_cdf(-a1) - norm_cdf(-a2)
        } else {
            norm_cdf(a2) - norm_cdf(a1)
        };
        v.clamp(0.0, 1.0)
    }

    #[inline]
    fn dlambda(&self, lam: f64) -> f64 {
        fn part(d: f64, lam: f64) -> f64 {
            if d.is_finite() {
                d * norm_pdf(lam * d)
            } else {
                0.0
            }
        }
        part(self.d2, lam) - part(self.d1, lam)
    }

    fn limit(&self, at: LimitPoint) -> f64 {
        let phi_limit = |d: f64| match at {
            LimitPoint::ZeroPlus => {
                if d.is_infinite() {
                    if d > 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    0.5
                }
            }
            LimitPoint::Infinity => {
                if d > 0.0 {
                    1.0
                } else if d < 0.0 {
                    0.0
                } else {
                    0.5
                }
            }
        };
        let ind: f64 = if self.straddles { 1.0 } else { 0.0 };
        (phi_limit(self.d2) - phi_limit(self.d1) + ind).clamp(0.0, 1.0)
    }
}

/// A finite probability mixture of interval rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureRule {
    components: Vec<(IntervalRule, f64)>,
}

impl MixtureRule {
    /// Validates weights (positive, summing to one) and the component count.
    pub fn new(components: Vec<(IntervalRule, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidMixture("no components".into()));
        }
        if components.len() > MAX_COMPONENTS {
            return Err(Error::InvalidMixture(format!(
                "{} components, at most {MAX_COMPONENTS} allowed",
                components.len()
            )));
        }
        for (rule, w) in &components {
            rule.validate()?;
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidMixture(format!(
                    "weight {w} is not strictly positive"
                )));
            }
        }
        let total: f64 = components.iter().map(|c| c.1).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMixture(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(MixtureRule { components })
    }

    pub fn single(rule: IntervalRule) -> Self {
        MixtureRule {
            components: vec![(rule, 1.0)],
        }
    }

    pub fn components(&self) -> &[(IntervalRule, f64)] {
        &self.components
    }

    fn terms(&self) -> Vec<Term> {
        self.components
            .iter()
            .filter_map(|(r, w)| Term::of(r, *w))
            .collect()
    }
}

/// Where a coverage limit is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitPoint {
    ZeroPlus,
    Infinity,
}

/// Location of the infimum of coverage over `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaStar {
    Finite(f64),
    /// The infimum is the `lambda -> inf` limit.
    AtInfinity,
}

/// Result of minimizing coverage over `lambda > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaMin {
    pub lambda_star: LambdaStar,
    pub min_coverage: Probability,
    /// End of the scanned range: the first `lambda` with a positive
    /// derivative, or where the scan stopped.
    pub derivative_bound_lambda: f64,
}

fn check_lambda(func: &'static str, lambda: f64) -> Result<()> {
    if lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(func, format!("lambda must be finite, got {lambda}")))
    }
}

/// Exact coverage probability of one rule.
pub fn coverage(lambda: f64, rule: &IntervalRule) -> Result<Probability> {
    check_lambda("coverage", lambda)?;
    rule.validate()?;
    Ok(Probability::clamped(
        Term::of(rule, 1.0).map_or(0.0, |t| t.coverage(lambda.abs())),
    ))
}

/// Weighted coverage of a mixture.
pub fn coverage_mixture(lambda: f64, mix: &MixtureRule) -> Result<Probability> {
    check_lambda("coverage_mixture", lambda)?;
    Ok(Probability::clamped(mixture_coverage_abs(
        &mix.terms(),
        lambda.abs(),
    )))
}

#[inline]
fn mixture_coverage_abs(terms: &[Term], lam: f64) -> f64 {
    terms.iter().map(|t| t.weight * t.coverage(lam)).sum()
}

#[inline]
fn mixture_dlambda(terms: &[Term], lam: f64) -> f64 {
    terms.iter().map(|t| t.weight * t.dlambda(lam)).sum()
}

/// Derivative of mixture coverage in `lambda`, for `lambda > 0`.
pub fn coverage_dlambda(lambda: f64, mix: &MixtureRule) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(
            "coverage_dlambda",
            format!("lambda must be finite and > 0, got {lambda}"),
        ));
    }
    Ok(mixture_dlambda(&mix.terms(), lambda))
}

/// Roots `(a1, a2)` in `c` of `lambda^2/c^2 - lambda^2/c - 2`, the factor
/// that decides the sign of the second derivative of `Phi(lambda (1 - 1/c))`.
/// `a1 < 0` always and `0 < a2 < 1`.
pub fn inflection_points(lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::domain(
            "inflection_points",
            format!("lambda must be finite and > 0, got {lambda}"),
        ));
    }
    let s = (1.0 + 8.0 / (lambda * lambda)).sqrt();
    // t_minus = (1 - s)/2 written without cancellation
    let t_minus = -4.0 / (lambda * lambda * (1.0 + s));
    let t_plus = 0.5 * (1.0 + s);
    Ok((1.0 / t_minus, 1.0 / t_plus))
}

/// Closed-form limit of mixture coverage as `lambda -> 0+` or `lambda -> inf`.
pub fn coverage_limit(mix: &MixtureRule, at: LimitPoint) -> Probability {
    Probability::clamped(mix.terms().iter().map(|t| t.weight * t.limit(at)).sum())
}

/// Expected multiplier length `sum w_i (c2_i - c1_i)`.
pub fn expected_length(mix: &MixtureRule) -> f64 {
    mix.components.iter().map(|(r, w)| w * r.length()).sum()
}

/// Left end of the interior search; also reported as `lambda_star` when the
/// infimum is the `0+` limit.
pub const LAMBDA_EPS: f64 = 1e-8;
const SCAN_START: f64 = 2.0;
const SCAN_CAP: f64 = 1000.0;
/// Beyond `|lambda d| > 37.5`, `phi` is below `1e-305` and every term of the
/// derivative has underflowed.
const PHI_HORIZON: f64 = 37.5;
const BRENT_XTOL: f64 = 1e-8;

/// Infimum of mixture coverage over `lambda in (0, inf)`.
///
/// Compares the `0+` limit, a bracketed Brent minimization on
/// `(LAMBDA_EPS, lambda_up]` and, when no finite `lambda_up` with a positive
/// derivative exists below the scan cap, the `lambda -> inf` limit.
/// `lambda_up` is searched on `2, 3, 4, ...`. `tol` (in `(0, 1e-3)`) bounds
/// the interval tolerance of the 1-D search.
pub fn min_coverage(mix: &MixtureRule, tol: f64) -> Result<LambdaMin> {
    if !(tol > 0.0 && tol < 1e-3) {
        return Err(Error::domain(
            "min_coverage",
            format!("tol must lie in (0, 1e-3), got {tol}"),
        ));
    }
    Ok(min_coverage_terms(&mix.terms(), BRENT_XTOL.min(tol)))
}

fn min_coverage_terms(terms: &[Term], xtol: f64) -> LambdaMin {
    let zero_plus: f64 = terms.iter().map(|t| t.weight * t.limit(LimitPoint::ZeroPlus)).sum();
    let at_inf: f64 = terms.iter().map(|t| t.weight * t.limit(LimitPoint::Infinity)).sum();

    // Past this lambda every derivative term has underflowed and coverage
    // sits at its lambda -> inf limit.
    let min_slope = terms
        .iter()
        .flat_map(|t| [t.d1, t.d2])
        .filter(|d| d.is_finite() && *d != 0.0)
        .map(f64::abs)
        .fold(f64::INFINITY, f64::min);
    let horizon = if min_slope.is_finite() {
        (PHI_HORIZON / min_slope).ceil().clamp(SCAN_START, SCAN_CAP)
    } else {
        SCAN_START
    };

    let mut lam = SCAN_START;
    let bounded = loop {
        if mixture_dlambda(terms, lam) > 0.0 {
            break true;
        }
        if lam >= horizon {
            break false;
        }
        lam += 1.0;
    };
    let lambda_up = lam;

    let interior = interior_min(terms, LAMBDA_EPS, lambda_up, xtol);

    let mut best = (zero_plus, LambdaStar::Finite(LAMBDA_EPS));
    let order: [(f64, LambdaStar); 2] = if bounded {
        [
            (interior.1, LambdaStar::Finite(interior.0)),
            (at_inf, LambdaStar::AtInfinity),
        ]
    } else {
        [
            (at_inf, LambdaStar::AtInfinity),
            (interior.1, LambdaStar::Finite(interior.0)),
        ]
    };
    for cand in order {
        if cand.0 < best.0 {
            best = cand;
        }
    }

    LambdaMin {
        lambda_star: best.1,
        min_coverage: Probability::clamped(best.0),
        derivative_bound_lambda: lambda_up,
    }
}

/// Prescan on a uniform grid, then Brent on the cell around the best node.
fn interior_min(terms: &[Term], lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    let f = |l: f64| mixture_coverage_abs(terms, l);
    let cells = ((4.0 * hi).ceil() as usize).clamp(24, 4000);
    let node = |i: usize| lo + (hi - lo) * i as f64 / cells as f64;
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..=cells {
        let v = f(node(i));
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = node(best_i.saturating_sub(1));
    let b = node((best_i + 1).min(cells));
    let m = brent_minimize(f, a, b, xtol, 200);
    if m.fx < best_v {
        (m.x, m.fx)
    } else {
        (node(best_i), best_v)
    }
}
