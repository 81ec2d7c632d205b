//! Max-min search over two-point mixtures of fixed expected length `h`.
//!
//! Four two-interval families remain once dominated pairs are removed
//! (the numbering follows the usual case list):
//!
//! | case    | mixture                                | free parameters |
//! |---------|----------------------------------------|-----------------|
//! | `CASE1` | `p [a1, 1] + (1-p) [c1, c2]`           | `c1, a1, p`     |
//! | `CASE2` | `p [c1, c2] + (1-p) [a1, c2]`          | `c1, a1, p`     |
//! | `CASE3` | `p [a1, 1] + (1-p) [0, c2]`            | `a1, p`         |
//! | `CASE7` | `p phi + (1-p) [c1, c2]`               | `c1, p`         |
//!
//! `c2` is always eliminated through the length constraint. For `h <= 1`
//! the answer is closed form: `h [0, 1] + (1-h) phi` with coverage `h/2`.
//!
//! Each case is solved by an exhaustive grid scan followed by a
//! box-constrained compass search started from the best grid point.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{pattern_search_max, PatternOptions};
use crate::rules::{self, IntervalRule, LambdaStar, MixtureRule};

/// Default grid mesh.
pub const DEFAULT_MESH: f64 = 0.1;
/// Number of mesh steps spanned by the endpoint grid.
pub const ENDPOINT_STEPS: usize = 200;
/// Offset keeping grid endpoints strictly negative.
pub const ENDPOINT_OFFSET: f64 = 1e-5;
/// Largest grid value of `p`.
pub const P_GRID_MAX: f64 = 0.99999;
/// Upper clip of endpoints in the refinement box.
pub const REFINE_ENDPOINT_MAX: f64 = -1e-6;
/// Upper clip of `p` in the refinement box.
pub const REFINE_P_MAX: f64 = 0.999_999;
/// Tolerance handed to the inner `lambda` minimization.
pub const INNER_TOL: f64 = 1e-8;
/// Case values closer than this count as tied; the earlier case wins.
pub const CASE_TIE_TOL: f64 = 1e-9;

/// Mixture family.
///
/// The declaration order is the tie-break order between cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseId {
    #[serde(rename = "CASE2")]
    Case2,
    #[serde(rename = "CASE1")]
    Case1,
    #[serde(rename = "CASE3")]
    Case3,
    #[serde(rename = "CASE7")]
    Case7,
    #[serde(rename = "SMALL_H")]
    SmallH,
}

impl CaseId {
    /// The cases searched numerically when `h > 1`, in tie-break order.
    pub const SEARCHED: [CaseId; 4] = [CaseId::Case2, CaseId::Case1, CaseId::Case3, CaseId::Case7];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Case1 => "CASE1",
            CaseId::Case2 => "CASE2",
            CaseId::Case3 => "CASE3",
            CaseId::Case7 => "CASE7",
            CaseId::SmallH => "SMALL_H",
        }
    }

    /// Whether `c1` is a free parameter of the case.
    pub fn uses_c1(self) -> bool {
        matches!(self, CaseId::Case1 | CaseId::Case2 | CaseId::Case7)
    }

    /// Whether `a1` is a free parameter of the case.
    pub fn uses_a1(self) -> bool {
        matches!(self, CaseId::Case1 | CaseId::Case2 | CaseId::Case3)
    }

    fn divides_by_one_minus_p(self) -> bool {
        matches!(self, CaseId::Case1 | CaseId::Case3 | CaseId::Case7)
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CaseId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "CASE1" | "1" => Ok(CaseId::Case1),
            "CASE2" | "2" => Ok(CaseId::Case2),
            "CASE3" | "3" => Ok(CaseId::Case3),
            "CASE7" | "7" => Ok(CaseId::Case7),
            "SMALL_H" => Ok(CaseId::SmallH),
            other => Err(format!("unknown case `{other}`")),
        }
    }
}

/// Free parameters of a two-point mixture. Unused fields are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateParams {
    /// More negative lower endpoint.
    pub c1: f64,
    /// Second lower endpoint.
    pub a1: f64,
    /// Weight on the first component.
    pub p: f64,
}

impl CandidateParams {
    pub fn new(c1: f64, a1: f64, p: f64) -> Self {
        CandidateParams { c1, a1, p }
    }

    fn lex_cmp(&self, other: &Self) -> Ordering {
        self.c1
            .total_cmp(&other.c1)
            .then(self.a1.total_cmp(&other.a1))
            .then(self.p.total_cmp(&other.p))
    }
}

/// Solution of the max-min problem for one case at one `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimResult {
    pub h: f64,
    pub case: CaseId,
    pub params: CandidateParams,
    pub c2: f64,
    pub min_coverage: f64,
    pub lambda_star: LambdaStar,
    pub converged: bool,
    /// Objective evaluations, grid scan included.
    pub evaluations: usize,
    /// Value at the grid point the refinement started from.
    pub grid_value: f64,
}

impl OptimResult {
    pub fn mixture(&self) -> Result<MixtureRule> {
        build_mixture(self.case, self.params, self.h)
    }
}

fn infeasible(case: CaseId, msg: impl Into<String>) -> Error {
    Error::Infeasible {
        case: case.name(),
        msg: msg.into(),
    }
}

/// The `c2` that gives the case's mixture expected length `h`.
pub fn close_length(case: CaseId, params: CandidateParams, h: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::domain("close_length", format!("h must be > 0, got {h}")));
    }
    let CandidateParams { c1, a1, p } = params;
    if ![c1, a1, p].iter().all(|v| v.is_finite()) {
        return Err(infeasible(case, "non-finite parameter"));
    }
    if case.divides_by_one_minus_p() && p >= 1.0 {
        return Err(infeasible(case, "p = 1 leaves the length constraint unsolvable"));
    }
    Ok(match case {
        CaseId::Case2 => h + p * c1 + (1.0 - p) * a1,
        CaseId::Case7 => c1 + h / (1.0 - p),
        CaseId::Case1 => c1 + (h - p * (1.0 - a1)) / (1.0 - p),
        CaseId::Case3 => (h - p * (1.0 - a1)) / (1.0 - p),
        CaseId::SmallH => 1.0,
    })
}

/// Constraint set of the case at the closed `c2`.
pub fn feasible(case: CaseId, params: CandidateParams, c2: f64) -> bool {
    let CandidateParams { c1, a1, p } = params;
    if !(0.0..=1.0).contains(&p) {
        return false;
    }
    if case == CaseId::SmallH {
        return p > 0.0 && c2 == 1.0;
    }
    if !(c2 > 1.0) {
        return false;
    }
    match case {
        CaseId::Case2 => -c2 < c1 && c1 < a1 && a1 < 0.0,
        CaseId::Case1 => -c2 < c1 && c1 < 0.0 && (-1.0..0.0).contains(&a1) && p < 1.0,
        CaseId::Case3 => -c2 < a1 && a1 < 0.0 && p < 1.0,
        CaseId::Case7 => -c2 < c1 && c1 < 0.0 && p < 1.0,
        CaseId::SmallH => unreachable!(),
    }
}

/// The two-point mixture of a case; zero-weight components are dropped.
pub fn build_mixture(case: CaseId, params: CandidateParams, h: f64) -> Result<MixtureRule> {
    let c2 = close_length(case, params, h)?;
    if !feasible(case, params, c2) {
        return Err(infeasible(
            case,
            format!("{params:?} with c2 = {c2} violates the case constraints"),
        ));
    }
    let CandidateParams { c1, a1, p } = params;
    let (first, second) = match case {
        CaseId::Case1 => (IntervalRule::new(a1, 1.0)?, IntervalRule::new(c1, c2)?),
        CaseId::Case2 => (IntervalRule::new(c1, c2)?, IntervalRule::new(a1, c2)?),
        CaseId::Case3 => (IntervalRule::new(a1, 1.0)?, IntervalRule::new(0.0, c2)?),
        CaseId::Case7 => (IntervalRule::Empty, IntervalRule::new(c1, c2)?),
        CaseId::SmallH => (IntervalRule::new(0.0, 1.0)?, IntervalRule::Empty),
    };
    let components: Vec<_> = [(first, p), (second, 1.0 - p)]
        .into_iter()
        .filter(|(_, w)| *w > 0.0)
        .collect();
    MixtureRule::new(components)
}

/// Max-min objective; `None` outside the feasible region.
fn objective(case: CaseId, h: f64, params: CandidateParams) -> Option<(f64, LambdaStar)> {
    let mix = build_mixture(case, params, h).ok()?;
    let m = rules::min_coverage(&mix, INNER_TOL).ok()?;
    Some((m.min_coverage.get(), m.lambda_star))
}

/// Best point of a grid scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub params: CandidateParams,
    pub value: f64,
    /// Feasible grid points evaluated.
    pub evaluations: usize,
}

/// Lower-endpoint grid `-1e-5 - mesh k`, `k = 0..=200`, with the node
/// nearest `-1` snapped to exactly `-1`.
pub fn endpoint_grid(mesh: f64) -> Vec<f64> {
    (0..=ENDPOINT_STEPS)
        .map(|k| {
            let step = k as f64 * mesh;
            if (step - 1.0).abs() < 1e-9 {
                -1.0
            } else {
                -ENDPOINT_OFFSET - step
            }
        })
        .collect()
}

/// Weight grid `0, mesh, 2 mesh, ..., < 1`, closed by `0.99999`.
pub fn weight_grid(mesh: f64) -> Vec<f64> {
    let mut ps: Vec<f64> = (0..)
        .map(|k| k as f64 * mesh)
        .take_while(|p| *p < 1.0 - 1e-9)
        .collect();
    ps.push(P_GRID_MAX);
    ps
}

fn case_grid(case: CaseId, mesh: f64) -> Vec<CandidateParams> {
    let ends = endpoint_grid(mesh);
    let ps = weight_grid(mesh);
    let mut out = Vec::new();
    match case {
        CaseId::Case1 | CaseId::Case2 => {
            for &c1 in &ends {
                for &a1 in &ends {
                    for &p in &ps {
                        out.push(CandidateParams::new(c1, a1, p));
                    }
                }
            }
        }
        CaseId::Case3 => {
            for &a1 in &ends {
                for &p in &ps {
                    out.push(CandidateParams::new(0.0, a1, p));
                }
            }
        }
        CaseId::Case7 => {
            for &c1 in &ends {
                for &p in &ps {
                    out.push(CandidateParams::new(c1, 0.0, p));
                }
            }
        }
        CaseId::SmallH => {}
    }
    out
}

/// Higher value wins; ties go to the lexicographically smaller parameters.
fn better(a: GridPoint, b: GridPoint) -> GridPoint {
    let evaluations = a.evaluations + b.evaluations;
    let pick = match a.value.total_cmp(&b.value) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            if a.params.lex_cmp(&b.params) != Ordering::Greater {
                a
            } else {
                b
            }
        }
    };
    GridPoint { evaluations, ..pick }
}

/// Exhaustive scan of a case's grid. Infeasible nodes are skipped.
pub fn grid_search(case: CaseId, h: f64, mesh: f64) -> Result<GridPoint> {
    if !(h > 1.0) || !h.is_finite() {
        return Err(Error::domain("grid_search", format!("h must be > 1, got {h}")));
    }
    if !(mesh > 0.0) || !(mesh < 1.0) {
        return Err(Error::domain("grid_search", format!("mesh must lie in (0, 1), got {mesh}")));
    }
    if case == CaseId::SmallH {
        return Err(Error::domain("grid_search", "SMALL_H has no grid"));
    }
    case_grid(case, mesh)
        .into_par_iter()
        .filter_map(|params| {
            objective(case, h, params).map(|(value, _)| GridPoint {
                params,
                value,
                evaluations: 1,
            })
        })
        .reduce_with(better)
        .ok_or_else(|| infeasible(case, format!("no feasible grid point at h = {h}")))
}

fn to_vec(case: CaseId, p: CandidateParams) -> Vec<f64> {
    match case {
        CaseId::Case1 | CaseId::Case2 => vec![p.c1, p.a1, p.p],
        CaseId::Case3 => vec![p.a1, p.p],
        CaseId::Case7 => vec![p.c1, p.p],
        CaseId::SmallH => vec![p.p],
    }
}

fn from_vec(case: CaseId, x: &[f64]) -> CandidateParams {
    match case {
        CaseId::Case1 | CaseId::Case2 => CandidateParams::new(x[0], x[1], x[2]),
        CaseId::Case3 => CandidateParams::new(0.0, x[0], x[1]),
        CaseId::Case7 => CandidateParams::new(x[0], 0.0, x[1]),
        CaseId::SmallH => CandidateParams::new(0.0, 0.0, x[0]),
    }
}

/// Box `start +- radius`, clipped to keep endpoints below `-1e-6`, `p` in
/// `[0, 0.999999]`, `c1 >= -c2(start)` and `a1 >= c1` (case 2) or
/// `a1 >= -1` (case 1).
fn refine_box(case: CaseId, start: CandidateParams, c2: f64, radius: f64) -> (Vec<f64>, Vec<f64>) {
    let c1_lo = (start.c1 - radius).max(-c2);
    let c1_hi = (start.c1 + radius).min(REFINE_ENDPOINT_MAX);
    let a1_lo = match case {
        CaseId::Case2 => (start.a1 - radius).max(c1_lo),
        CaseId::Case1 => (start.a1 - radius).max(-1.0),
        _ => (start.a1 - radius).max(-c2),
    };
    let a1_hi = (start.a1 + radius).min(REFINE_ENDPOINT_MAX);
    let p_lo = (start.p - radius).max(0.0);
    let p_hi = (start.p + radius).min(REFINE_P_MAX);
    match case {
        CaseId::Case1 | CaseId::Case2 => (vec![c1_lo, a1_lo, p_lo], vec![c1_hi, a1_hi, p_hi]),
        CaseId::Case3 => (vec![a1_lo, p_lo], vec![a1_hi, p_hi]),
        CaseId::Case7 => (vec![c1_lo, p_lo], vec![c1_hi, p_hi]),
        CaseId::SmallH => (vec![p_lo], vec![p_hi]),
    }
}

/// Compass-search refinement around a feasible start.
///
/// Stops when the step falls below `1e-7` (`converged = true`) or after
/// `1e5` evaluations. The reported value is never below the start value.
pub fn refine(case: CaseId, h: f64, start: CandidateParams, radius: f64) -> Result<OptimResult> {
    if !(radius > 0.0) {
        return Err(Error::domain("refine", format!("radius must be > 0, got {radius}")));
    }
    let c2_start = close_length(case, start, h)?;
    let (start_value, _) = objective(case, h, start)
        .ok_or_else(|| infeasible(case, format!("refinement start {start:?} is infeasible")))?;
    let (lower, upper) = refine_box(case, start, c2_start, radius);
    let outcome = pattern_search_max(
        |x| objective(case, h, from_vec(case, x)).map(|v| v.0),
        &to_vec(case, start),
        &lower,
        &upper,
        PatternOptions::default(),
    );
    let (params, value) = if outcome.fx >= start_value {
        (from_vec(case, &outcome.x), outcome.fx)
    } else {
        (start, start_value)
    };
    // re-minimize at the reported point
    let mix = build_mixture(case, params, h)?;
    let lm = rules::min_coverage(&mix, INNER_TOL)?;
    Ok(OptimResult {
        h,
        case,
        params,
        c2: close_length(case, params, h)?,
        min_coverage: lm.min_coverage.get(),
        lambda_star: lm.lambda_star,
        converged: outcome.converged,
        evaluations: outcome.evaluations,
        grid_value: start_value.min(value),
    })
}

/// Closed-form rule for `0 < h <= 1`.
pub fn small_h(h: f64) -> Result<OptimResult> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::domain("small_h", format!("h must lie in (0, 1], got {h}")));
    }
    let params = CandidateParams::new(0.0, 0.0, h);
    let mix = build_mixture(CaseId::SmallH, params, h)?;
    let lm = rules::min_coverage(&mix, INNER_TOL)?;
    Ok(OptimResult {
        h,
        case: CaseId::SmallH,
        params,
        c2: 1.0,
        min_coverage: lm.min_coverage.get(),
        lambda_star: lm.lambda_star,
        converged: true,
        evaluations: 1,
        grid_value: lm.min_coverage.get(),
    })
}

/// Grid search followed by refinement for one case (`h > 1`).
pub fn solve_case(case: CaseId, h: f64, mesh: f64) -> Result<OptimResult> {
    let grid = grid_search(case, h, mesh)?;
    let mut r = refine(case, h, grid.params, mesh)?;
    r.evaluations += grid.evaluations;
    r.grid_value = grid.value;
    Ok(r)
}

/// Per-case outcomes at one `h`, with the winner.
#[derive(Debug, Clone)]
pub struct Solution {
    pub best: OptimResult,
    /// One entry per searched case (empty for `h <= 1`).
    pub cases: Vec<(CaseId, Result<OptimResult>)>,
}

impl Solution {
    pub fn case(&self, case: CaseId) -> Option<&OptimResult> {
        self.cases
            .iter()
            .find(|(c, _)| *c == case)
            .and_then(|(_, r)| r.as_ref().ok())
    }
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::domain("solve", format!("h must be finite and > 0, got {h}")));
    }
    Ok(())
}

/// Solves every searched case (in parallel) and picks the best one; values
/// within [`CASE_TIE_TOL`] tie and go to the earlier case in
/// [`CaseId::SEARCHED`].
pub fn solve_all(h: f64, mesh: f64) -> Result<Solution> {
    check_h(h)?;
    if h <= 1.0 {
        return Ok(Solution {
            best: small_h(h)?,
            cases: Vec::new(),
        });
    }
    let cases: Vec<(CaseId, Result<OptimResult>)> = CaseId::SEARCHED
        .par_iter()
        .map(|&case| (case, solve_case(case, h, mesh)))
        .collect();
    let mut best: Option<&OptimResult> = None;
    for r in cases.iter().filter_map(|(_, r)| r.as_ref().ok()) {
        if best.is_none_or(|b| r.min_coverage > b.min_coverage + CASE_TIE_TOL) {
            best = Some(r);
        }
    }
    let best = best
        .cloned()
        .ok_or_else(|| infeasible(CaseId::Case2, format!("every case is infeasible at h = {h}")))?;
    Ok(Solution { best, cases })
}

/// Minimax rule of expected length `h`.
pub fn solve(h: f64, mesh: f64) -> Result<OptimResult> {
    solve_all(h, mesh).map(|s| s.best)
}

/// Like [`solve`] but restricted to one case.
pub fn solve_restricted(h: f64, mesh: f64, case: CaseId) -> Result<OptimResult> {
    check_h(h)?;
    match case {
        CaseId::SmallH => small_h(h),
        _ if h <= 1.0 => Err(Error::domain(
            "solve",
            format!("{case} needs h > 1, got {h}"),
        )),
        _ => solve_case(case, h, mesh),
    }
}

/// [`solve`] over a list of `h`, order preserved, per-`h` errors kept.
pub fn sweep(h_values: &[f64], mesh: f64, case: Option<CaseId>) -> Vec<(f64, Result<OptimResult>)> {
    h_values
        .par_iter()
        .map(|&h| {
            let r = match case {
                Some(c) => solve_restricted(h, mesh, c),
                None => solve(h, mesh),
            };
            (h, r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::expected_length;

    fn params(c1: f64, a1: f64, p: f64) -> CandidateParams {
        CandidateParams::new(c1, a1, p)
    }

    #[test]
    fn close_length_examples() {
        assert_eq!(close_length(CaseId::Case2, params(-1.0, -0.5, 0.5), 3.0).unwrap(), 2.25);
        assert_eq!(close_length(CaseId::Case7, params(-1.0, 0.0, 0.5), 2.0).unwrap(), 3.0);
        assert!(close_length(CaseId::Case7, params(-1.0, 0.0, 1.0), 2.0).is_err());
        assert!(close_length(CaseId::Case1, params(-1.0, -0.5, 1.0), 2.0).is_err());
        assert!(close_length(CaseId::Case2, params(-1.0, -0.5, 1.0), 2.0).is_ok());
    }

    #[test]
    fn feasible_examples() {
        assert!(feasible(CaseId::Case2, params(-1.0, -0.5, 0.5), 2.25));
        assert!(!feasible(CaseId::Case2, params(-0.5, -1.0, 0.5), 2.25));
        assert!(!feasible(CaseId::Case2, params(-0.5, -1.0, 0.5), 100.0));
        assert!(!feasible(CaseId::Case7, params(-5.0, 0.0, 0.5), 3.0));
        assert!(!feasible(CaseId::Case1, params(-0.5, -1.5, 0.5), 3.0));
        assert!(!feasible(CaseId::Case3, params(0.0, -0.5, 0.5), 1.0));
    }

    #[test]
    fn build_mixture_examples() {
        let m = build_mixture(CaseId::SmallH, params(0.0, 0.0, 0.6), 0.6).unwrap();
        assert_eq!(
            m.components(),
            &[(IntervalRule::new(0.0, 1.0).unwrap(), 0.6), (IntervalRule::Empty, 1.0 - 0.6)]
        );
        let m = build_mixture(CaseId::Case2, params(-1.0, -0.5, 1.0), 3.0).unwrap();
        assert_eq!(m.components(), &[(IntervalRule::new(-1.0, 2.0).unwrap(), 1.0)]);
        let m = build_mixture(CaseId::Case7, params(-1.0, 0.0, 0.0), 3.0).unwrap();
        assert_eq!(m.components(), &[(IntervalRule::new(-1.0, 2.0).unwrap(), 1.0)]);
        assert!(build_mixture(CaseId::Case2, params(-0.5, -1.0, 0.5), 3.0).is_err());
    }

    #[test]
    fn length_closure_on_fixed_points() {
        for &(case, pr, h) in &[
            (CaseId::Case1, params(-1.2, -0.4, 0.3), 3.0),
            (CaseId::Case2, params(-2.0, -0.3, 0.7), 4.0),
            (CaseId::Case3, params(0.0, -0.8, 0.25), 2.5),
            (CaseId::Case7, params(-0.9, 0.0, 0.4), 2.0),
        ] {
            let m = build_mixture(case, pr, h).unwrap();
            assert!((expected_length(&m) - h).abs() < 1e-12, "{case}");
        }
    }

    #[test]
    fn grids() {
        let e = endpoint_grid(0.1);
        assert_eq!(e.len(), 201);
        assert_eq!(e[0], -1e-5);
        assert_eq!(e[10], -1.0);
        assert!((e[200] + 20.00001).abs() < 1e-12);
        let p = weight_grid(0.1);
        assert_eq!(p.len(), 11);
        assert_eq!(p[0], 0.0);
        assert_eq!(p[10], 0.99999);
        assert_eq!(weight_grid(0.5), vec![0.0, 0.5, 0.99999]);
    }

    #[test]
    fn small_h_closed_form() {
        let r = solve(0.6, DEFAULT_MESH).unwrap();
        assert_eq!(r.case, CaseId::SmallH);
        assert!((r.min_coverage - 0.3).abs() < 1e-12);
        assert!(solve(0.0, DEFAULT_MESH).is_err());
        assert!(solve(-1.0, DEFAULT_MESH).is_err());
    }

    #[test]
    fn grid_search_matches_brute_force_case7() {
        let h = 2.0;
        let mesh = 0.5;
        let g = grid_search(CaseId::Case7, h, mesh).unwrap();
        // plain nested loops over the same nodes
        let mut best = f64::NEG_INFINITY;
        for k in 0..=200 {
            let c1 = -1e-5 - 0.5 * k as f64;
            for p in [0.0, 0.5, 0.99999] {
                let c2 = c1 + h / (1.0 - p);
                if c2 > 1.0 && c1 > -c2 {
                    let mut comps = vec![(IntervalRule::new(c1, c2).unwrap(), 1.0 - p)];
                    if p > 0.0 {
                        comps.push((IntervalRule::Empty, p));
                    }
                    let mix = MixtureRule::new(comps).unwrap();
                    let v = rules::min_coverage(&mix, INNER_TOL).unwrap().min_coverage.get();
                    best = best.max(v);
                }
            }
        }
        assert!((g.value - best).abs() < 1e-14);
        assert!((0.0..=1.0).contains(&g.value));
    }

    #[test]
    fn refine_improves_on_grid_seed() {
        let r = solve_case(CaseId::Case7, 2.0, DEFAULT_MESH).unwrap();
        assert!(r.min_coverage >= r.grid_value);
        let mix = r.mixture().unwrap();
        assert!((expected_length(&mix) - 2.0).abs() < 1e-9);
        let again = rules::min_coverage(&mix, INNER_TOL).unwrap().min_coverage.get();
        assert!((again - r.min_coverage).abs() <= 1e-6);
    }

    #[test]
    fn refine_rejects_infeasible_start() {
        assert!(refine(CaseId::Case2, 3.0, params(-0.5, -1.0, 0.5), 0.1).is_err());
    }

    #[test]
    fn sweep_keeps_order_and_errors() {
        let rows = sweep(&[0.5, -1.0, 0.9], DEFAULT_MESH, None);
        assert_eq!(rows.len(), 3);
        assert!((rows[0].1.as_ref().unwrap().min_coverage - 0.25).abs() < 1e-12);
        assert!(rows[1].1.is_err());
        assert_eq!(rows[2].0, 0.9);
    }

    #[test]
    fn case_names_round_trip() {
        for c in [CaseId::Case1, CaseId::Case2, CaseId::Case3, CaseId::Case7, CaseId::SmallH] {
            assert_eq!(c.name().parse::<CaseId>().unwrap(), c);
        }
        assert!(CaseId::Case2 < CaseId::Case1 && CaseId::Case3 < CaseId::Case7);
    }
}
