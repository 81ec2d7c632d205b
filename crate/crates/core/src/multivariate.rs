//! Single-observation confidence sets `{ mu : ||mu|| <= c ||X|| }` for a
//! `p`-variate normal mean with unknown covariance.
//!
//! With `X ~ N(mu, Sigma)`, standardize `nu = Sigma^{-1/2} mu` and write
//! `delta = ||nu||^2 / 2`. For `Sigma = I` the miss probability is exactly
//! the noncentral chi-square probability `P{ chi'^2_p(2 delta) < 2 delta / c^2 }`;
//! a closed series bound, free of `delta`, holds for every `Sigma` once
//! `c^2 > 2 e^2`, and `c = 3.85 alpha^{-1/p}` keeps it below `alpha`.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::brent_minimize;
use crate::special::{noncentral_chisq_cdf, Probability};

/// Multiplier in the simple form `c = 3.85 alpha^{-1/p}`.
pub const SIMPLE_MULTIPLIER: f64 = 3.85;
/// Upper bound on the inflation factor over all `p >= 1`.
pub const INFLATION_BOUND: f64 = 1.00086;

pub const DEFAULT_DELTA_MIN: f64 = 1e-4;
pub const DEFAULT_DELTA_MAX: f64 = 1e3;
pub const DEFAULT_DELTA_POINTS: usize = 200;

/// Constant `c(p, alpha)` and the worst spherical miss probability at
/// `c_simple`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MvBoundReport {
    pub p: u32,
    pub alpha: f64,
    pub c_simple: f64,
    pub c_refined: f64,
    pub a: f64,
    pub worst_miss: Probability,
    pub worst_delta: f64,
}

/// The two forms of the constant and the inflation factor behind them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstant {
    pub c_simple: f64,
    pub c_refined: f64,
    pub a: f64,
}

fn check_p(func: &'static str, p: u32) -> Result<()> {
    if p == 0 {
        Err(Error::domain(func, "dimension p must be >= 1"))
    } else {
        Ok(())
    }
}

/// `a(p) = 1 / (1 - exp(1 - 2 pi e^{p/4}))`; decreases to 1 in `p`.
pub fn inflation_factor(p: u32) -> Result<f64> {
    check_p("inflation_factor", p)?;
    let t = 1.0 - 2.0 * PI * (p as f64 / 4.0).exp();
    Ok(1.0 / -t.exp_m1())
}

/// `c_simple = 3.85 alpha^{-1/p}` and `c_refined = sqrt(2 e^2 a) alpha^{-1/p}`.
pub fn bound_constant(p: u32, alpha: f64) -> Result<BoundConstant> {
    check_p("bound_constant", p)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(
            "bound_constant",
            format!("alpha must lie in (0, 1), got {alpha}"),
        ));
    }
    let a = inflation_factor(p)?;
    let scale = alpha.powf(-1.0 / p as f64);
    Ok(BoundConstant {
        c_simple: SIMPLE_MULTIPLIER * scale,
        c_refined: (2.0 * E * E * a).sqrt() * scale,
        a,
    })
}

/// Value of the series bound; it is a bound, not a probability, and may
/// exceed one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesBound {
    pub value: f64,
    pub exceeds_one: bool,
}

/// `(1/2pi) (2 e^{3/2} / c^2)^{p/2} (1 - ln(1 - 2 e^2 / c^2))`.
///
/// The bound holds uniformly in `delta` and in `Sigma`, so it takes no
/// `delta` argument. Requires `c^2 > 2 e^2`.
pub fn miss_prob_series_bound(p: u32, c: f64) -> Result<SeriesBound> {
    check_p("miss_prob_series_bound", p)?;
    let c_sq = c * c;
    let threshold = 2.0 * E * E;
    if !(c_sq > threshold) || !c.is_finite() {
        return Err(Error::Divergence(format!(
            "series bound needs c^2 > 2e^2 = {threshold:.6}, got c = {c}"
        )));
    }
    let u = threshold / c_sq;
    let head = (2.0 * E.powf(1.5) / c_sq).powf(p as f64 / 2.0) / (2.0 * PI);
    let value = head * (1.0 - (-u).ln_1p());
    Ok(SeriesBound {
        value,
        exceeds_one: value > 1.0,
    })
}

/// Exact miss probability `P{ ||mu|| > c ||X|| }` for `Sigma = I` and
/// `||mu||^2 = 2 delta`.
pub fn exact_miss_prob_spherical(p: u32, delta: f64, c: f64) -> Result<Probability> {
    check_p("exact_miss_prob_spherical", p)?;
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::domain(
            "exact_miss_prob_spherical",
            format!("delta must be finite and >= 0, got {delta}"),
        ));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::domain(
            "exact_miss_prob_spherical",
            format!("c must be finite and > 0, got {c}"),
        ));
    }
    noncentral_chisq_cdf(2.0 * delta / (c * c), p as f64, 2.0 * delta)
}

/// Geometric grid of `delta` from `1e-4` to `1e3` with 200 points.
pub fn default_delta_grid() -> Vec<f64> {
    let n = DEFAULT_DELTA_POINTS;
    let ratio = (DEFAULT_DELTA_MAX / DEFAULT_DELTA_MIN).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                DEFAULT_DELTA_MAX
            } else {
                DEFAULT_DELTA_MIN * (ratio * i as f64).exp()
            }
        })
        .collect()
}

/// Location and value of the largest spherical miss probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub worst_delta: f64,
    pub worst_miss: Probability,
}

/// Maximizes the spherical miss probability over `delta`.
///
/// Scans `delta_grid` (ties to the smallest `delta`), then polishes with a
/// Brent search on the cell around the best grid point. The polish is kept
/// only when it strictly improves on the grid.
pub fn worst_case_search(p: u32, c: f64, delta_grid: &[f64]) -> Result<WorstCase> {
    if delta_grid.is_empty() {
        return Err(Error::domain("worst_case_search", "empty delta grid"));
    }
    let mut grid = delta_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let values = grid
        .iter()
        .map(|&d| exact_miss_prob_spherical(p, d, c).map(Probability::get))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let mut out = WorstCase {
        worst_delta: grid[best],
        worst_miss: Probability::clamped(values[best]),
    };
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    if hi > lo {
        let m = brent_minimize(
            |d| exact_miss_prob_spherical(p, d, c).map_or(f64::INFINITY, |v| -v.get()),
            lo,
            hi,
            1e-12 * (1.0 + lo.abs()),
            200,
        );
        if -m.fx > values[best] {
            out = WorstCase {
                worst_delta: m.x,
                worst_miss: Probability::clamped(-m.fx),
            };
        }
    }
    Ok(out)
}

/// Constants for `(p, alpha)` and the worst spherical miss at `c_simple`
/// over the default `delta` grid.
pub fn mv_bound_report(p: u32, alpha: f64) -> Result<MvBoundReport> {
    let k = bound_constant(p, alpha)?;
    let w = worst_case_search(p, k.c_simple, &default_delta_grid())?;
    Ok(MvBoundReport {
        p,
        alpha,
        c_simple: k.c_simple,
        c_refined: k.c_refined,
        a: k.a,
        worst_miss: w.worst_miss,
        worst_delta: w.worst_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inflation_factor_values() {
        let a1 = inflation_factor(1).unwrap();
        let closed = 1.0 / (1.0 - (1.0 - 2.0 * PI * (0.25f64).exp()).exp());
        assert!((a1 - closed).abs() < 1e-15);
        assert!((a1 - 1.000853).abs() < 1e-6);
        assert!(a1 <= INFLATION_BOUND);
        let mut prev = a1;
        for p in 2..40 {
            let a = inflation_factor(p).unwrap();
            assert!(a >= 1.0 && a <= prev);
            prev = a;
        }
        assert!(inflation_factor(0).is_err());
    }

    #[test]
    fn bound_constant_examples() {
        let k = bound_constant(1, 0.05).unwrap();
        assert!((k.c_simple - 77.0).abs() < 1e-12);
        assert!(k.c_refined <= k.c_simple);
        assert!((k.c_refined / 20.0 - 3.8458).abs() < 1e-4);
        assert!(bound_constant(4, 1.0).is_err());
        assert!(bound_constant(4, 0.0).is_err());
    }

    #[test]
    fn series_bound_closed_form_matches_partial_sums() {
        let (p, c) = (2u32, 10.0f64);
        let u = 2.0 * E * E / (c * c);
        let partial: f64 = (0..50).map(|k| u.powi(k) / (k.max(1) as f64)).sum();
        let head = (2.0 * E.powf(1.5) / (c * c)).powf(p as f64 / 2.0) / (2.0 * PI);
        let b = miss_prob_series_bound(p, c).unwrap();
        assert!((b.value - head * partial).abs() < 1e-12);
        assert!((b.value - head * (1.0 - (1.0 - u).ln())).abs() < 1e-12);
        assert!(!b.exceeds_one);
    }

    #[test]
    fn series_bound_below_alpha_at_simple_constant() {
        for p in 1..=20 {
            for alpha in [0.1, 0.05, 0.01] {
                let k = bound_constant(p, alpha).unwrap();
                let b = miss_prob_series_bound(p, k.c_simple).unwrap();
                assert!(b.value <= alpha, "p={p} alpha={alpha} bound={}", b.value);
            }
        }
    }

    #[test]
    fn series_bound_decreasing_in_c_and_diverges() {
        let a = miss_prob_series_bound(3, 5.0).unwrap().value;
        let b = miss_prob_series_bound(3, 6.0).unwrap().value;
        assert!(b < a);
        assert!(matches!(miss_prob_series_bound(3, 3.8), Err(Error::Divergence(_))));
    }

    #[test]
    fn exact_miss_examples() {
        assert_eq!(exact_miss_prob_spherical(3, 0.0, 2.0).unwrap().get(), 0.0);
        let small = exact_miss_prob_spherical(2, 0.01, 2.0).unwrap().get();
        let larger = exact_miss_prob_spherical(2, 0.1, 2.0).unwrap().get();
        assert!(larger > small);
        let far = exact_miss_prob_spherical(2, 3.0, 1e4).unwrap().get();
        assert!(far < 1e-6);
        assert!(exact_miss_prob_spherical(2, -1.0, 2.0).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = default_delta_grid();
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[199], 1e3);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn worst_case_examples() {
        let w = worst_case_search(2, 1e3, &default_delta_grid()).unwrap();
        assert!(w.worst_miss.get() < 1e-6);
        for p in [1, 2, 5, 10] {
            for alpha in [0.1, 0.05, 0.01] {
                let r = mv_bound_report(p, alpha).unwrap();
                assert!(r.worst_miss.get() <= alpha, "{r:?}");
            }
        }
        assert!(worst_case_search(2, 3.0, &[]).is_err());
    }

    #[test]
    fn worst_case_stable_under_grid_refinement() {
        let c = bound_constant(2, 0.05).unwrap().c_simple;
        let coarse = worst_case_search(2, c, &default_delta_grid()).unwrap();
        let mut fine = Vec::new();
        let mut d = 1e-4;
        while d <= 1e3 {
            fine.push(d);
            d += 0.01 * (1.0 + d);
        }
        let fine = worst_case_search(2, c, &fine).unwrap();
        assert!((coarse.worst_miss.get() - fine.worst_miss.get()).abs() < 1e-8);
    }

    #[test]
    fn ties_go_to_smallest_delta() {
        // every delta misses with probability zero at huge c
        let w = worst_case_search(1, 1e300, &[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(w.worst_delta, 1.0);
    }
}
