//! Seeded Monte Carlo on split ChaCha20 streams.
//!
//! Stream contract: replications are split into `streams` contiguous
//! blocks, block `s` receiving `n / streams` draws plus one more when
//! `s < n % streams`. Block `s` is generated by
//! `ChaCha20Rng::seed_from_u64(seed)` with `set_stream(s)`. Uniforms are
//! `((next_u64 >> 11) + 0.5) * 2^-53`, in `(0, 1)`; normals are their
//! inverse-CDF transform. Hit counts are summed as integers, so estimates
//! depend on `(seed, n, streams)` only and never on the thread count.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rules::{IntervalRule, MixtureRule};
use crate::special::{norm_quantile, Probability};

pub const DEFAULT_STREAMS: u64 = 16;

/// Seed, replication count and stream split of a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub n: u64,
    pub streams: u64,
}

impl SimConfig {
    pub fn new(seed: u64, n: u64) -> Result<Self> {
        Self::with_streams(seed, n, DEFAULT_STREAMS)
    }

    pub fn with_streams(seed: u64, n: u64, streams: u64) -> Result<Self> {
        if n == 0 || streams == 0 {
            return Err(Error::domain("SimConfig", "n and streams must be >= 1"));
        }
        Ok(SimConfig { seed, n, streams })
    }

    fn block(&self, s: u64) -> u64 {
        self.n / self.streams + u64::from(s < self.n % self.streams)
    }

    fn rng(&self, s: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(s);
        rng
    }

    /// Sum over streams of `f(stream rng, block size)`.
    fn count<F>(&self, f: F) -> u64
    where
        F: Fn(&mut ChaCha20Rng, u64) -> u64 + Sync,
    {
        (0..self.streams)
            .into_par_iter()
            .map(|s| f(&mut self.rng(s), self.block(s)))
            .sum()
    }
}

/// Hit fraction with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimEstimate {
    pub estimate: Probability,
    pub std_error: f64,
    pub n: u64,
}

impl SimEstimate {
    pub fn from_hits(hits: u64, n: u64) -> Self {
        let est = hits as f64 / n as f64;
        SimEstimate {
            estimate: Probability::clamped(est),
            std_error: (est * (1.0 - est) / n as f64).sqrt(),
            n,
        }
    }

    /// Absolute deviation from `value` in standard errors. The error is
    /// the larger of the empirical one and `sqrt(value (1 - value) / n)`,
    /// so a degenerate estimate (0 or 1) still gets a finite band.
    pub fn z_score(&self, value: f64) -> f64 {
        let d = (self.estimate.get() - value).abs();
        if d == 0.0 {
            return 0.0;
        }
        let null_se = (value * (1.0 - value) / self.n as f64).max(0.0).sqrt();
        d / self.std_error.max(null_se)
    }
}

#[inline]
fn uniform(rng: &mut ChaCha20Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn normal(rng: &mut ChaCha20Rng) -> f64 {
    norm_quantile(uniform(rng))
}

/// Whether `[c1 x, c2 x]` (reversed for `x < 0`) contains `mu`.
#[inline]
fn covers(rule: &IntervalRule, x: f64, mu: f64) -> bool {
    match rule.endpoints() {
        None => false,
        Some((c1, c2)) => {
            let (lo, hi) = if x >= 0.0 { (c1 * x, c2 * x) } else { (c2 * x, c1 * x) };
            lo <= mu && mu <= hi
        }
    }
}

/// Coverage of a mixture at `lambda` by simulation of `X ~ N(lambda, 1)`.
///
/// Each replication draws `X` first and then the component, from the
/// cumulative weights.
pub fn simulate_univariate(mix: &MixtureRule, lambda: f64, cfg: SimConfig) -> Result<SimEstimate> {
    if !lambda.is_finite() {
        return Err(Error::domain("simulate_univariate", "lambda must be finite"));
    }
    let comps = mix.components();
    let mut cum = Vec::with_capacity(comps.len());
    let mut acc = 0.0;
    for (_, w) in comps {
        acc += w;
        cum.push(acc);
    }
    let hits = cfg.count(|rng, m| {
        let mut hits = 0;
        for _ in 0..m {
            let x = lambda + normal(rng);
            let u = uniform(rng) * acc;
            let k = cum.iter().position(|&c| u < c).unwrap_or(comps.len() - 1);
            hits += u64::from(covers(&comps[k].0, x, lambda));
        }
        hits
    });
    Ok(SimEstimate::from_hits(hits, cfg.n))
}

/// Estimates `P{ ||mu|| <= c ||X|| }` for `X_i ~ N(mu_i, sigma_eigs_i)`
/// independent (`sigma_eigs` are variances).
pub fn simulate_multivariate(
    mu: &[f64],
    sigma_eigs: &[f64],
    c: f64,
    cfg: SimConfig,
) -> Result<SimEstimate> {
    if mu.len() != sigma_eigs.len() || mu.is_empty() {
        return Err(Error::domain(
            "simulate_multivariate",
            format!("dimension mismatch: mu has {}, sigma_eigs {}", mu.len(), sigma_eigs.len()),
        ));
    }
    if let Some(bad) = sigma_eigs.iter().find(|&&s| !(s > 0.0) || !s.is_finite()) {
        return Err(Error::domain(
            "simulate_multivariate",
            format!("eigenvalues must be positive, got {bad}"),
        ));
    }
    if !(c > 0.0) || !c.is_finite() || mu.iter().any(|m| !m.is_finite()) {
        return Err(Error::domain("simulate_multivariate", "c must be > 0 and mu finite"));
    }
    let sd: Vec<f64> = sigma_eigs.iter().map(|s| s.sqrt()).collect();
    let mu_sq: f64 = mu.iter().map(|m| m * m).sum();
    let c_sq = c * c;
    let hits = cfg.count(|rng, m| {
        let mut hits = 0;
        for _ in 0..m {
            let x_sq: f64 = mu
                .iter()
                .zip(&sd)
                .map(|(mi, si)| {
                    let x = mi + si * normal(rng);
                    x * x
                })
                .sum();
            hits += u64::from(mu_sq <= c_sq * x_sq);
        }
        hits
    });
    Ok(SimEstimate::from_hits(hits, cfg.n))
}

/// Sample of a scalar statistic kept in draw order, with a sorted copy for
/// CDF queries.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    draws: Vec<f64>,
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    fn new(draws: Vec<f64>) -> Self {
        let mut sorted = draws.clone();
        sorted.sort_by(f64::total_cmp);
        EmpiricalCdf { draws, sorted }
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// Draws in generation order (stream 0 first); equal configurations
    /// give coupled samples.
    pub fn samples(&self) -> &[f64] {
        &self.draws
    }

    /// Fraction of draws `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// `sup_x |F_n(x) - F(x)|` against a continuous reference CDF.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, reference: F) -> f64 {
        let n = self.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = reference(x);
                (f - i as f64 / n).max((i + 1) as f64 / n - f)
            })
            .fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.draws.iter().sum::<f64>() / self.len() as f64
    }

    /// Standard error of [`Self::mean`].
    pub fn std_error(&self) -> f64 {
        let n = self.len() as f64;
        let m = self.mean();
        let var = self.draws.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }
}

/// Samples `sum_i lambdas_i Y_i^2` with `Y_i ~ N(nus_i, 1)`.
///
/// The normals depend only on the configuration and the dimension, so
/// samples with different `lambdas` (or `nus`) are pathwise coupled.
pub fn sample_weighted_chisq(lambdas: &[f64], nus: &[f64], cfg: SimConfig) -> Result<EmpiricalCdf> {
    if lambdas.len() != nus.len() || lambdas.is_empty() {
        return Err(Error::domain(
            "sample_weighted_chisq",
            format!("dimension mismatch: {} weights, {} means", lambdas.len(), nus.len()),
        ));
    }
    if let Some(bad) = lambdas.iter().find(|&&l| !(l >= 1.0) || !l.is_finite()) {
        return Err(Error::domain(
            "sample_weighted_chisq",
            format!("weights must be >= 1, got {bad}"),
        ));
    }
    let blocks: Vec<Vec<f64>> = (0..cfg.streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = cfg.rng(s);
            (0..cfg.block(s))
                .map(|_| {
                    lambdas
                        .iter()
                        .zip(nus)
                        .map(|(l, nu)| {
                            let y = nu + normal(&mut rng);
                            l * y * y
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(EmpiricalCdf::new(blocks.concat()))
}

/// Twelve rules covering every sign pattern of `(c1, c2)`, zero endpoints
/// included.
pub const ARBITRATION_RULES: [(f64, f64); 12] = [
    (0.5, 2.0),
    (1.0, 3.0),
    (0.2, 0.8),
    (-2.0, -0.5),
    (-3.0, -1.0),
    (-0.8, -0.2),
    (-2.0, 2.0),
    (-1.0, 3.0),
    (-0.5, 0.5),
    (-3.0, 1.0),
    (0.0, 1.0),
    (-1.0, 0.0),
];

pub const ARBITRATION_LAMBDAS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// The 60 `(lambda, rule)` points on which simulation arbitrates the
/// analytic coverage formula.
pub fn arbitration_grid() -> Vec<(f64, IntervalRule)> {
    ARBITRATION_LAMBDAS
        .iter()
        .flat_map(|&lam| {
            ARBITRATION_RULES
                .iter()
                .map(move |&(c1, c2)| (lam, IntervalRule::new(c1, c2).expect("valid rule")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::coverage;
    use crate::special::noncentral_chisq_cdf;

    fn cfg(seed: u64, n: u64) -> SimConfig {
        SimConfig::new(seed, n).unwrap()
    }

    #[test]
    fn config_validation_and_blocks() {
        assert!(SimConfig::new(1, 0).is_err());
        assert!(SimConfig::with_streams(1, 10, 0).is_err());
        let c = SimConfig::with_streams(1, 10, 4).unwrap();
        let blocks: Vec<u64> = (0..4).map(|s| c.block(s)).collect();
        assert_eq!(blocks, vec![3, 3, 2, 2]);
    }

    #[test]
    fn uniforms_are_open_interval() {
        let mut rng = cfg(3, 1).rng(0);
        for _ in 0..10_000 {
            let u = uniform(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn empty_rule_never_covers() {
        let mix = MixtureRule::single(IntervalRule::Empty);
        let e = simulate_univariate(&mix, 1.3, cfg(1, 10_000)).unwrap();
        assert_eq!(e.estimate.get(), 0.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn huge_multipliers_cover() {
        let mix = MixtureRule::single(IntervalRule::new(-1e6, 1e6).unwrap());
        let e = simulate_univariate(&mix, 1.0, cfg(2, 10_000)).unwrap();
        assert!(e.estimate.get() >= 0.999);
    }

    #[test]
    fn symmetric_interval_matches_formula() {
        let rule = IntervalRule::new(-2.0, 2.0).unwrap();
        let e = simulate_univariate(&MixtureRule::single(rule), 1.0, cfg(7, 1_000_000)).unwrap();
        let exact = coverage(1.0, &rule).unwrap().get();
        assert!((exact - 0.758264).abs() < 1e-5);
        assert!(e.z_score(exact) <= 4.0, "{e:?}");
    }

    #[test]
    fn mixture_simulation_matches_formula() {
        let mix = MixtureRule::new(vec![
            (IntervalRule::new(-1.0, 2.5).unwrap(), 0.3),
            (IntervalRule::new(-0.2, 2.5).unwrap(), 0.7),
        ])
        .unwrap();
        let e = simulate_univariate(&mix, 1.5, cfg(11, 400_000)).unwrap();
        let exact = crate::rules::coverage_mixture(1.5, &mix).unwrap().get();
        assert!(e.z_score(exact) <= 4.0);
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let mix = MixtureRule::single(IntervalRule::new(-1.0, 3.0).unwrap());
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_univariate(&mix, 0.7, cfg(99, 50_001)).unwrap())
        };
        assert_eq!(run(1), run(4));
        let chisq = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sample_weighted_chisq(&[1.0, 2.0], &[0.5, 0.0], cfg(5, 1001)).unwrap())
        };
        assert_eq!(chisq(1).samples(), chisq(3).samples());
    }

    #[test]
    fn multivariate_zero_mean_always_covered() {
        let e = simulate_multivariate(&[0.0, 0.0], &[1.0, 2.0], 0.1, cfg(1, 10_000)).unwrap();
        assert_eq!(e.estimate.get(), 1.0);
    }

    #[test]
    fn multivariate_monotone_in_c() {
        let mu = [1.0, -0.5, 2.0];
        let sig = [1.0, 3.0, 0.5];
        let mut prev = 0.0;
        for c in [0.2, 0.4, 0.8, 1.6] {
            let e = simulate_multivariate(&mu, &sig, c, cfg(8, 20_000)).unwrap().estimate.get();
            assert!(e >= prev);
            prev = e;
        }
    }

    #[test]
    fn multivariate_domain_errors() {
        assert!(simulate_multivariate(&[1.0], &[0.0], 1.0, cfg(1, 10)).is_err());
        assert!(simulate_multivariate(&[1.0, 2.0], &[1.0], 1.0, cfg(1, 10)).is_err());
        assert!(simulate_multivariate(&[1.0], &[1.0], 0.0, cfg(1, 10)).is_err());
    }

    #[test]
    fn weighted_chisq_unit_weights_match_noncentral_cdf() {
        let nus = [1.0, 0.0, -0.5];
        let nc: f64 = nus.iter().map(|v| v * v).sum();
        let n = 100_000;
        let s = sample_weighted_chisq(&[1.0; 3], &nus, cfg(21, n)).unwrap();
        let d = s.ks_distance(|x| noncentral_chisq_cdf(x, 3.0, nc).unwrap().get());
        assert!(d < 1.63 / (n as f64).sqrt(), "KS distance {d}");
    }

    #[test]
    fn weighted_chisq_mean_identity() {
        let lambdas = [1.0, 2.5, 4.0];
        let nus = [0.3, -1.0, 0.7];
        let s = sample_weighted_chisq(&lambdas, &nus, cfg(4, 200_000)).unwrap();
        let exact: f64 = lambdas.iter().zip(&nus).map(|(l, v)| l * (1.0 + v * v)).sum();
        assert!((s.mean() - exact).abs() <= 4.0 * s.std_error());
    }

    #[test]
    fn weighted_chisq_dominates_unit_weights_pathwise() {
        let nus = [0.5, 1.5];
        let base = sample_weighted_chisq(&[1.0, 1.0], &nus, cfg(6, 5000)).unwrap();
        let heavy = sample_weighted_chisq(&[1.0, 3.0], &nus, cfg(6, 5000)).unwrap();
        assert!(base.samples().iter().zip(heavy.samples()).all(|(a, b)| b >= a));
        assert!(sample_weighted_chisq(&[0.5], &[0.0], cfg(6, 10)).is_err());
    }

    #[test]
    fn empirical_cdf_basics() {
        let e = EmpiricalCdf::new(vec![3.0, 1.0, 2.0, 2.0]);
        assert_eq!(e.cdf(0.0), 0.0);
        assert_eq!(e.cdf(2.0), 0.75);
        assert_eq!(e.cdf(3.0), 1.0);
        assert_eq!(e.samples(), &[3.0, 1.0, 2.0, 2.0]);
        assert_eq!(e.mean(), 2.0);
    }

    #[test]
    fn arbitration_grid_has_sixty_points() {
        let g = arbitration_grid();
        assert_eq!(g.len(), 60);
        let patterns: std::collections::BTreeSet<(i8, i8)> = g
            .iter()
            .filter_map(|(_, r)| r.endpoints())
            .map(|(a, b)| (a.partial_cmp(&0.0).unwrap() as i8, b.partial_cmp(&0.0).unwrap() as i8))
            .collect();
        assert_eq!(patterns.len(), 5);
    }
}
