//! Simulation against the exact coverage formula, including a case where
//! the other sign convention for the lower endpoint would be far off.
//!
//!     cargo run --release --example monte_carlo_check

use minimax_ci::mc::{self, SimConfig};
use minimax_ci::rules::{self, IntervalRule, MixtureRule};
use minimax_ci::special::norm_cdf;

fn main() -> minimax_ci::Result<()> {
    let cfg = SimConfig::new(2024, 1_000_000)?;
    println!("{:>6} {:>14} {:>10} {:>10} {:>8} {:>12}", "lambda", "rule", "exact", "simulated", "z", "1+1/c1 form");
    for (lam, (c1, c2)) in [(1.0, (-2.0, 2.0)), (0.5, (-1.0, 3.0)), (2.0, (-3.0, -1.0)), (1.0, (0.5, 2.0))] {
        let rule = IntervalRule::new(c1, c2)?;
        let exact = rules::coverage(lam, &rule)?.get();
        let est = mc::simulate_univariate(&MixtureRule::single(rule), lam, cfg)?;
        let ind = if c1 <= 0.0 && 0.0 <= c2 { 1.0 } else { 0.0 };
        let other = norm_cdf(lam * (1.0 - 1.0 / c2)) - norm_cdf(lam * (1.0 + 1.0 / c1)) + ind;
        println!(
            "{lam:>6} {:>14} {exact:>10.6} {:>10.6} {:>8.2} {other:>12.6}",
            format!("[{c1}, {c2}]"),
            est.estimate.get(),
            est.z_score(exact)
        );
    }

    // weighted chi-square: unit weights reproduce the noncentral chi-square
    let nus = [1.0, 0.5, -1.5];
    let nc: f64 = nus.iter().map(|v| v * v).sum();
    let sample = mc::sample_weighted_chisq(&[1.0; 3], &nus, SimConfig::new(7, 100_000)?)?;
    let ks = sample.ks_distance(|x| minimax_ci::special::noncentral_chisq_cdf(x, 3.0, nc).unwrap().get());
    println!("\nKS distance of sum Y_i^2 to chi'^2_3({nc}): {ks:.5} (1% band {:.5})", 1.63 / 100_000f64.sqrt());
    Ok(())
}
