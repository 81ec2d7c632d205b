//! The constant c(p, alpha) for the set { mu : ||mu|| <= c ||X|| }, the
//! worst spherical miss probability, the closed series bound, and a
//! simulation with a non-spherical covariance.
//!
//!     cargo run --release --example multivariate_bound

use minimax_ci::mc::{self, SimConfig};
use minimax_ci::multivariate as mv;

fn main() -> minimax_ci::Result<()> {
    println!("{:>3} {:>6} {:>10} {:>10} {:>10} {:>11} {:>10} {:>11}", "p", "alpha", "c_simple", "c_refined", "a", "worst_miss", "at delta", "series");
    for p in [1, 2, 5, 10] {
        for alpha in [0.1, 0.05, 0.01] {
            let r = mv::mv_bound_report(p, alpha)?;
            let series = mv::miss_prob_series_bound(p, r.c_simple)?.value;
            println!(
                "{p:>3} {alpha:>6} {:>10.4} {:>10.4} {:>10.7} {:>11.3e} {:>10.4} {:>11.3e}",
                r.c_simple, r.c_refined, r.a, r.worst_miss.get(), r.worst_delta, series
            );
        }
    }

    let k = mv::bound_constant(3, 0.05)?;
    let e = mc::simulate_multivariate(&[2.0, -1.0, 0.5], &[1.0, 4.0, 0.25], k.c_simple, SimConfig::new(3, 1_000_000)?)?;
    println!(
        "\np=3, alpha=0.05, non-spherical Sigma: simulated coverage {:.5} +- {:.5}",
        e.estimate.get(),
        e.std_error
    );
    Ok(())
}
