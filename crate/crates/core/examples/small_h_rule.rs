//! For expected length h <= 1 the minimax rule randomizes between [0, 1]
//! and the empty rule, with coverage h/2 at every lambda.
//!
//!     cargo run --example small_h_rule

use minimax_ci::minimax::{self, DEFAULT_MESH};
use minimax_ci::rules;

fn main() -> minimax_ci::Result<()> {
    for h in [0.2, 0.5, 0.9, 1.0] {
        let r = minimax::solve(h, DEFAULT_MESH)?;
        let mix = r.mixture()?;
        let flat: Vec<f64> = [0.1, 1.0, 10.0]
            .iter()
            .map(|&l| rules::coverage_mixture(l, &mix).map(|p| p.get()))
            .collect::<Result<_, _>>()?;
        println!(
            "h = {h:<4} {}: {:?}  min coverage {:.4}  coverage at lambda 0.1/1/10 = {:?}",
            r.case,
            mix.components(),
            r.min_coverage,
            flat
        );
    }
    Ok(())
}
