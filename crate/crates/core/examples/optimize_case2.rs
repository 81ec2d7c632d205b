//! Grid search plus pattern-search refinement at one expected length, per
//! case, showing how much refinement adds over the grid.
//!
//!     cargo run --release --example optimize_case2 -- 3.0

use minimax_ci::minimax::{self, DEFAULT_MESH};
use minimax_ci::rules::LambdaStar;

fn main() -> minimax_ci::Result<()> {
    let h: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("h must be a number"))
        .unwrap_or(3.0);
    let sol = minimax::solve_all(h, DEFAULT_MESH)?;
    println!("h = {h}");
    println!("{:<8}{:>11}{:>11}{:>11}{:>9}{:>11}{:>11}{:>10}", "case", "c1", "a1", "c2", "p", "grid", "refined", "lambda*");
    for (case, r) in &sol.cases {
        match r {
            Ok(r) => {
                let ls = match r.lambda_star {
                    LambdaStar::Finite(x) => format!("{x:.4}"),
                    LambdaStar::AtInfinity => "inf".into(),
                };
                println!(
                    "{:<8}{:>11.5}{:>11.5}{:>11.5}{:>9.4}{:>11.6}{:>11.6}{:>10}",
                    case.name(), r.params.c1, r.params.a1, r.c2, r.params.p, r.grid_value, r.min_coverage, ls
                );
            }
            Err(e) => println!("{:<8} {e}", case.name()),
        }
    }
    println!("winner: {} with minimal coverage {:.6}", sol.best.case, sol.best.min_coverage);
    Ok(())
}
