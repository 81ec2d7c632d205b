//! Exact coverage of a few interval rules across lambda, with the infimum
//! over lambda and where it is attained.
//!
//!     cargo run --example coverage_table

use minimax_ci::rules::{self, IntervalRule, LambdaStar, MixtureRule};

fn main() -> minimax_ci::Result<()> {
    let rules_to_show = [(0.0, 1.0), (-2.0, 2.0), (-1.0, 3.0), (-0.5, 1.0), (0.5, 2.0)];
    let lambdas = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

    print!("{:>12}", "rule");
    for l in lambdas {
        print!("{:>9}", format!("l={l}"));
    }
    println!("{:>10}{:>12}", "inf", "at lambda");

    for (c1, c2) in rules_to_show {
        let rule = IntervalRule::new(c1, c2)?;
        print!("{:>12}", format!("[{c1}, {c2}]"));
        for l in lambdas {
            print!("{:>9.4}", rules::coverage(l, &rule)?.get());
        }
        let m = rules::min_coverage(&MixtureRule::single(rule), 1e-8)?;
        let at = match m.lambda_star {
            LambdaStar::Finite(x) => format!("{x:.4}"),
            LambdaStar::AtInfinity => "inf".into(),
        };
        println!("{:>10.4}{:>12}", m.min_coverage.get(), at);
    }

    let (a1, a2) = rules::inflection_points(2.0)?;
    println!("\ninflection points of c -> Phi(2 (1 - 1/c)): a1 = {a1:.5}, a2 = {a2:.5}");
    Ok(())
}
