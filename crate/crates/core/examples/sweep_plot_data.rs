//! Minimal coverage of the minimax rule against expected length, written
//! as CSV ready for any plotting tool.
//!
//!     cargo run --release --example sweep_plot_data > sweep.csv

use minimax_ci::minimax::{self, DEFAULT_MESH};
use minimax_ci::report::{Cell, Table};

fn main() {
    let hs: Vec<f64> = (1..=20).map(|k| 0.5 * k as f64).collect();
    let mut t = Table::new(["h", "case", "p", "min_coverage"]);
    for (h, r) in minimax::sweep(&hs, DEFAULT_MESH, None) {
        match r {
            Ok(r) => t.push(vec![h.into(), r.case.name().into(), r.params.p.into(), r.min_coverage.into()]),
            Err(e) => {
                eprintln!("h = {h}: {e}");
                t.push(vec![h.into(), "ERROR".into(), Cell::Empty, Cell::Empty]);
            }
        }
    }
    print!("{}", t.to_csv());
}
