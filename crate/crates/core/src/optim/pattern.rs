/// Step schedule and budget of [`pattern_search_max`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_evaluations: usize,
    /// A poll point must beat the incumbent by more than this to be accepted.
    pub min_improvement: f64,
}

impl Default for PatternOptions {
    fn default() -> Self {
        PatternOptions {
            initial_step: 0.05,
            min_step: 1e-7,
            max_evaluations: 100_000,
            min_improvement: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternOutcome {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evaluations: usize,
    /// True when the step shrank below `min_step` within the budget.
    pub converged: bool,
}

/// Poll directions `{-1, 0, 1}^n \ {0}` in a fixed order.
fn directions(n: usize) -> Vec<Vec<f64>> {
    let total = 3usize.pow(n as u32);
    (0..total)
        .filter_map(|mut code| {
            let dir: Vec<f64> = (0..n)
                .map(|_| {
                    let digit = code % 3;
                    code /= 3;
                    digit as f64 - 1.0
                })
                .collect();
            dir.iter().any(|&s| s != 0.0).then_some(dir)
        })
        .collect()
}

/// Box-constrained compass search maximizing `f`.
///
/// Every iteration polls the full `3^n - 1` neighbourhood at the current
/// step (clipped to the box) and moves to the best strict improvement; when
/// nothing improves the step is halved. `f` returns `None` for points
/// outside the feasible region, which are never accepted. The result is
/// never worse than the starting point.
pub fn pattern_search_max<F>(
    mut f: F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: PatternOptions,
) -> PatternOutcome
where
    F: FnMut(&[f64]) -> Option<f64>,
{
    let n = start.len();
    assert_eq!(lower.len(), n);
    assert_eq!(upper.len(), n);

    let mut x: Vec<f64> = (0..n).map(|i| start[i].clamp(lower[i], upper[i])).collect();
    let mut fx = f(&x).unwrap_or(f64::NEG_INFINITY);
    let mut evaluations = 1;
    let mut step = opts.initial_step;
    let dirs = directions(n);
    let mut trial = vec![0.0; n];

    while step >= opts.min_step && evaluations < opts.max_evaluations {
        let mut best: Option<(Vec<f64>, f64)> = None;
        for dir in &dirs {
            for i in 0..n {
                trial[i] = (x[i] + step * dir[i]).clamp(lower[i], upper[i]);
            }
            if trial == x {
                continue;
            }
            let Some(v) = f(&trial) else {
                evaluations += 1;
                continue;
            };
            evaluations += 1;
            let incumbent = best.as_ref().map_or(fx, |b| b.1);
            if v > incumbent + opts.min_improvement {
                best = Some((trial.clone(), v));
            }
            if evaluations >= opts.max_evaluations {
                break;
            }
        }
        match best {
            Some((bx, bv)) => {
                x = bx;
                fx = bv;
            }
            None => step *= 0.5,
        }
    }

    PatternOutcome {
        x,
        fx,
        evaluations,
        converged: step < opts.min_step,
    }
}
