/// Result of a bracketed 1-D minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum1d {
    pub x: f64,
    pub fx: f64,
    pub evaluations: usize,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Brent's golden-section / parabolic minimizer on `[lo, hi]`.
///
/// Terminates when the bracket is narrower than `2 * (sqrt(eps) |x| + xtol)`
/// or after `max_iter` iterations. The returned point is the best one
/// evaluated, never an extrapolated guess.
pub fn brent_minimize<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Minimum1d
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let rel = f64::EPSILON.sqrt();

    let mut x = a + GOLDEN * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut evaluations = 1;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = rel * x.abs() + xtol;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }

        let mut golden = true;
        if e.abs() > tol1 {
            // parabola through x, w, v
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        evaluations += 1;

        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    Minimum1d {
        x,
        fx,
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        let m = brent_minimize(|x| (x - 1.3).powi(2) + 2.0, -5.0, 5.0, 1e-10, 200);
        assert!((m.x - 1.3).abs() < 1e-7);
        assert!((m.fx - 2.0).abs() < 1e-14);
    }

    #[test]
    fn minimum_at_boundary() {
        let m = brent_minimize(|x| x, 0.5, 3.0, 1e-10, 200);
        assert!((m.x - 0.5).abs() < 1e-7);
    }

    #[test]
    fn nonsmooth_kink() {
        let m = brent_minimize(|x: f64| (x - 0.25).abs(), -1.0, 2.0, 1e-10, 500);
        assert!((m.x - 0.25).abs() < 1e-7);
    }

    #[test]
    fn reversed_bracket() {
        let m = brent_minimize(|x: f64| x.cos(), 6.0, 0.0, 1e-10, 200);
        assert!((m.x - std::f64::consts::PI).abs() < 1e-7);
    }
}
