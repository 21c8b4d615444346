//! Brent's root finder and a golden-section scalar minimizer.
//!
//! Both follow the classic formulations in Brent, *Algorithms for Minimization
//! Without Derivatives* (1973) and Numerical Recipes ch. 9-10.

/// Outcome of a Brent root search.
#[derive(Debug, Clone, Copy)]
pub struct RootResult {
    pub root: f64,
    pub f_root: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Root of `f` bracketed by [x1, x2] (requires a sign change), refined to `tol`
/// in the abscissa. Never panics on a valid bracket; returns the best iterate
/// with `converged = false` if `max_iter` runs out.
pub fn brent_root<F: Fn(f64) -> f64>(f: F, x1: f64, x2: f64, tol: f64, max_iter: usize) -> RootResult {
    let eps = f64::EPSILON;
    let (mut a, mut b) = (x1, x2);
    let mut fa = f(a);
    let mut fb = f(b);
    debug_assert!(
        fa * fb <= 0.0,
        "brent_root requires a bracketing interval"
    );

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 0..max_iter {
        if (fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * eps * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return RootResult {
                root: b,
                f_root: fb,
                iterations: iter,
                converged: true,
            };
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, falling back to secant
            let s = fb / fa;
            let (mut p, mut q);
            if (a - c).abs() < f64::EPSILON * (a.abs() + c.abs() + 1e-300) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += if xm > 0.0 { tol1 } else { -tol1 };
        }
        fb = f(b);
    }

    RootResult {
        root: b,
        f_root: fb,
        iterations: max_iter,
        converged: false,
    }
}

/// Golden-section minimum of `f` on [a, b], refined until the interval is
/// shorter than `tol`. Returns (x_min, f_min).
pub fn golden_minimize<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    for _ in 0..max_iter {
        if (b - a).abs() < tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
