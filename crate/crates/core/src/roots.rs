//! Bracketed scalar root finding.

/// Finds a root of `f` in the bracket `[a, b]`, where `fa = f(a)` and
/// `fb = f(b)` have opposite signs.
///
/// Uses the Illinois variant of regula falsi, switching to bisection after
/// 100 iterations, and stops when the bracket is a few ulps wide. The result
/// is unchanged when `f` is replaced by `-f`.
pub(crate) fn illinois<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, fa: f64, fb: f64) -> f64 {
    debug_assert!(fa * fb <= 0.0);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let mut side = 0i8;
    for iter in 0..400 {
        let scale = a.abs().max(b.abs());
        if (b - a).abs() <= 4.0 * f64::EPSILON * scale + f64::MIN_POSITIVE {
            break;
        }
        let mut x = if iter < 100 {
            (a * fb - b * fa) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        if !(x > a.min(b) && x < a.max(b)) {
            x = 0.5 * (a + b);
            if !(x > a.min(b) && x < a.max(b)) {
                break;
            }
        }
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx > 0.0) == (fb > 0.0) {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    if fb.abs() < fa.abs() {
        b
    } else {
        a
    }
}

/// Grows a bracket outward from `[lo, hi]` until `f` changes sign, doubling
/// the width each step and never leaving `[-limit, limit]`.
pub(crate) fn expand_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    limit: f64,
) -> Option<(f64, f64, f64, f64)> {
    let (mut lo, mut hi) = (lo, hi);
    let (mut flo, mut fhi) = (f(lo), f(hi));
    loop {
        if flo * fhi <= 0.0 {
            return Some((lo, hi, flo, fhi));
        }
        if lo <= -limit && hi >= limit {
            return None;
        }
        let width = hi - lo;
        if lo > -limit {
            lo = (lo - width).max(-limit);
            flo = f(lo);
        }
        if hi < limit {
            hi = (hi + width).min(limit);
            fhi = f(hi);
        }
    }
}
