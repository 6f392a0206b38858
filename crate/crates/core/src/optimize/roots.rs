//! Bracketed bisection for the transcendental optimality conditions.

use crate::error::{BellError, Result};
use crate::scalar::Scalar;

/// Root of `f` on `[lo, hi]`, which must bracket a sign change. Bisection runs
/// until the interval collapses to floating-point resolution.
pub fn bisect<S: Scalar, F: Fn(S) -> S>(f: F, lo: S, hi: S, what: &str) -> Result<S> {
    let (mut lo, mut hi) = (lo, hi);
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == S::zero() {
        return Ok(lo);
    }
    if fhi == S::zero() {
        return Ok(hi);
    }
    if (flo > S::zero()) == (fhi > S::zero()) {
        return Err(BellError::NoBracket {
            what: what.to_string(),
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    for _ in 0..200 {
        let mid = (lo + hi) * S::of(0.5);
        if mid == lo || mid == hi {
            break;
        }
        let fmid = f(mid);
        if fmid == S::zero() {
            return Ok(mid);
        }
        if (fmid > S::zero()) == (flo > S::zero()) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * S::of(0.5))
}

/// Expand `hi` geometrically from `start` until `f` changes sign against
/// `f(lo)`, then bisect.
pub fn bisect_expanding<S: Scalar, F: Fn(S) -> S>(
    f: F,
    lo: S,
    start: S,
    max_hi: S,
    what: &str,
) -> Result<S> {
    let flo = f(lo);
    let mut hi = start;
    let mut iters = 0;
    while (f(hi) > S::zero()) == (flo > S::zero()) {
        hi = hi * S::of(2.0);
        iters += 1;
        if hi > max_hi || iters > 60 {
            return Err(BellError::NoBracket {
                what: what.to_string(),
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            });
        }
    }
    bisect(f, lo, hi, what)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_root() {
        let root = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, "sqrt2").unwrap();
        assert!((root - 2.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_unbracketed_interval() {
        let err = bisect(|x: f64| x * x + 1.0, -1.0, 1.0, "none");
        assert!(matches!(err, Err(BellError::NoBracket { .. })));
    }

    #[test]
    fn expanding_bracket_reaches_distant_root() {
        let root = bisect_expanding(|x: f64| x - 37.5, 0.0, 1.0, 1e6, "linear").unwrap();
        assert!((root - 37.5).abs() < 1e-12);
    }
}
