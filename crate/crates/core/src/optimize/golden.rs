//! Golden-section search used for the outer maximization over alpha.

use crate::scalar::Scalar;

/// Maximize a unimodal function on `[a, b]`; returns (argmax, max).
pub fn golden_max<S: Scalar, F: Fn(S) -> S>(f: F, a: S, b: S, x_tol: S) -> (S, S) {
    let inv_phi = S::of(0.618_033_988_749_894_9);
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let (x, v) = golden_max(|x: f64| -(x - 1.3) * (x - 1.3) + 2.0, 0.0, 3.0, 1e-6);
        assert!((x - 1.3).abs() < 1e-5);
        assert!((v - 2.0).abs() < 1e-10);
    }
}
