//! Derivative-free simplex maximizer. Deterministic: the simplex is seeded
//! from the start point and per-coordinate steps, never from randomness.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions<S> {
    /// Converged when the simplex diameter falls below this.
    pub x_tol: S,
    /// Converged when the value spread across the simplex falls below this.
    pub f_tol: S,
    pub max_evals: usize,
}

impl<S: Scalar> Default for NelderMeadOptions<S> {
    fn default() -> Self {
        Self {
            x_tol: S::of(1e-9),
            f_tol: S::of(1e-12),
            max_evals: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult<S> {
    pub x: Vec<S>,
    pub value: S,
    pub evals: usize,
    pub converged: bool,
}

pub fn maximize<S: Scalar, F: Fn(&[S]) -> S>(
    f: F,
    x0: &[S],
    step: &[S],
    opts: &NelderMeadOptions<S>,
) -> NelderMeadResult<S> {
    assert_eq!(x0.len(), step.len());
    let n = x0.len();
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[S]| {
        evals.set(evals.get() + 1);
        f(x)
    };

    // simplex: n+1 vertices, each a (point, value) pair, sorted best-first
    let mut simplex: Vec<(Vec<S>, S)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] = x[i] + step[i];
        let v = eval(&x);
        simplex.push((x, v));
    }

    let one = S::one();
    let half = S::of(0.5);
    let two = S::of(2.0);

    let mut converged = false;
    while evals.get() < opts.max_evals {
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));

        let spread = simplex[0].1 - simplex[n].1;
        let mut diam = S::zero();
        for i in 0..n {
            diam = diam.max((simplex[0].0[i] - simplex[n].0[i]).abs());
        }
        if spread.abs() < opts.f_tol && diam < opts.x_tol {
            converged = true;
            break;
        }

        // centroid of the n best vertices
        let mut centroid = vec![S::zero(); n];
        for vertex in simplex.iter().take(n) {
            for i in 0..n {
                centroid[i] = centroid[i] + vertex.0[i];
            }
        }
        for c in centroid.iter_mut() {
            *c = *c / S::of(n as f64);
        }

        let worst = simplex[n].clone();
        let at = |t: S, centroid: &[S]| -> Vec<S> {
            (0..n)
                .map(|i| centroid[i] + t * (centroid[i] - worst.0[i]))
                .collect()
        };

        let reflected = at(one, &centroid);
        let fr = eval(&reflected);
        if fr > simplex[0].1 {
            let expanded = at(two, &centroid);
            let fe = eval(&expanded);
            simplex[n] = if fe > fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr > simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr > worst.1 {
                at(half, &centroid)
            } else {
                at(-half, &centroid)
            };
            let fc = eval(&contracted);
            if fc > worst.1.max(fr) {
                simplex[n] = (contracted, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    for i in 0..n {
                        vertex.0[i] = best[i] + half * (vertex.0[i] - best[i]);
                    }
                    vertex.1 = eval(&vertex.0);
                }
            }
        }
    }

    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    NelderMeadResult {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        evals: evals.get(),
        converged,
    }
}
