//! Shared numeric machinery: adaptive quadrature, bracketed root finding,
//! and a compact deterministic Nelder–Mead simplex.

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Root of `f` on a bracketing interval `[lo, hi]` (f(lo) and f(hi) of
/// opposite sign) by the Illinois variant of false position.
///
/// Halving the stale endpoint's ordinate when the same side repeats keeps
/// the bracket shrinking on convex/concave functions where plain false
/// position stalls.
///
/// Panics if the interval does not bracket; callers establish the bracket.
pub fn find_root_bracketed<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    assert!(
        fa * fb <= 0.0,
        "find_root_bracketed: no sign change on [{a}, {b}] (f = {fa}, {fb})"
    );
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let mut last_side = 0i8;
    for _ in 0..200 {
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !x.is_finite() || x <= a.min(b) || x >= a.max(b) {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fa * fx < 0.0 {
            b = x;
            fb = fx;
            if last_side == -1 {
                fa *= 0.5;
            }
            last_side = -1;
        } else {
            a = x;
            fa = fx;
            if last_side == 1 {
                fb *= 0.5;
            }
            last_side = 1;
        }
        if (b - a).abs() < tol * (1.0 + a.abs().max(b.abs())) {
            break;
        }
    }
    if fa.abs() < fb.abs() {
        a
    } else {
        b
    }
}

/// Result of a Nelder–Mead minimization.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
}

/// Deterministic Nelder–Mead minimizer.
///
/// Standard reflection/expansion/contraction/shrink coefficients, an
/// axis-step initial simplex, and a fixed iteration budget. Objectives may
/// return `INFINITY` to mark infeasible points.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    initial_step: f64,
    max_iter: usize,
) -> SimplexResult {
    let n = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut v = start.to_vec();
        let step = if v[i].abs() > 1e-12 {
            v[i].abs() * initial_step
        } else {
            initial_step
        };
        v[i] += step;
        simplex.push(v);
    }
    let mut fv: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        // Order: best first
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| {
            fv[a]
                .partial_cmp(&fv[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let reordered: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let refv: Vec<f64> = idx.iter().map(|&i| fv[i]).collect();
        simplex = reordered;
        fv = refv;

        let spread = (fv[n] - fv[0]).abs();
        if spread < 1e-12 * (1.0 + fv[0].abs()) && fv[0].is_finite() {
            break;
        }

        // Centroid of all but worst
        let mut centroid = vec![0.0; n];
        for v in simplex.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }

        let worst = fv[n];
        let point = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = point(1.0);
        let fr = f(&xr);
        if fr < fv[0] {
            let xe = point(2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if fr < fv[n - 1] {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            let xc = if fr < worst { point(0.5) } else { point(-0.5) };
            let fc = f(&xc);
            if fc < worst.min(fr) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                // Shrink toward best
                for i in 1..=n {
                    let best = simplex[0].clone();
                    for (x, b) in simplex[i].iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    fv[i] = f(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    SimplexResult {
        x: simplex[best].clone(),
        f: fv[best],
        iterations,
    }
}
