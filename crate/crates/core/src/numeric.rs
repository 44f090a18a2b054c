//! Small numerical helpers shared across modules: grids and finite differences.

/// Finite-difference step used for every numerical derivative of a profile.
///
/// The floor of `1e-5` dominates for `r < 1e3`; above that the step scales with `r`.
pub fn fd_step(r: f64) -> f64 {
    (1e-8 * r).max(1e-5)
}

/// Derivative of `f` at `r >= 0`.
///
/// Central difference when `r - h >= 0`, otherwise the second-order one-sided
/// formula so that `f` is never probed at a negative argument.
pub fn derivative<F: Fn(f64) -> f64>(f: F, r: f64) -> f64 {
    let h = fd_step(r);
    if r >= h {
        (f(r + h) - f(r - h)) / (2.0 * h)
    } else {
        (-3.0 * f(r) + 4.0 * f(r + h) - f(r + 2.0 * h)) / (2.0 * h)
    }
}

/// `count` log-spaced points from `min` to `max`, both ends included.
///
/// Point `i` is `exp(ln min + (i / (count - 1)) * ln(max / min))`. Grids whose
/// interval counts differ by a factor of two share their common points bit for bit.
pub fn logspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let (lo, hi) = (min.ln(), max.ln());
            let span = hi - lo;
            let last = (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == 0 {
                        min
                    } else if i == count - 1 {
                        max
                    } else {
                        (lo + (i as f64 / last) * span).exp()
                    }
                })
                .collect()
        }
    }
}

/// Three-point derivative on a non-uniform grid, evaluated at interior nodes.
///
/// Returns one value per interior node (`xs.len() - 2` values). The weights are the
/// exact derivative of the quadratic through the three neighbouring samples.
pub fn three_point_derivative(xs: &[f64], fs: &[f64]) -> Vec<f64> {
    debug_assert_eq!(xs.len(), fs.len());
    if xs.len() < 3 {
        return Vec::new();
    }
    xs.windows(3)
        .zip(fs.windows(3))
        .map(|(x, f)| {
            let hm = x[1] - x[0];
            let hp = x[2] - x[1];
            (hm * hm * f[2] - hp * hp * f[0] + (hp * hp - hm * hm) * f[1]) / (hp * hm * (hp + hm))
        })
        .collect()
}
