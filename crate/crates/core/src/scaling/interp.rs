//! One-dimensional interpolation on ascending grids.

/// Natural cubic spline through `(xs, ys)`, evaluated at `x`.
/// Falls back to linear interpolation on two-point grids.
pub fn cubic_spline(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    debug_assert!(n >= 2 && ys.len() == n);
    if n == 2 {
        return linear(xs, ys, x).0;
    }
    // second derivatives via the tridiagonal system, natural end conditions
    let mut m = vec![0.0; n];
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = xs[i] - xs[i - 1];
        let h1 = xs[i + 1] - xs[i];
        let a = h0 / 6.0;
        let b = (h0 + h1) / 3.0;
        let c = h1 / 6.0;
        let d = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
        let denom = b - a * c_prime[i - 1];
        c_prime[i] = c / denom;
        d_prime[i] = (d - a * d_prime[i - 1]) / denom;
    }
    for i in (1..n - 1).rev() {
        m[i] = d_prime[i] - c_prime[i] * m[i + 1];
    }
    let j = segment(xs, x);
    let h = xs[j + 1] - xs[j];
    let t = (x - xs[j]) / h;
    let a = 1.0 - t;
    a * ys[j] + t * ys[j + 1] + h * h / 6.0 * ((a * a * a - a) * m[j] + (t * t * t - t) * m[j + 1])
}

/// Index `j` of the segment `[xs[j], xs[j+1]]` containing `x`, clamped to the
/// first/last segment outside the grid.
pub fn segment(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    match xs.partition_point(|&v| v <= x) {
        0 => 0,
        k if k >= n => n - 2,
        k => k - 1,
    }
}

/// Linear interpolation; also returns the weight `w` of the right node.
pub fn linear(xs: &[f64], ys: &[f64], x: f64) -> (f64, usize, f64) {
    let j = segment(xs, x);
    let w = (x - xs[j]) / (xs[j + 1] - xs[j]);
    ((1.0 - w) * ys[j] + w * ys[j + 1], j, w)
}

/// Linear interpolation of a value with independent per-node errors;
/// returns `(value, variance)`.
pub fn linear_with_var(xs: &[f64], ys: &[f64], errs: &[f64], x: f64) -> (f64, f64) {
    let (y, j, w) = linear(xs, ys, x);
    let var = (1.0 - w).powi(2) * errs[j].powi(2) + w.powi(2) * errs[j + 1].powi(2);
    (y, var)
}

/// Weights `w` with `cubic_spline(xs, ys, x) == sum_k w_k ys_k`; the spline
/// is linear in the node values, so splining unit vectors recovers them.
pub fn cubic_spline_weights(xs: &[f64], x: f64) -> Vec<f64> {
    let mut unit = vec![0.0; xs.len()];
    (0..xs.len())
        .map(|k| {
            unit[k] = 1.0;
            let w = cubic_spline(xs, &unit, x);
            unit[k] = 0.0;
            w
        })
        .collect()
}

/// Spline value and its variance for independent node errors.
pub fn cubic_spline_with_var(xs: &[f64], ys: &[f64], errs: &[f64], x: f64) -> (f64, f64) {
    weighted_with_var(&cubic_spline_weights(xs, x), ys, errs)
}

pub fn weighted_with_var(w: &[f64], ys: &[f64], errs: &[f64]) -> (f64, f64) {
    let y = w.iter().zip(ys).map(|(w, y)| w * y).sum();
    let var = w.iter().zip(errs).map(|(w, e)| (w * e).powi(2)).sum();
    (y, var)
}
