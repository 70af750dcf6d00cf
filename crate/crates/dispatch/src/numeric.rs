//! Small quadrature and differencing helpers on uniform grids.

/// Trapezoid integral of samples spaced by `h`.
pub fn trapezoid(a: &[f64], h: f64) -> f64 {
    match a.len() {
        0 | 1 => 0.0,
        n => h * (0.5 * (a[0] + a[n - 1]) + a[1..n - 1].iter().sum::<f64>()),
    }
}

/// Time derivative using only samples `first..`, second order everywhere:
/// central in the interior, one-sided at both ends. Entries before `first`
/// are copied from `first`.
pub fn derivative_from(a: &[f64], h: f64, first: usize) -> Vec<f64> {
    let n = a.len();
    assert!(n >= first + 3, "need three samples for a one-sided difference");
    let mut d = vec![0.0; n];
    for k in first + 1..n - 1 {
        d[k] = (a[k + 1] - a[k - 1]) / (2.0 * h);
    }
    d[first] = (-3.0 * a[first] + 4.0 * a[first + 1] - a[first + 2]) / (2.0 * h);
    d[n - 1] = (3.0 * a[n - 1] - 4.0 * a[n - 2] + a[n - 3]) / (2.0 * h);
    for k in 0..first {
        d[k] = d[first];
    }
    d
}

pub fn max_abs(a: impl IntoIterator<Item = f64>) -> f64 {
    a.into_iter().fold(0.0, |m, v| if v.abs() > m || v.is_nan() { v.abs() } else { m })
}

pub fn rms(a: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    (a.iter().map(|v| v * v).sum::<f64>() / a.len() as f64).sqrt()
}

/// Least-squares slope of log(r) against log(h); None if fewer than two usable points.
pub fn fitted_order(h: &[f64], r: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(r)
        .filter(|(h, r)| **h > 0.0 && **r > 0.0 && r.is_finite())
        .map(|(h, r)| (h.ln(), r.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}
