//! Small statistics helpers: sample moments, Wilson score intervals, and
//! normal-approximation confidence bounds for means.

/// One-sided 99% standard normal quantile, Phi^-1(0.99).
pub const Z_99: f64 = 2.326_347_874_040_841;

/// Sample mean; 0 for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample mean and standard deviation (n - 1 denominator).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let m = mean(values);
    if values.len() < 2 {
        return (m, 0.0);
    }
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64;
    (m, var.sqrt())
}

/// Wilson score interval for a proportion with `successes` out of `n`,
/// at normal quantile `z`. Returns (lower, upper), both clamped to [0, 1].
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    assert!(n > 0, "wilson interval needs n >= 1");
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let margin = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (
        ((center - margin) / denom).clamp(0.0, 1.0),
        ((center + margin) / denom).clamp(0.0, 1.0),
    )
}

/// One-sided 99% upper confidence bound on a proportion.
pub fn wilson_upper_99(successes: usize, n: usize) -> f64 {
    wilson_interval(successes, n, Z_99).1
}

/// One-sided 99% lower confidence bound on a proportion.
pub fn wilson_lower_99(successes: usize, n: usize) -> f64 {
    wilson_interval(successes, n, Z_99).0
}

/// One-sided 99% lower confidence bound on the mean of `values`
/// (normal approximation: mean - z * s / sqrt(n)).
pub fn mean_lower_99(values: &[f64]) -> f64 {
    let (m, s) = mean_std(values);
    if values.is_empty() {
        return 0.0;
    }
    m - Z_99 * s / (values.len() as f64).sqrt()
}
