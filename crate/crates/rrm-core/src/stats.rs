//! Small sample-statistics helpers shared across the crate.

/// Arithmetic mean. Panics on empty input.
pub fn mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "mean of empty slice");
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance (denominator n-1).
pub fn sample_variance(values: &[f64]) -> f64 {
    assert!(values.len() >= 2, "variance needs at least 2 observations");
    let m = mean(values);
    values.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (values.len() as f64 - 1.0)
}

pub fn sample_std(values: &[f64]) -> f64 {
    sample_variance(values).max(0.0).sqrt()
}

/// Empirical quantile with linear interpolation of order statistics
/// (Hyndman-Fan type 7, the numpy/R default). Input must be sorted ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty() && (0.0..=1.0).contains(&p));
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Type-7 quantile without a full sort; reorders `values` in place.
///
/// Uses two selection passes, so it stays O(n) for the large Monte-Carlo
/// batches where a sort would dominate the runtime.
pub fn quantile_select(values: &mut [f64], p: f64) -> f64 {
    assert!(!values.is_empty() && (0.0..=1.0).contains(&p));
    let n = values.len();
    if n == 1 {
        return values[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return *values
            .iter()
            .max_by(|a, b| a.total_cmp(b))
            .expect("non-empty");
    }
    let frac = h - lo as f64;
    let (_, x_lo, rest) = values.select_nth_unstable_by(lo, f64::total_cmp);
    let x_lo = *x_lo;
    let x_hi = *rest
        .iter()
        .min_by(|a, b| a.total_cmp(b))
        .expect("lo + 1 < n guarantees a right part");
    x_lo + frac * (x_hi - x_lo)
}

/// Mean of all entries strictly below `threshold`; `None` when there are none.
pub fn mean_below(values: &[f64], threshold: f64) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for &v in values {
        if v < threshold {
            sum += v;
            count += 1;
        }
    }
    (count > 0).then(|| sum / count as f64)
}

/// Mean of all entries at or below `threshold` (inclusive).
pub fn mean_at_or_below(values: &[f64], threshold: f64) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for &v in values {
        if v <= threshold {
            sum += v;
            count += 1;
        }
    }
    (count > 0).then(|| sum / count as f64)
}

/// Lag-k sample autocorrelation.
pub fn autocorrelation(series: &[f64], lag: usize) -> f64 {
    assert!(lag < series.len(), "lag must be below series length");
    let n = series.len();
    let m = mean(series);
    let denom: f64 = series.iter().map(|&x| (x - m) * (x - m)).sum();
    if denom <= 0.0 {
        return 0.0;
    }
    let num: f64 = (lag..n).map(|t| (series[t] - m) * (series[t - lag] - m)).sum();
    num / denom
}

/// Ordinary least squares y = a + b x; returns (intercept, slope, r_squared).
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert!(x.len() == y.len() && x.len() >= 2, "need paired samples");
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if sxx > 0.0 && syy > 0.0 {
        (sxy * sxy) / (sxx * syy)
    } else {
        1.0
    };
    (intercept, slope, r2)
}

/// Root mean squared difference of two equal-length sequences.
pub fn rmse(a: &[f64], b: &[f64]) -> f64 {
    assert!(a.len() == b.len() && !a.is_empty(), "need equal non-empty sequences");
    let ss: f64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum();
    (ss / a.len() as f64).sqrt()
}
