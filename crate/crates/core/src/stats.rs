//! Small statistics helpers: binomial intervals and least-squares lines.

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
}

/// Ordinary least squares `y = slope * x + intercept`; `None` with fewer
/// than two distinct x values.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    fit_line_weighted(xs, ys, &vec![1.0; xs.len()])
}

/// Weighted least squares with weights `1/sigma^2`. The slope error is
/// scaled by the reduced chi-square when there are more than two points.
pub fn fit_line_weighted(xs: &[f64], ys: &[f64], weights: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    assert_eq!(n, ys.len());
    assert_eq!(n, weights.len());
    if n < 2 {
        return None;
    }
    let sw: f64 = weights.iter().sum();
    let mx = xs.iter().zip(weights).map(|(x, w)| w * x).sum::<f64>() / sw;
    let my = ys.iter().zip(weights).map(|(y, w)| w * y).sum::<f64>() / sw;
    let sxx: f64 = xs
        .iter()
        .zip(weights)
        .map(|(x, w)| w * (x - mx).powi(2))
        .sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .zip(weights)
        .map(|((x, y), w)| w * (x - mx) * (y - my))
        .sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid: Vec<f64> = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| y - slope * x - intercept)
        .collect();
    let chi2: f64 = resid.iter().zip(weights).map(|(r, w)| w * r * r).sum();
    let rms_residual = (resid.iter().map(|r| r * r).sum::<f64>() / n as f64).sqrt();
    let slope_stderr = if n > 2 {
        (chi2 / (n - 2) as f64 / sxx).sqrt()
    } else {
        (1.0 / sxx).sqrt()
    };
    Some(LineFit {
        slope,
        intercept,
        slope_stderr,
        rms_residual,
    })
}
