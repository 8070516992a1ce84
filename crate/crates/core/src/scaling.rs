//! Analytic resource estimates: cycle durations, the unified logical-error
//! bound, optimal parallelism, minimum distances, and chain-counting
//! estimates for crosstalk-dominated failure.

use crate::error::{Error, Result};
use crate::stats::fit_line_weighted;

/// Prefactors and thresholds of the logical-error fits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingFit {
    /// Crosstalk prefactor.
    pub a: f64,
    /// Crosstalk threshold.
    pub p_th: f64,
    /// Gate/idle prefactor.
    pub b: f64,
    /// Gate/idle threshold.
    pub p_th_prime: f64,
}

impl Default for ScalingFit {
    fn default() -> Self {
        ScalingFit {
            a: 0.01,
            p_th: 0.01,
            b: 0.015,
            p_th_prime: 0.013,
        }
    }
}

impl ScalingFit {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("A", self.a),
            ("p_th", self.p_th),
            ("B", self.b),
            ("p_th'", self.p_th_prime),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::invalid(format!(
                    "fit constant {name} must be in (0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

fn check_k(d: usize, k: usize) -> Result<()> {
    if k < 1 || k > d * (d - 1) {
        return Err(Error::invalid(format!(
            "k must be in [1, {}], got {k}",
            d * (d - 1)
        )));
    }
    Ok(())
}

/// Round duration in two-qubit gate units: CNOT slots plus measurement.
pub fn cycle_duration(d: usize, k: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::invalid("distance must be at least 2"));
    }
    check_k(d, k)?;
    Ok(4.0 * (d * (d - 1)) as f64 / k as f64 + 5.0)
}

/// Round duration with the `8 l^2`-group sublattice schedule.
pub fn sublattice_cycle_duration(l: usize) -> f64 {
    8.0 * (l * l) as f64 + 5.0
}

/// The bracketed base of the unified bound.
pub fn bound_base(p_g: f64, coherence: f64, p_tilde_c: f64, t: f64, fit: &ScalingFit) -> f64 {
    let idle = if coherence.is_infinite() {
        0.0
    } else {
        3.0 * t / (8.0 * coherence)
    };
    (p_g + idle + fit.p_th_prime / fit.p_th * p_tilde_c) / fit.p_th_prime
}

/// `max(A, B) * base^((d+1)/2)`.
pub fn unified_logical_bound(
    p_g: f64,
    coherence: f64,
    p_tilde_c: f64,
    d: usize,
    t: f64,
    fit: &ScalingFit,
) -> f64 {
    fit.a.max(fit.b) * bound_base(p_g, coherence, p_tilde_c, t, fit).powf((d + 1) as f64 / 2.0)
}

/// Evaluated bound at a given parallelism with uniform per-pair crosstalk.
pub fn bound_at_parallelism(
    p_g: f64,
    coherence: f64,
    p_c: f64,
    d: usize,
    k: usize,
    fit: &ScalingFit,
) -> Result<f64> {
    let t = cycle_duration(d, k)?;
    let p_tilde = 2.0 * (k as f64 - 1.0) * p_c;
    Ok(unified_logical_bound(p_g, coherence, p_tilde, d, t, fit))
}

/// Parallelism minimising the bound; ties go to the smaller `k`.
pub fn optimal_parallelism(
    p_g: f64,
    coherence: f64,
    p_c: f64,
    d: usize,
    fit: &ScalingFit,
) -> Result<(usize, f64)> {
    let mut best = (1, bound_at_parallelism(p_g, coherence, p_c, d, 1, fit)?);
    for k in 2..=d * (d - 1) {
        let b = bound_at_parallelism(p_g, coherence, p_c, d, k, fit)?;
        if b < best.1 {
            best = (k, b);
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParallelismPolicy {
    /// Scan every `k` for each distance.
    Optimal,
    /// `k = d - 1`.
    DMinusOne,
    /// Fixed cycle time and effective crosstalk, e.g. a sublattice schedule.
    Fixed { t: f64, p_tilde_c: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingParams {
    pub p_g: f64,
    pub coherence: f64,
    /// Uniform per-pair crosstalk (unused by [`ParallelismPolicy::Fixed`]).
    pub p_c: f64,
    pub policy: ParallelismPolicy,
    pub fit: ScalingFit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingRow {
    pub d: usize,
    pub k: Option<usize>,
    pub t: f64,
    pub p_tilde_c: f64,
    pub bound: f64,
    pub base: f64,
}

impl ScalingParams {
    pub fn evaluate(&self, d: usize) -> Result<ScalingRow> {
        let (k, t, p_tilde) = match self.policy {
            ParallelismPolicy::Optimal => {
                let (k, _) = optimal_parallelism(self.p_g, self.coherence, self.p_c, d, &self.fit)?;
                (
                    Some(k),
                    cycle_duration(d, k)?,
                    2.0 * (k as f64 - 1.0) * self.p_c,
                )
            }
            ParallelismPolicy::DMinusOne => {
                let k = d - 1;
                (
                    Some(k),
                    cycle_duration(d, k)?,
                    2.0 * (k as f64 - 1.0) * self.p_c,
                )
            }
            ParallelismPolicy::Fixed { t, p_tilde_c } => (None, t, p_tilde_c),
        };
        Ok(ScalingRow {
            d,
            k,
            t,
            p_tilde_c: p_tilde,
            bound: unified_logical_bound(self.p_g, self.coherence, p_tilde, d, t, &self.fit),
            base: bound_base(self.p_g, self.coherence, p_tilde, t, &self.fit),
        })
    }
}

/// Smallest odd distance (up to `d_max`) whose bound meets `target`.
pub fn min_distance_for_target(
    params: &ScalingParams,
    target: f64,
    d_max: usize,
) -> Result<ScalingRow> {
    params.fit.validate()?;
    let mut min_base = f64::INFINITY;
    for d in (3..=d_max).step_by(2) {
        let row = params.evaluate(d)?;
        min_base = min_base.min(row.base);
        if row.bound <= target {
            return Ok(row);
        }
    }
    if min_base >= 1.0 {
        Err(Error::NoThreshold { base: min_base })
    } else {
        Err(Error::InfeasibleTarget(format!(
            "bound stays above {target:e} for every odd d <= {d_max}"
        )))
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

fn check_multiple_of_four(d: usize) -> Result<()> {
    if d == 0 || d % 4 != 0 {
        return Err(Error::invalid(format!(
            "chain estimates need d divisible by 4, got {d}"
        )));
    }
    Ok(())
}

/// Probability of the shortest crosstalk chain: `d/4` events along a row
/// or column whose hooks line up.
pub fn shortest_chain_probability(d: usize, p_c: f64) -> Result<f64> {
    check_multiple_of_four(d)?;
    if p_c == 0.0 {
        return Ok(0.0);
    }
    let ln_count = (2.0 * d as f64).ln() + ln_factorial(d) - 2.0 * ln_factorial(d / 2)
        + ln_factorial(d / 2)
        - ln_factorial(d / 4)
        - (d / 4) as f64 * 2f64.ln();
    Ok((ln_count + (d / 4) as f64 * p_c.ln()).exp())
}

/// Probability of a typical chain of `d/2` events, each with `d^2` partners.
pub fn typical_chain_probability(d: usize, p_c: f64) -> Result<f64> {
    check_multiple_of_four(d)?;
    if p_c == 0.0 {
        return Ok(0.0);
    }
    let ln_count = (2.0 * d as f64).ln() + ln_factorial(d) - 2.0 * ln_factorial(d / 2);
    Ok((ln_count + (d / 2) as f64 * ((d * d) as f64 * p_c).ln()).exp())
}

/// Constant `c` such that typical chains dominate when `p_c d^3 > c`.
pub fn chain_crossover_constant() -> f64 {
    (-(2f64.ln()) - 1.0).exp()
}

/// One point of a logical-error sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub p: f64,
    pub p_l: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Log-log slope over points with `p` in `[lo, hi]`, weighted by the
/// width of each point's confidence interval.
pub fn measure_slope(points: &[SweepPoint], window: (f64, f64)) -> Result<SlopeEstimate> {
    let used: Vec<&SweepPoint> = points
        .iter()
        .filter(|s| s.p >= window.0 && s.p <= window.1 && s.p_l > 0.0)
        .collect();
    if used.len() < 2 {
        return Err(Error::invalid(format!(
            "slope needs at least 2 nonzero points in the window, got {}",
            used.len()
        )));
    }
    let xs: Vec<f64> = used.iter().map(|s| s.p.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|s| s.p_l.ln()).collect();
    let weights: Vec<f64> = used
        .iter()
        .map(|s| {
            let sigma = if s.ci_low > 0.0 && s.ci_high > s.ci_low {
                (s.ci_high.ln() - s.ci_low.ln()) / (2.0 * 1.96)
            } else {
                1.0
            };
            1.0 / (sigma * sigma).max(1e-12)
        })
        .collect();
    let fit = fit_line_weighted(&xs, &ys, &weights)
        .ok_or_else(|| Error::invalid("degenerate slope window"))?;
    Ok(SlopeEstimate {
        slope: fit.slope,
        stderr: fit.slope_stderr,
        points: used.len(),
    })
}

/// Threshold in `p_L = A (p / p_th)^((d+1)/2)` fitted at fixed `A` by least
/// squares in log space.
pub fn fit_threshold(points: &[SweepPoint], d: usize, prefactor: f64) -> Result<f64> {
    let exponent = (d + 1) as f64 / 2.0;
    let logs: Vec<f64> = points
        .iter()
        .filter(|s| s.p_l > 0.0)
        .map(|s| s.p.ln() - (s.p_l / prefactor).ln() / exponent)
        .collect();
    if logs.is_empty() {
        return Err(Error::invalid("threshold fit needs a nonzero point"));
    }
    Ok((logs.iter().sum::<f64>() / logs.len() as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_durations() {
        assert_eq!(cycle_duration(5, 20).unwrap(), 9.0);
        assert_eq!(cycle_duration(5, 1).unwrap(), 85.0);
        assert_eq!(sublattice_cycle_duration(4), 133.0);
        assert!(cycle_duration(5, 0).is_err());
        assert!(cycle_duration(5, 21).is_err());
    }

    #[test]
    fn bound_examples() {
        let fit = ScalingFit::default();
        assert_eq!(
            unified_logical_bound(0.0, f64::INFINITY, 0.0, 5, 9.0, &fit),
            0.0
        );
        let d = 41;
        let b = bound_at_parallelism(3e-3, 5e4, 1e-5, d, d - 1, &fit).unwrap();
        assert!((b / 9.0e-11 - 1.0).abs() < 0.03, "{b:e}");
        let red = unified_logical_bound(1e-3, 1e5, 1e-6, 17, 133.0, &fit);
        assert!((red / 5.4e-11 - 1.0).abs() < 0.03, "{red:e}");
    }

    #[test]
    fn optimal_parallelism_limits() {
        let fit = ScalingFit::default();
        let (k, _) = optimal_parallelism(1e-3, 1e4, 0.0, 7, &fit).unwrap();
        assert_eq!(k, 42);
        let (k, _) = optimal_parallelism(1e-3, f64::INFINITY, 1e-5, 7, &fit).unwrap();
        assert_eq!(k, 1);
    }

    #[test]
    fn chain_estimates() {
        assert!((shortest_chain_probability(4, 1e-3).unwrap() - 48e-3).abs() < 1e-12);
        assert!((shortest_chain_probability(8, 1e-3).unwrap() - 3360e-6).abs() < 1e-10);
        assert!(
            (typical_chain_probability(4, 1e-3).unwrap() - 48.0 * (16e-3f64).powi(2)).abs() < 1e-12
        );
        assert_eq!(shortest_chain_probability(8, 0.0).unwrap(), 0.0);
        assert!(shortest_chain_probability(6, 1e-3).is_err());
        assert!((chain_crossover_constant() - 0.18394).abs() < 1e-5);
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<SweepPoint> = [1e-3, 2e-3, 4e-3, 8e-3]
            .iter()
            .map(|&p| {
                let pl = 5.0 * p * p * p;
                SweepPoint {
                    p,
                    p_l: pl,
                    ci_low: 0.9 * pl,
                    ci_high: 1.1 * pl,
                }
            })
            .collect();
        let s = measure_slope(&pts, (0.0, 1.0)).unwrap();
        assert!((s.slope - 3.0).abs() < 1e-10);
        let th = fit_threshold(&pts, 5, 0.01).unwrap();
        assert!((0.01 * (4e-3 / th).powi(3) - 5.0 * 64e-9).abs() < 1e-15);
    }
}
