//! Crosstalk of a designed pulse under sampled calibration noise.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::GateTargets;
use crate::ionphys::{gate_infidelity, IonCrystal, ModeData, PulseSequence, SegmentKernel};
use crate::stats::fit_line;
use crate::{Error, Result};

/// Uniform per-ion, per-segment relative amplitude error and a uniform
/// global detuning shift, sampled `n_samples` times.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    pub amp_fraction: f64,
    /// Half-width of the detuning shift (rad/s).
    pub detuning_halfwidth: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec {
            amp_fraction: 0.01,
            detuning_halfwidth: 2.0 * PI * 500.0,
            n_samples: 100,
            seed: 0,
        }
    }
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        NoiseSpec {
            amp_fraction: 0.0,
            detuning_halfwidth: 0.0,
            n_samples: 1,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amp_fraction >= 0.0) || !(self.detuning_halfwidth >= 0.0) {
            return Err(Error::invalid("noise widths must be non-negative"));
        }
        if self.n_samples == 0 {
            return Err(Error::invalid("need at least one noise sample"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairCrosstalk {
    pub ion_i: usize,
    pub ion_j: usize,
    pub r_over_a: f64,
    pub targeted: bool,
    pub theta_nominal: f64,
    /// Squared deviation of the nominal phase from its target.
    pub pc_intrinsic: f64,
    /// Sample standard deviation of the phase.
    pub delta_theta: f64,
    pub pc_noise: f64,
    /// Sample mean of the squared deviation from target.
    pub pc_sampled: f64,
}

impl PairCrosstalk {
    pub fn pc_total(&self) -> f64 {
        self.pc_intrinsic + self.pc_noise
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceBin {
    pub r_lo: f64,
    pub r_hi: f64,
    pub count: usize,
    pub mean_pc_intrinsic: f64,
    pub mean_pc_noise: f64,
    pub mean_pc_sampled: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrosstalkReport {
    /// Every unordered pair of addressed ions.
    pub pairs: Vec<PairCrosstalk>,
    /// Mean per-gate infidelity of the targeted pairs under noise.
    pub mean_gate_infidelity: f64,
    /// Per-gate infidelity of the targeted pairs without noise.
    pub nominal_gate_infidelity: f64,
    pub n_samples: usize,
}

impl CrosstalkReport {
    pub fn undesired(&self) -> impl Iterator<Item = &PairCrosstalk> {
        self.pairs.iter().filter(|p| !p.targeted)
    }

    /// Mean sampled crosstalk over untargeted pairs.
    pub fn mean_undesired_pc(&self) -> f64 {
        let (sum, n) = self
            .undesired()
            .fold((0.0, 0usize), |(s, n), p| (s + p.pc_sampled, n + 1));
        if n == 0 {
            0.0
        } else {
            sum / n as f64
        }
    }

    /// Mean sampled crosstalk of the untargeted pairs at or below, and above,
    /// their median distance.
    pub fn near_far_means(&self) -> (f64, f64) {
        let mut r: Vec<f64> = self.undesired().map(|p| p.r_over_a).collect();
        if r.is_empty() {
            return (0.0, 0.0);
        }
        r.sort_by(f64::total_cmp);
        let median = r[(r.len() - 1) / 2];
        let mean = |near: bool| {
            let v: Vec<f64> = self
                .undesired()
                .filter(|p| (p.r_over_a <= median) == near)
                .map(|p| p.pc_sampled)
                .collect();
            if v.is_empty() {
                0.0
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            }
        };
        (mean(true), mean(false))
    }

    /// Untargeted pairs binned by `r/a` in bins of `width`.
    pub fn bins(&self, width: f64) -> Vec<DistanceBin> {
        let mut acc: std::collections::BTreeMap<i64, (usize, f64, f64, f64)> = Default::default();
        for p in self.undesired() {
            let e = acc.entry((p.r_over_a / width).floor() as i64).or_default();
            e.0 += 1;
            e.1 += p.pc_intrinsic;
            e.2 += p.pc_noise;
            e.3 += p.pc_sampled;
        }
        acc.into_iter()
            .map(|(b, (n, i, no, s))| {
                let n_f = n as f64;
                DistanceBin {
                    r_lo: b as f64 * width,
                    r_hi: (b + 1) as f64 * width,
                    count: n,
                    mean_pc_intrinsic: i / n_f,
                    mean_pc_noise: no / n_f,
                    mean_pc_sampled: s / n_f,
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("ion_i,ion_j,r_over_a,theta_nominal,pc_intrinsic,delta_theta,pc_noise\n");
        for p in &self.pairs {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:e},{:e},{:e},{:e}",
                p.ion_i,
                p.ion_j,
                p.r_over_a,
                p.theta_nominal,
                p.pc_intrinsic,
                p.delta_theta,
                p.pc_noise
            );
        }
        out
    }
}

fn perturbed(pulse: &PulseSequence, spec: &NoiseSpec, sample: usize) -> (f64, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(sample as u64);
    let mu = pulse.mu + spec.detuning_halfwidth * rng.random_range(-1.0..=1.0);
    let amps = pulse
        .amplitudes
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| x * (1.0 + spec.amp_fraction * rng.random_range(-1.0..=1.0)))
                .collect()
        })
        .collect();
    (mu, amps)
}

fn pair_infidelity(
    alpha: &DMatrix<num_complex::Complex64>,
    theta: &DMatrix<f64>,
    a: usize,
    b: usize,
    want: f64,
    nbar: &[f64],
) -> f64 {
    let rows = [a, b];
    let al = alpha.select_rows(rows.iter());
    let th = DMatrix::from_row_slice(2, 2, &[0.0, theta[(a, b)], theta[(b, a)], 0.0]);
    let tg = DMatrix::from_row_slice(2, 2, &[0.0, want, want, 0.0]);
    gate_infidelity(&al, &th, &tg, nbar)
}

/// Phases between every pair of addressed ions, nominal and under
/// `spec.n_samples` independent noise draws (one RNG stream per sample).
pub fn sample_noisy_crosstalk(
    pulse: &PulseSequence,
    modes: &ModeData,
    crystal: &IonCrystal,
    lattice_constant: f64,
    targets: &GateTargets,
    spec: &NoiseSpec,
) -> Result<CrosstalkReport> {
    spec.validate()?;
    pulse.validate()?;
    let n = pulse.ions.len();
    for &ion in &pulse.ions {
        if ion >= crystal.num_ions() || ion >= modes.b.nrows() {
            return Err(Error::UnknownQubit(ion));
        }
    }
    let gates: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter_map(|(a, b)| {
            let t = targets.theta(pulse.ions[a], pulse.ions[b]);
            (t != 0.0).then_some((a, b, t))
        })
        .collect();
    let gate_error = |alpha: &DMatrix<_>, theta: &DMatrix<f64>| {
        if gates.is_empty() {
            return 0.0;
        }
        gates
            .iter()
            .map(|&(a, b, t)| pair_infidelity(alpha, theta, a, b, t, &modes.nbar))
            .sum::<f64>()
            / gates.len() as f64
    };

    let kernel = SegmentKernel::new(&modes.omega, pulse.mu, pulse.tau, pulse.n_seg)?;
    let theta_nom = kernel.theta(modes, &pulse.ions, &pulse.amplitudes);
    let nominal_gate_infidelity = gate_error(
        &kernel.alpha(modes, &pulse.ions, &pulse.amplitudes),
        &theta_nom,
    );

    let samples: Vec<(DMatrix<f64>, f64)> = (0..spec.n_samples)
        .into_par_iter()
        .map(|s| {
            let (mu, amps) = perturbed(pulse, spec, s);
            let kernel = SegmentKernel::new(&modes.omega, mu, pulse.tau, pulse.n_seg)
                .expect("validated timing");
            let theta = kernel.theta(modes, &pulse.ions, &amps);
            let infid = gate_error(&kernel.alpha(modes, &pulse.ions, &amps), &theta);
            (theta, infid)
        })
        .collect();

    let m = spec.n_samples as f64;
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            let (i, j) = (pulse.ions[a], pulse.ions[b]);
            let want = targets.theta(i, j);
            let mean = samples.iter().map(|s| s.0[(a, b)]).sum::<f64>() / m;
            let var = if spec.n_samples > 1 {
                samples
                    .iter()
                    .map(|s| (s.0[(a, b)] - mean).powi(2))
                    .sum::<f64>()
                    / (m - 1.0)
            } else {
                0.0
            };
            let pc_sampled = samples
                .iter()
                .map(|s| (s.0[(a, b)] - want).powi(2))
                .sum::<f64>()
                / m;
            let nominal = theta_nom[(a, b)];
            pairs.push(PairCrosstalk {
                ion_i: i,
                ion_j: j,
                r_over_a: crystal.distance(i, j) / lattice_constant,
                targeted: want != 0.0,
                theta_nominal: nominal,
                pc_intrinsic: (nominal - want).powi(2),
                delta_theta: var.sqrt(),
                pc_noise: var,
                pc_sampled,
            });
        }
    }
    let mean_gate_infidelity = samples.iter().map(|s| s.1).sum::<f64>() / m;
    Ok(CrosstalkReport {
        pairs,
        mean_gate_infidelity,
        nominal_gate_infidelity,
        n_samples: spec.n_samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    /// `p = coefficient * (r/a)^(-exponent)`.
    pub coefficient: f64,
    pub exponent: f64,
    pub exponent_stderr: f64,
    /// RMS residual of `ln p`.
    pub rms_residual: f64,
    pub points: usize,
}

/// Least squares of `ln p` on `ln(r/a)` over points with `r/a >= r_min`.
pub fn fit_power_law(points: &[(f64, f64)], r_min: f64) -> Result<PowerLawFit> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(r, _)| r >= r_min)
        .collect();
    if used.iter().any(|&(r, p)| !(r > 0.0) || !(p > 0.0)) {
        return Err(Error::invalid(
            "power-law fit needs positive distances and probabilities",
        ));
    }
    let xs: Vec<f64> = used.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.1.ln()).collect();
    let fit = fit_line(&xs, &ys)
        .ok_or_else(|| Error::invalid("power-law fit needs two distinct distances"))?;
    Ok(PowerLawFit {
        coefficient: fit.intercept.exp(),
        exponent: -fit.slope,
        exponent_stderr: fit.slope_stderr,
        rms_residual: fit.rms_residual,
        points: used.len(),
    })
}
