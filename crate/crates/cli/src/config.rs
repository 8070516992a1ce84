//! Experiment configuration: one TOML file with a section per command.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub shots: Option<u64>,
    /// Worker threads; never part of the config hash.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
    pub code: Option<CodeSection>,
    pub noise: Option<NoiseSection>,
    pub run: Option<RunSection>,
    pub pulse: Option<PulseSection>,
    pub scaling: Option<ScalingSection>,
    pub fit: Option<FitSection>,
}

/// A parameter grid: one value, a list, or an evenly spaced range.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Grid {
    One(f64),
    List(Vec<f64>),
    Range {
        min: f64,
        max: f64,
        points: usize,
        #[serde(default)]
        spacing: Spacing,
    },
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

impl Grid {
    pub fn values(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let v = match self {
            Grid::One(x) => vec![*x],
            Grid::List(v) => v.clone(),
            Grid::Range {
                min,
                max,
                points,
                spacing,
            } => {
                let n = *points;
                if n == 0 {
                    vec![]
                } else if n == 1 {
                    vec![*min]
                } else {
                    if *spacing == Spacing::Log && !(*min > 0.0 && *max > 0.0) {
                        return Err(CliError::config(format!(
                            "{name}: log grid needs positive bounds"
                        )));
                    }
                    (0..n)
                        .map(|i| {
                            let f = i as f64 / (n - 1) as f64;
                            match spacing {
                                Spacing::Log => (min.ln() + f * (max.ln() - min.ln())).exp(),
                                Spacing::Linear => min + f * (max - min),
                            }
                        })
                        .collect()
                }
            }
        };
        if v.is_empty() {
            return Err(CliError::config(format!("{name}: grid is empty")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::config(format!(
                "{name}: grid values must be finite"
            )));
        }
        Ok(v)
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    #[default]
    Raster,
    Randomized,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    pub d: Vec<usize>,
    /// Syndrome rounds; defaults to `d`.
    pub rounds: Option<usize>,
    /// Parallelism levels; 0 means every gate of a layer at once.
    #[serde(default = "full_parallelism")]
    pub k: Vec<usize>,
    #[serde(default)]
    pub schedule: ScheduleKind,
    #[serde(default)]
    pub schedule_seed: u64,
}

fn full_parallelism() -> Vec<usize> {
    vec![0]
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum PauliKind {
    #[default]
    Role,
    Depolarizing,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawSection {
    pub c: f64,
    pub gamma: f64,
    pub rmin: f64,
    pub clamp: Option<f64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DurationsSection {
    pub t_2q: Option<f64>,
    pub t_1q: Option<f64>,
    pub t_meas: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// Sets `p_g = p_i = p_c = p`; excludes the separate grids.
    pub p: Option<Grid>,
    pub p_g: Option<Grid>,
    /// Idle error per unit time.
    pub p_i: Option<Grid>,
    /// Coherence time in two-qubit gate units.
    #[serde(rename = "T")]
    pub coherence_time: Option<Grid>,
    pub p_c: Option<Grid>,
    /// Treat `p_c` values as the per-gate total `2(k-1) p_c`.
    #[serde(default)]
    pub rescaled_crosstalk: bool,
    #[serde(default)]
    pub crosstalk_pauli: PauliKind,
    pub crosstalk: Option<PowerLawSection>,
    pub durations: Option<DurationsSection>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    /// Stop a grid point early once this many failures are seen.
    pub max_failures: Option<u64>,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Slow,
    Fast,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum DesignMethod {
    /// Full sequential null-space design of the whole layer.
    Ease,
    /// Central pair designed alone, shape reused for every gate.
    Transplant,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    pub regime: Regime,
    pub d: Option<usize>,
    #[serde(default)]
    pub layer: usize,
    /// Lattice constant (m).
    pub a: Option<f64>,
    /// Gate duration (s).
    pub tau: Option<f64>,
    pub n_seg: Option<usize>,
    pub method: Option<DesignMethod>,
    /// Drive detuning (MHz, times 2π).
    pub mu_mhz: Option<f64>,
    /// Alternatively, detune midway between modes `i` and `i + 1` (modes in
    /// descending frequency). Slow regime default: 3; fast: 0.
    pub mu_midpoint: Option<usize>,
    #[serde(default = "default_trap_mhz")]
    pub trap_mhz: f64,
    /// Also null the detuning derivative of the displacement. Defaults to on
    /// for the slow regime.
    pub robust: Option<bool>,
    #[serde(default = "default_amp_fraction")]
    pub amp_fraction: f64,
    /// Half-width of the detuning noise (Hz).
    #[serde(default = "default_detuning_hz")]
    pub detuning_hz: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_r_min")]
    pub r_min: f64,
    #[serde(default = "default_bin_width")]
    pub bin_width: f64,
}

fn default_trap_mhz() -> f64 {
    3.0
}
fn default_amp_fraction() -> f64 {
    0.01
}
fn default_detuning_hz() -> f64 {
    500.0
}
fn default_samples() -> usize {
    100
}
fn default_r_min() -> f64 {
    4.0
}
fn default_bin_width() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FitConstants {
    #[serde(rename = "A")]
    pub a: f64,
    pub p_th: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub p_th_prime: f64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    pub p_g: f64,
    #[serde(rename = "T")]
    pub coherence_time: f64,
    #[serde(default)]
    pub p_c: f64,
    /// `optimal`, `d-1`, or `fixed` (with `t` and `p_tilde_c`).
    #[serde(default = "default_policy")]
    pub parallelism: String,
    pub t: Option<f64>,
    pub p_tilde_c: Option<f64>,
    /// Sublattice size; sets `t = 8 l^2 + 5` for the fixed policy.
    pub l: Option<usize>,
    pub d: Vec<usize>,
    pub target: Option<f64>,
    #[serde(default = "default_d_max")]
    pub d_max: usize,
    pub fit: Option<FitConstants>,
}

fn default_policy() -> String {
    "optimal".into()
}
fn default_d_max() -> usize {
    201
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    /// Results table from `simulate`, relative to the config file.
    pub input: String,
    /// Column used as the physical error rate.
    #[serde(default = "default_x")]
    pub x: String,
    pub window: Option<[f64; 2]>,
    /// Exponent of `p_L = c p^e` for the pseudo-threshold; defaults to the
    /// rounded fitted slope.
    pub exponent: Option<f64>,
    /// Prefactor of the threshold fit `p_L = A (p/p_th)^((d+1)/2)`.
    #[serde(default = "default_prefactor")]
    pub prefactor: f64,
    /// Only points with `p_L` below this enter the threshold fit.
    #[serde(default = "default_threshold_below")]
    pub threshold_below: f64,
}

fn default_threshold_below() -> f64 {
    0.1
}

fn default_x() -> String {
    "p_g".into()
}
fn default_prefactor() -> f64 {
    0.01
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new("io", format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form, worker count excluded.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(canonical.as_bytes()))
    }
}

/// The named section, or a config error.
pub fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    section
        .as_ref()
        .ok_or_else(|| CliError::config(format!("missing [{name}] section")))
}
