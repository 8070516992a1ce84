//! `simulate`: memory experiments over a (d, k, noise) grid.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use ionqec::code::{build_rotated_surface_code, schedule_gates, SchedulePolicy};
use ionqec::decode::{logical_coherence_time, MemoryExperiment};
use ionqec::noise::{
    build_memory_circuit, idle_error_prob, CrosstalkModel, CrosstalkPauli, Durations, IdleModel,
    NoiseParams, PowerLaw,
};
use ionqec::scaling::cycle_duration;
use serde::{Deserialize, Serialize};

use crate::config::{require, Config, NoiseSection, PauliKind, ScheduleKind};
use crate::output::{hash_line, num, Output};
use crate::CliError;

pub const HEADER: &str = "d,k,p_g,p_i,p_c,shots,P_total,p_L,CI_low,CI_high,t_cycle,T_L\n";
const RESULTS: &str = "results.csv";
const CHECKPOINT: &str = "checkpoint.json";

#[derive(Clone, Debug)]
struct Point {
    d: usize,
    k: usize,
    rounds: usize,
    params: NoiseParams,
    p_i: f64,
    p_c: f64,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    config_sha256: String,
    completed: usize,
}

/// Noise settings before `k` is known: (p_g, idle, p_i column, p_c value).
fn noise_grid(noise: &NoiseSection) -> Result<Vec<(f64, IdleModel, f64, Option<f64>)>, CliError> {
    if let Some(p) = &noise.p {
        if noise.p_g.is_some()
            || noise.p_i.is_some()
            || noise.coherence_time.is_some()
            || noise.p_c.is_some()
        {
            return Err(CliError::config("noise.p excludes p_g, p_i, T and p_c"));
        }
        if noise.crosstalk.is_some() {
            return Err(CliError::config(
                "noise.p sets a uniform crosstalk; drop [noise.crosstalk]",
            ));
        }
        return Ok(p
            .values("noise.p")?
            .into_iter()
            .map(|p| (p, IdleModel::RatePerUnit(p), p, Some(p)))
            .collect());
    }
    let p_g = match &noise.p_g {
        Some(g) => g.values("noise.p_g")?,
        None => vec![0.0],
    };
    let idle: Vec<(IdleModel, f64)> = match (&noise.p_i, &noise.coherence_time) {
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "give either noise.p_i or noise.T, not both",
            ))
        }
        (Some(g), None) => g
            .values("noise.p_i")?
            .into_iter()
            .map(|p| (IdleModel::RatePerUnit(p), p))
            .collect(),
        (None, Some(g)) => g
            .values("noise.T")?
            .into_iter()
            .map(|t| Ok((IdleModel::CoherenceTime(t), idle_error_prob(1.0, t)?)))
            .collect::<Result<_, ionqec::Error>>()?,
        (None, None) => vec![(IdleModel::CoherenceTime(f64::INFINITY), 0.0)],
    };
    let p_c: Vec<Option<f64>> = match (&noise.p_c, &noise.crosstalk) {
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "give either noise.p_c or [noise.crosstalk], not both",
            ))
        }
        (Some(g), None) => g.values("noise.p_c")?.into_iter().map(Some).collect(),
        (None, Some(_)) => vec![None],
        (None, None) => vec![Some(0.0)],
    };
    let mut out = Vec::new();
    for &g in &p_g {
        for &(idle, p_i) in &idle {
            for &c in &p_c {
                out.push((g, idle, p_i, c));
            }
        }
    }
    Ok(out)
}

fn grid(config: &Config) -> Result<Vec<Point>, CliError> {
    let code = require(&config.code, "code")?;
    let default_noise = NoiseSection::default();
    let noise = config.noise.as_ref().unwrap_or(&default_noise);
    if code.d.is_empty() || code.k.is_empty() {
        return Err(CliError::config("code.d and code.k must be nonempty"));
    }
    let durations = {
        let mut d = Durations::default();
        if let Some(s) = &noise.durations {
            d.two_qubit = s.t_2q.unwrap_or(d.two_qubit);
            d.single_qubit = s.t_1q.unwrap_or(d.single_qubit);
            d.measurement = s.t_meas.unwrap_or(d.measurement);
        }
        d
    };
    let pauli = match noise.crosstalk_pauli {
        PauliKind::Role => CrosstalkPauli::Role,
        PauliKind::Depolarizing => CrosstalkPauli::Depolarizing,
    };
    let settings = noise_grid(noise)?;
    let mut points = Vec::new();
    for &d in &code.d {
        let kmax = d * d.saturating_sub(1);
        for &k in &code.k {
            let k = if k == 0 { kmax } else { k };
            for &(p_g, idle, p_i, p_c) in &settings {
                let (crosstalk, per_location) = match p_c {
                    Some(c) => {
                        let per = if noise.rescaled_crosstalk {
                            if k < 2 {
                                if c != 0.0 {
                                    return Err(CliError::config(
                                        "rescaled crosstalk needs k >= 2",
                                    ));
                                }
                                0.0
                            } else {
                                c / (2.0 * (k - 1) as f64)
                            }
                        } else {
                            c
                        };
                        (CrosstalkModel::Uniform(per), per)
                    }
                    None => {
                        let s = noise.crosstalk.as_ref().expect("checked in noise_grid");
                        let law = PowerLaw {
                            clamp: s.clamp,
                            ..PowerLaw::new(s.c, s.gamma, s.rmin)
                        };
                        (CrosstalkModel::PowerLaw(law), f64::NAN)
                    }
                };
                let params = NoiseParams {
                    p_gate: p_g,
                    idle,
                    crosstalk,
                    crosstalk_pauli: pauli,
                    durations,
                };
                params.validate()?;
                points.push(Point {
                    d,
                    k,
                    rounds: code.rounds.unwrap_or(d),
                    params,
                    p_i,
                    p_c: per_location,
                });
            }
        }
    }
    Ok(points)
}

/// Independent seed per grid point.
fn point_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_point(config: &Config, point: &Point, seed: u64) -> Result<String, CliError> {
    let code = require(&config.code, "code")?;
    let shots = config
        .shots
        .ok_or_else(|| CliError::config("shots is required"))?;
    if shots == 0 {
        return Err(CliError::config("shots must be at least 1"));
    }
    let layout = build_rotated_surface_code(point.d)?;
    let policy = match code.schedule {
        ScheduleKind::Raster => SchedulePolicy::Raster,
        ScheduleKind::Randomized => SchedulePolicy::Randomized {
            seed: code.schedule_seed,
        },
    };
    let schedule = schedule_gates(&layout, point.k, policy)?;
    let circuit = build_memory_circuit(&layout, &schedule, &point.params, point.rounds)?;
    let experiment = MemoryExperiment::new(&circuit)?;
    let est = match config.run.as_ref().and_then(|r| r.max_failures) {
        Some(target) => experiment.run_until(shots, target, seed)?,
        None => experiment.run(shots, seed)?,
    };
    let t_cycle = cycle_duration(point.d, point.k)?;
    let t_l = logical_coherence_time(est.p_round, t_cycle).unwrap_or(f64::NAN);
    Ok(format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}\n",
        point.d,
        point.k,
        num(point.params.p_gate),
        num(point.p_i),
        num(point.p_c),
        est.shots,
        num(est.p_total),
        num(est.p_round),
        num(est.ci_low),
        num(est.ci_high),
        num(t_cycle),
        num(t_l)
    ))
}

/// Rows already finished by an interrupted run with the same config.
fn resume(out: &Output) -> Result<Vec<String>, CliError> {
    let Ok(text) = fs::read_to_string(out.path(CHECKPOINT)) else {
        return Ok(Vec::new());
    };
    let Ok(cp) = serde_json::from_str::<Checkpoint>(&text) else {
        return Ok(Vec::new());
    };
    if cp.config_sha256 != out.hash {
        return Ok(Vec::new());
    }
    let Ok(results) = fs::read_to_string(out.path(RESULTS)) else {
        return Ok(Vec::new());
    };
    let mut lines = results.lines();
    if lines.next() != Some(hash_line(&out.hash).trim_end())
        || lines.next() != Some(HEADER.trim_end())
    {
        return Ok(Vec::new());
    }
    let rows: Vec<String> = lines.take(cp.completed).map(|l| format!("{l}\n")).collect();
    Ok(if rows.len() == cp.completed {
        rows
    } else {
        Vec::new()
    })
}

fn save_checkpoint(out: &Output, completed: usize) -> Result<(), CliError> {
    let cp = Checkpoint {
        config_sha256: out.hash.clone(),
        completed,
    };
    let tmp = out.path("checkpoint.json.tmp");
    fs::write(
        &tmp,
        serde_json::to_string(&cp).expect("checkpoint serializes"),
    )?;
    fs::rename(tmp, out.path(CHECKPOINT))?;
    Ok(())
}

pub fn run(config: &Config, dir: &Path, workers: usize) -> Result<(), CliError> {
    let points = grid(config)?;
    let seed = config.seed.unwrap_or(0);
    let mut out = Output::create(dir, &config.hash())?;
    let done = resume(&out)?;
    let mut file = fs::File::create(out.path(RESULTS))?;
    file.write_all(hash_line(&out.hash).as_bytes())?;
    file.write_all(HEADER.as_bytes())?;
    for row in &done {
        file.write_all(row.as_bytes())?;
    }
    drop(file);
    save_checkpoint(&out, done.len())?;
    for (i, point) in points.iter().enumerate().skip(done.len()) {
        let row = run_point(config, point, point_seed(seed, i))?;
        let mut file = OpenOptions::new().append(true).open(out.path(RESULTS))?;
        file.write_all(row.as_bytes())?;
        file.sync_data()?;
        save_checkpoint(&out, i + 1)?;
    }
    fs::remove_file(out.path(CHECKPOINT))?;
    out.register(RESULTS)?;
    out.finish("simulate", config, workers)
}
