//! `scaling`: analytic logical-error bound versus code distance.

use std::fmt::Write;
use std::path::Path;

use ionqec::scaling::{
    min_distance_for_target, sublattice_cycle_duration, ParallelismPolicy, ScalingFit,
    ScalingParams, ScalingRow,
};

use crate::config::{require, Config};
use crate::output::{num, Output};
use crate::CliError;

const HEADER: &str = "d,k,t,p_tilde_c,base,bound\n";

fn row(r: &ScalingRow) -> String {
    let k = r.k.map_or_else(String::new, |k| k.to_string());
    format!(
        "{},{k},{},{},{},{}\n",
        r.d,
        num(r.t),
        num(r.p_tilde_c),
        num(r.base),
        num(r.bound)
    )
}

pub fn run(config: &Config, dir: &Path, workers: usize) -> Result<(), CliError> {
    let s = require(&config.scaling, "scaling")?;
    if s.d.is_empty() {
        return Err(CliError::config(
            "scaling.d must list at least one distance",
        ));
    }
    let policy = match s.parallelism.as_str() {
        "optimal" => ParallelismPolicy::Optimal,
        "d-1" => ParallelismPolicy::DMinusOne,
        "fixed" => {
            let t = match (s.t, s.l) {
                (Some(t), None) => t,
                (None, Some(l)) => sublattice_cycle_duration(l),
                _ => {
                    return Err(CliError::config(
                        "fixed parallelism needs exactly one of scaling.t and scaling.l",
                    ))
                }
            };
            let p_tilde_c = s
                .p_tilde_c
                .ok_or_else(|| CliError::config("fixed parallelism needs scaling.p_tilde_c"))?;
            ParallelismPolicy::Fixed { t, p_tilde_c }
        }
        other => {
            return Err(CliError::config(format!(
                "unknown parallelism policy `{other}`"
            )))
        }
    };
    let fit = s
        .fit
        .as_ref()
        .map_or_else(ScalingFit::default, |f| ScalingFit {
            a: f.a,
            p_th: f.p_th,
            b: f.b,
            p_th_prime: f.p_th_prime,
        });
    let params = ScalingParams {
        p_g: s.p_g,
        coherence: s.coherence_time,
        p_c: s.p_c,
        policy,
        fit,
    };
    let mut table = String::from(HEADER);
    for &d in &s.d {
        table.push_str(&row(&params.evaluate(d)?));
    }
    let target = match s.target {
        Some(target) => Some((target, min_distance_for_target(&params, target, s.d_max)?)),
        None => None,
    };
    let mut out = Output::create(dir, &config.hash())?;
    out.write_csv("scaling.csv", &table)?;
    if let Some((target, r)) = target {
        let mut body = format!("target,{HEADER}");
        let _ = write!(body, "{},{}", num(target), row(&r));
        out.write_csv("target.csv", &body)?;
    }
    out.finish("scaling", config, workers)
}
