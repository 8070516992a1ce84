//! `fit`: slopes, thresholds and pseudo-thresholds from a `simulate` table.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use ionqec::scaling::{fit_threshold, measure_slope, SweepPoint};
use serde::Deserialize;

use crate::config::{require, Config};
use crate::output::{num, Output};
use crate::CliError;

#[derive(Deserialize)]
struct Row {
    d: usize,
    k: usize,
    p_g: f64,
    p_i: f64,
    p_c: f64,
    #[serde(rename = "p_L")]
    p_l: f64,
    #[serde(rename = "CI_low")]
    ci_low: f64,
    #[serde(rename = "CI_high")]
    ci_high: f64,
}

fn x_value(row: &Row, x: &str) -> Result<f64, CliError> {
    Ok(match x {
        "p_g" => row.p_g,
        "p_i" => row.p_i,
        "p_c" => row.p_c,
        // per-gate crosstalk total
        "p_tilde_c" => 2.0 * (row.k as f64 - 1.0) * row.p_c,
        other => {
            return Err(CliError::config(format!(
                "fit.x must be p_g, p_i, p_c or p_tilde_c, not `{other}`"
            )))
        }
    })
}

pub fn run(config: &Config, base: &Path, dir: &Path, workers: usize) -> Result<(), CliError> {
    let s = require(&config.fit, "fit")?;
    let input = base.join(&s.input);
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(&input)
        .map_err(|e| CliError::new("io", format!("cannot read {}: {e}", input.display())))?;
    let mut groups: BTreeMap<(usize, usize), Vec<SweepPoint>> = BTreeMap::new();
    for row in reader.deserialize() {
        let row: Row = row?;
        let p = x_value(&row, &s.x)?;
        groups.entry((row.d, row.k)).or_default().push(SweepPoint {
            p,
            p_l: row.p_l,
            ci_low: row.ci_low,
            ci_high: row.ci_high,
        });
    }
    if groups.is_empty() {
        return Err(CliError::config(format!("{} has no rows", input.display())));
    }
    let mut table = String::from(
        "d,k,points,slope,slope_stderr,threshold,exponent,coefficient,pseudo_threshold\n",
    );
    for ((d, k), mut points) in groups {
        points.sort_by(|a, b| a.p.total_cmp(&b.p));
        let window = match s.window {
            Some([lo, hi]) => (lo, hi),
            None => (points[0].p, points[points.len() - 1].p),
        };
        let slope = measure_slope(&points, window)?;
        let below: Vec<SweepPoint> = points
            .iter()
            .copied()
            .filter(|p| p.p_l < s.threshold_below)
            .collect();
        let threshold = fit_threshold(&below, d, s.prefactor).unwrap_or(f64::NAN);
        // p_L = c p^e; the pseudo-threshold solves c p^e = p
        let exponent = s.exponent.unwrap_or_else(|| slope.slope.round().max(1.0));
        let logs: Vec<f64> = points
            .iter()
            .filter(|p| p.p >= window.0 && p.p <= window.1 && p.p_l > 0.0)
            .map(|p| p.p_l.ln() - exponent * p.p.ln())
            .collect();
        let ln_c = logs.iter().sum::<f64>() / logs.len() as f64;
        let pseudo = if exponent > 1.0 {
            (-ln_c / (exponent - 1.0)).exp()
        } else {
            f64::NAN
        };
        let _ = writeln!(
            table,
            "{d},{k},{},{},{},{},{},{},{}",
            slope.points,
            num(slope.slope),
            num(slope.stderr),
            num(threshold),
            num(exponent),
            num(ln_c.exp()),
            num(pseudo)
        );
    }
    let mut out = Output::create(dir, &config.hash())?;
    out.write_csv("fit.csv", &table)?;
    out.finish("fit", config, workers)
}
