//! `pulse`: design one parallel CNOT layer on the embedded code crystal and
//! sample its crosstalk under amplitude and detuning noise.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write;
use std::path::Path;

use ionqec::code::build_rotated_surface_code;
use ionqec::ionphys::constants::{raman_wavevector_355nm, two_pi_mhz, yb171_mass};
use ionqec::ionphys::{embed_layout, transverse_modes, IonCrystal, SegmentKernel};
use ionqec::pulse::{
    design_parallel_layer, design_residuals, design_transplanted_layer, fit_power_law, rabi_stats,
    sample_noisy_crosstalk, EaseOptions, GateTargets, NoiseSpec,
};

use crate::config::{require, Config, DesignMethod, Regime};
use crate::output::{hash_line, num, Output};
use crate::CliError;

pub fn run(config: &Config, dir: &Path, workers: usize) -> Result<(), CliError> {
    let s = require(&config.pulse, "pulse")?;
    let slow = s.regime == Regime::Slow;
    let d = s.d.unwrap_or(if slow { 5 } else { 11 });
    let a = s.a.unwrap_or(if slow { 5e-6 } else { 8e-6 });
    let tau = s.tau.unwrap_or(if slow { 500e-6 } else { 100e-6 });
    let n_seg = s.n_seg.unwrap_or(if slow { 500 } else { 100 });
    let method = s.method.unwrap_or(if slow {
        DesignMethod::Ease
    } else {
        DesignMethod::Transplant
    });
    let robust = s.robust.unwrap_or(slow);
    if s.layer > 3 {
        return Err(CliError::config("pulse.layer must be 0..=3"));
    }

    let layout = build_rotated_surface_code(d)?;
    let positions = embed_layout(&layout, a);
    let crystal = IonCrystal::new(
        positions.clone(),
        yb171_mass(),
        two_pi_mhz(s.trap_mhz),
        raman_wavevector_355nm(),
    )?;
    let modes = transverse_modes(&crystal)?;
    let mu = match (s.mu_mhz, s.mu_midpoint) {
        (Some(_), Some(_)) => {
            return Err(CliError::config(
                "give either pulse.mu_mhz or pulse.mu_midpoint",
            ))
        }
        (Some(f), None) => two_pi_mhz(f),
        (None, m) => {
            let i = m.unwrap_or(if slow { 3 } else { 0 });
            if i + 1 >= modes.omega.len() {
                return Err(CliError::config("pulse.mu_midpoint is past the last mode"));
            }
            0.5 * (modes.omega[i] + modes.omega[i + 1])
        }
    };
    let options = EaseOptions {
        robust_detuning: robust,
        ..EaseOptions::default()
    };
    let targets = GateTargets::from_layer(&layout, s.layer)?;
    let (pulse, null_dim, alpha_res, theta_res) = match method {
        DesignMethod::Ease => {
            let design = design_parallel_layer(&modes, &layout, s.layer, mu, tau, n_seg, &options)?;
            (
                design.pulse,
                design.null_dim,
                design.alpha_residual,
                design.theta_residual,
            )
        }
        DesignMethod::Transplant => {
            let pairs: Vec<(usize, usize)> = layout
                .cnot_layer(s.layer)
                .iter()
                .map(|g| (g.control, g.target))
                .collect();
            let layer = design_transplanted_layer(
                &modes, &positions, &pairs, FRAC_PI_4, mu, tau, n_seg, &options,
            )?;
            let kernel = SegmentKernel::new(&modes.omega, mu, tau, n_seg)?;
            let (ar, tr) = design_residuals(&layer.pulse, &kernel, &modes, &targets);
            (layer.pulse, layer.source.null_dim, ar, tr)
        }
    };
    let spec = NoiseSpec {
        amp_fraction: s.amp_fraction,
        detuning_halfwidth: 2.0 * PI * s.detuning_hz,
        n_samples: s.samples,
        seed: config.seed.unwrap_or(0),
    };
    let report = sample_noisy_crosstalk(&pulse, &modes, &crystal, a, &targets, &spec)?;

    let mut out = Output::create(dir, &config.hash())?;
    out.write("pulse.txt", &(hash_line(&out.hash) + &pulse.to_text()))?;
    out.write_csv("crosstalk.csv", &report.to_csv())?;
    let mut bins =
        String::from("r_lo,r_hi,count,mean_pc_intrinsic,mean_pc_noise,mean_pc_sampled\n");
    for b in report.bins(s.bin_width) {
        let _ = writeln!(
            bins,
            "{},{},{},{},{},{}",
            num(b.r_lo),
            num(b.r_hi),
            b.count,
            num(b.mean_pc_intrinsic),
            num(b.mean_pc_noise),
            num(b.mean_pc_sampled)
        );
    }
    out.write_csv("bins.csv", &bins)?;

    let points: Vec<(f64, f64)> = report
        .undesired()
        .map(|p| (p.r_over_a, p.pc_total()))
        .collect();
    // the power law only makes sense with a spread of distances
    let law = fit_power_law(&points, s.r_min).ok();
    let (max_rabi, mean_rabi) = rabi_stats(&pulse);
    let (near, far) = report.near_far_means();
    let khz = 2.0 * PI * 1e3;
    let mut rows: Vec<(&str, f64)> = vec![
        ("ions", crystal.num_ions() as f64),
        ("gates", targets.pairs().len() as f64),
        ("mu_mhz", mu / two_pi_mhz(1.0)),
        ("null_dim", null_dim as f64),
        ("alpha_residual", alpha_res),
        ("theta_residual", theta_res),
        ("max_rabi_khz", max_rabi / khz),
        ("mean_rabi_khz", mean_rabi / khz),
        ("mean_gate_infidelity", report.mean_gate_infidelity),
        ("nominal_gate_infidelity", report.nominal_gate_infidelity),
        ("mean_undesired_pc", report.mean_undesired_pc()),
        ("near_mean_pc", near),
        ("far_mean_pc", far),
    ];
    if let Some(f) = &law {
        rows.extend([
            ("power_law_coefficient", f.coefficient),
            ("power_law_exponent", f.exponent),
            ("power_law_exponent_stderr", f.exponent_stderr),
            ("power_law_points", f.points as f64),
        ]);
    }
    let mut summary = String::from("metric,value\n");
    for (k, v) in rows {
        let _ = writeln!(summary, "{k},{}", num(v));
    }
    out.write_csv("summary.csv", &summary)?;

    // drop-in noise section for `simulate`
    let mut model = hash_line(&out.hash);
    model.push_str("[noise]\n");
    match (&law, slow) {
        (Some(f), false) => {
            let _ = write!(
                model,
                "[noise.crosstalk]\nc = {:e}\ngamma = {:e}\nrmin = {:e}\n",
                f.coefficient, f.exponent, s.r_min
            );
        }
        _ => {
            let _ = writeln!(model, "p_c = {:e}", report.mean_undesired_pc());
        }
    }
    out.write("crosstalk_model.toml", &model)?;
    out.finish("pulse", config, workers)
}
