mod common;

use std::collections::HashSet;

use common::{quad_alpha_theta, random_pulse};
use ionqec::code::build_rotated_surface_code;
use ionqec::ionphys::constants::*;
use ionqec::ionphys::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn crystal(positions: Vec<[f64; 2]>) -> IonCrystal {
    IonCrystal::new(
        positions,
        yb171_mass(),
        two_pi_mhz(3.0),
        raman_wavevector_355nm(),
    )
    .unwrap()
}

fn rel_err<T: Copy>(
    a: &nalgebra::DMatrix<T>,
    b: &nalgebra::DMatrix<T>,
    norm: impl Fn(T) -> f64,
) -> f64
where
    T: std::ops::Sub<Output = T> + nalgebra::Scalar,
{
    let scale = b.iter().map(|&x| norm(x)).fold(0.0, f64::max);
    let diff = a
        .iter()
        .zip(b.iter())
        .map(|(&x, &y)| norm(x - y))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

#[test]
fn closed_forms_match_quadrature() {
    let c = crystal(triangular_positions(2, 3, 5e-6));
    let modes = transverse_modes(&c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let pulse = random_pulse(&mut rng, &modes);
        let h = pulse.segment_duration();
        let per_seg = ((modes.omega[0] + pulse.mu.abs()) * h).ceil() as usize;
        let (qa, qt) = quad_alpha_theta(&pulse, &modes, per_seg);
        let alpha = alpha_integrals(&pulse, &modes).unwrap();
        let theta = theta_integrals(&pulse, &modes).unwrap();
        assert!(rel_err(&alpha, &qa, |z| z.norm()) < 1e-7, "alpha");
        assert!(rel_err(&theta, &qt, f64::abs) < 1e-7, "theta");
    }
}

#[test]
fn modes_are_orthonormal_with_exact_com() {
    for positions in [
        triangular_positions(4, 5, 5e-6),
        embed_layout(&build_rotated_surface_code(3).unwrap(), 8e-6),
        embed_layout(&build_rotated_surface_code(5).unwrap(), 5e-6),
    ] {
        let n = positions.len();
        let c = crystal(positions);
        let modes = transverse_modes(&c).unwrap();
        let gram = modes.b.tr_mul(&modes.b);
        assert!((gram - nalgebra::DMatrix::identity(n, n)).amax() < 1e-10);
        assert!((modes.omega[0] / c.omega_x - 1.0).abs() < 1e-9);
        let uniform = 1.0 / (n as f64).sqrt();
        assert!(modes
            .b
            .column(0)
            .iter()
            .all(|&x| (x - uniform).abs() < 1e-8));
        assert!(modes.omega.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn theta_scales_quadratically_and_alpha_linearly() {
    let c = crystal(triangular_positions(2, 2, 5e-6));
    let modes = transverse_modes(&c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pulse = random_pulse(&mut rng, &modes);
    let s = 1.7;
    let scaled = pulse.scaled(s);
    let (a0, t0) = (
        alpha_integrals(&pulse, &modes).unwrap(),
        theta_integrals(&pulse, &modes).unwrap(),
    );
    let (a1, t1) = (
        alpha_integrals(&scaled, &modes).unwrap(),
        theta_integrals(&scaled, &modes).unwrap(),
    );
    assert!(rel_err(&t1, &(t0.clone() * (s * s)), f64::abs) < 1e-12);
    assert!(rel_err(&a1, &a0.map(|z| z * s), |z| z.norm()) < 1e-12);
    assert!((t0.clone() - t0.transpose()).amax() == 0.0);
}

#[test]
fn layers_map_onto_each_other_under_half_turn() {
    let d = 5;
    let layout = build_rotated_surface_code(d).unwrap();
    let pos = embed_layout(&layout, 5e-6);
    let n = pos.len() as f64;
    let centre = [
        pos.iter().map(|p| p[0]).sum::<f64>() / n,
        pos.iter().map(|p| p[1]).sum::<f64>() / n,
    ];
    let key = |p: [f64; 2]| ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64);
    let lookup: std::collections::HashMap<_, usize> =
        pos.iter().enumerate().map(|(i, &p)| (key(p), i)).collect();
    let rotate =
        |q: usize| lookup[&key([2.0 * centre[0] - pos[q][0], 2.0 * centre[1] - pos[q][1]])];
    let pairs = |layer: usize| -> HashSet<(usize, usize)> {
        layout
            .cnot_layer(layer)
            .iter()
            .map(|g| (g.control.min(g.target), g.control.max(g.target)))
            .collect()
    };
    for (a, b) in [(0, 3), (1, 2)] {
        let rotated: HashSet<(usize, usize)> = pairs(a)
            .into_iter()
            .map(|(i, j)| {
                let (ri, rj) = (rotate(i), rotate(j));
                (ri.min(rj), ri.max(rj))
            })
            .collect();
        assert_eq!(rotated, pairs(b), "layers {a} and {b}");
    }
}

#[test]
fn published_crystal_parameters() {
    let m = yb171_mass();
    let wx = two_pi_mhz(3.0);
    assert!((epsilon_parameter(m, wx, 5e-6) / 0.0183 - 1.0).abs() < 0.01);
    assert!((epsilon_parameter(m, wx, 8e-6) / 0.0045 - 1.0).abs() < 0.02);
    let c = crystal(triangular_positions(1, 2, 5e-6));
    let eta = lamb_dicke(&c, &[wx])[0];
    assert!((eta / 0.111 - 1.0).abs() < 0.01, "eta {eta}");
}

#[test]
fn sound_radius_separates_regimes() {
    let m = yb171_mass();
    let wx = two_pi_mhz(3.0);
    let slow = sound_propagation_radius(epsilon_parameter(m, wx, 5e-6), wx, 5e-6, 500e-6);
    let fast = sound_propagation_radius(epsilon_parameter(m, wx, 8e-6), wx, 8e-6, 100e-6);
    assert!(
        slow / 5e-6 > 50.0,
        "slow regime reaches {} sites",
        slow / 5e-6
    );
    assert!(fast / 8e-6 < slow / 5e-6 / 10.0);
}
