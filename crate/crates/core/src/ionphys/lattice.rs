use crate::code::CodeLayout;
use crate::noise::lattice_position;

/// Triangular lattice, rows `a sqrt(3)/2` apart with odd rows shifted by `a/2`.
pub fn triangular_positions(rows: usize, cols: usize, a: f64) -> Vec<[f64; 2]> {
    let dy = a * 3f64.sqrt() / 2.0;
    (0..rows)
        .flat_map(|r| {
            let shift = if r % 2 == 1 { a / 2.0 } else { 0.0 };
            (0..cols).map(move |c| [c as f64 * a + shift, r as f64 * dy])
        })
        .collect()
}

/// Physical position of every code qubit; CNOT partners are nearest neighbours.
pub fn embed_layout(layout: &CodeLayout, a: f64) -> Vec<[f64; 2]> {
    (0..layout.num_qubits())
        .map(|q| {
            let p = lattice_position(layout, q);
            [p[0] * a, p[1] * a]
        })
        .collect()
}

/// Distance a transverse-phonon wavepacket spreads in time `tau`, using the
/// group velocity scale `eps * omega_x * a`.
pub fn sound_propagation_radius(epsilon: f64, omega_x: f64, a: f64, tau: f64) -> f64 {
    epsilon * omega_x * a * tau
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_neighbour_distance_is_a() {
        let a = 5e-6;
        let pos = triangular_positions(4, 5, a);
        let mut min = f64::INFINITY;
        for i in 0..pos.len() {
            for j in 0..i {
                min = min.min((pos[i][0] - pos[j][0]).hypot(pos[i][1] - pos[j][1]));
            }
        }
        assert!((min - a).abs() < 1e-18);
        let two = triangular_positions(1, 2, a);
        assert!(((two[1][0] - two[0][0]) - a).abs() < 1e-18);
    }
}
