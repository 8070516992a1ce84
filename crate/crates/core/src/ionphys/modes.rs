use nalgebra::{DMatrix, SymmetricEigen};

use super::constants::{coulomb_constant, HBAR};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct IonCrystal {
    pub positions: Vec<[f64; 2]>,
    pub mass: f64,
    pub omega_x: f64,
    pub delta_k: f64,
}

impl IonCrystal {
    pub fn new(positions: Vec<[f64; 2]>, mass: f64, omega_x: f64, delta_k: f64) -> Result<Self> {
        if !(mass > 0.0 && omega_x > 0.0 && delta_k > 0.0) {
            return Err(Error::invalid("mass, omega_x and delta_k must be positive"));
        }
        for i in 0..positions.len() {
            for j in 0..i {
                if positions[i] == positions[j] {
                    return Err(Error::invalid(format!("ions {j} and {i} coincide")));
                }
            }
        }
        Ok(IonCrystal {
            positions,
            mass,
            omega_x,
            delta_k,
        })
    }

    pub fn num_ions(&self) -> usize {
        self.positions.len()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (p, q) = (self.positions[i], self.positions[j]);
        (p[0] - q[0]).hypot(p[1] - q[1])
    }
}

/// Transverse normal modes, sorted by decreasing frequency (centre of mass first).
#[derive(Clone, Debug, PartialEq)]
pub struct ModeData {
    pub omega: Vec<f64>,
    /// `b[(j, k)]`: participation of ion `j` in mode `k`; columns orthonormal.
    pub b: DMatrix<f64>,
    pub eta: Vec<f64>,
    pub nbar: Vec<f64>,
}

impl ModeData {
    pub fn num_modes(&self) -> usize {
        self.omega.len()
    }
}

/// Transverse stiffness of the fixed lattice: off-diagonal Coulomb couplings
/// `t_jl`, diagonal `omega_x^2 - sum_l t_jl`.
pub fn stiffness_matrix(crystal: &IonCrystal) -> DMatrix<f64> {
    let n = crystal.num_ions();
    let c = coulomb_constant() / crystal.mass;
    let mut k = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut row = 0.0;
        for l in 0..n {
            if l != j {
                let t = c / crystal.distance(j, l).powi(3);
                k[(j, l)] = t;
                row += t;
            }
        }
        k[(j, j)] = crystal.omega_x * crystal.omega_x - row;
    }
    k
}

pub fn transverse_modes(crystal: &IonCrystal) -> Result<ModeData> {
    let n = crystal.num_ions();
    let eig = SymmetricEigen::new(stiffness_matrix(crystal));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut omega = Vec::with_capacity(n);
    let mut b = DMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[src];
        if lambda <= 0.0 {
            return Err(Error::Instability { eigenvalue: lambda });
        }
        omega.push(lambda.sqrt());
        let mut col = eig.eigenvectors.column(src).clone_owned();
        // fixed sign: largest-magnitude entry positive
        let imax = col.iamax();
        if col[imax] < 0.0 {
            col.neg_mut();
        }
        b.set_column(k, &col);
    }
    let eta = lamb_dicke(crystal, &omega);
    Ok(ModeData {
        omega,
        b,
        eta,
        nbar: vec![0.0; n],
    })
}

/// `eta_k = delta_k * sqrt(hbar / (2 m omega_k))`.
pub fn lamb_dicke(crystal: &IonCrystal, omega: &[f64]) -> Vec<f64> {
    omega
        .iter()
        .map(|&w| crystal.delta_k * (HBAR / (2.0 * crystal.mass * w)).sqrt())
        .collect()
}

/// Phonon-bandwidth parameter `e^2 / (4 pi eps0 m omega_x^2 a^3)`.
pub fn epsilon_parameter(mass: f64, omega_x: f64, a: f64) -> f64 {
    coulomb_constant() / (mass * omega_x * omega_x * a.powi(3))
}

#[cfg(test)]
mod tests {
    use super::super::constants::*;
    use super::*;

    fn two_ions(a: f64) -> IonCrystal {
        IonCrystal::new(
            vec![[0.0, 0.0], [a, 0.0]],
            yb171_mass(),
            two_pi_mhz(3.0),
            raman_wavevector_355nm(),
        )
        .unwrap()
    }

    #[test]
    fn two_ion_modes() {
        let a = 5e-6;
        let c = two_ions(a);
        let m = transverse_modes(&c).unwrap();
        let t = coulomb_constant() / (c.mass * a.powi(3));
        assert!((m.omega[0] / c.omega_x - 1.0).abs() < 1e-12);
        let rocking = (c.omega_x.powi(2) - 2.0 * t).sqrt();
        assert!((m.omega[1] / rocking - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constants_of_the_setup() {
        let m = yb171_mass();
        let w = two_pi_mhz(3.0);
        assert!((epsilon_parameter(m, w, 5e-6) - 0.0183).abs() < 5e-5);
        assert!((epsilon_parameter(m, w, 8e-6) - 0.0045).abs() < 5e-5);
        let ratio = epsilon_parameter(m, w, 5e-6) / epsilon_parameter(m, w, 10e-6);
        assert!((ratio - 8.0).abs() < 1e-12);
        let c = two_ions(5e-6);
        let eta = lamb_dicke(&c, &[w, 4.0 * w]);
        assert!((eta[0] - 0.111).abs() < 1e-3);
        assert!((eta[1] - eta[0] / 2.0).abs() < 1e-15);
    }

    #[test]
    fn unstable_crystal_is_rejected() {
        let c = IonCrystal::new(
            vec![[0.0, 0.0], [1e-7, 0.0]],
            yb171_mass(),
            two_pi_mhz(0.1),
            raman_wavevector_355nm(),
        )
        .unwrap();
        assert!(matches!(
            transverse_modes(&c),
            Err(Error::Instability { .. })
        ));
    }
}
