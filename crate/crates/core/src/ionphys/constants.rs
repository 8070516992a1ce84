//! CODATA 2018 values.

pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// `e^2 / (4 pi eps0)` in J m.
pub fn coulomb_constant() -> f64 {
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY)
}

/// 171Yb+ taken as 171 u.
pub fn yb171_mass() -> f64 {
    171.0 * ATOMIC_MASS_UNIT
}

/// Counter-propagating 355 nm Raman beams.
pub fn raman_wavevector_355nm() -> f64 {
    4.0 * std::f64::consts::PI / 355e-9
}

pub fn two_pi_mhz(f: f64) -> f64 {
    2.0 * std::f64::consts::PI * f * 1e6
}
