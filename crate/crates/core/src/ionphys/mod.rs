//! Ion-crystal physics: triangular-lattice embedding, transverse normal
//! modes, Lamb–Dicke factors, and closed-form gate integrals for piecewise
//! constant amplitude-modulated pulses.
//!
//! Units are SI throughout (m, kg, s, rad/s).

pub mod constants;
pub mod integrals;
pub mod lattice;
pub mod modes;
pub mod sequence;

pub use integrals::{
    alpha_integrals, gate_infidelity, segment_displacement, segment_displacement_dmu,
    segment_self_phase, theta_integrals, SegmentKernel,
};
pub use lattice::{embed_layout, sound_propagation_radius, triangular_positions};
pub use modes::{epsilon_parameter, lamb_dicke, transverse_modes, IonCrystal, ModeData};
pub use sequence::PulseSequence;
