//! Surface-code memory experiments under parallel-gate crosstalk, and the
//! trapped-ion pulse physics that produces that crosstalk.
//!
//! The QEC half builds a rotated surface code ([`code`]), annotates its
//! syndrome-extraction circuit with gate, idle and crosstalk channels
//! ([`noise`]), samples it with a Pauli-frame simulator ([`sim`]) and decodes
//! with exact minimum-weight perfect matching ([`decode`]).
//!
//! The ion half computes transverse normal modes of a 2D crystal and the
//! closed-form gate integrals ([`ionphys`]), designs parallel amplitude
//! modulated pulses and samples their crosstalk under control noise
//! ([`pulse`]). [`scaling`] ties the two together with the analytic
//! logical-error bound.

pub mod circuit;
pub mod code;
pub mod decode;
pub mod error;
pub mod ionphys;
pub mod noise;
pub mod pauli;
pub mod pulse;
pub mod scaling;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
