//! Parallel-gate pulse design: sequential null-space (EASE) design for
//! arbitrary target graphs, equal-amplitude single-pair design with
//! boundary rescaling, and crosstalk evaluation under sampled noise.

mod crosstalk;
mod ease;

pub use crosstalk::{
    fit_power_law, sample_noisy_crosstalk, CrosstalkReport, DistanceBin, NoiseSpec, PairCrosstalk,
    PowerLawFit,
};
pub use ease::{
    default_detuning, design_parallel_layer, design_residuals, design_single_pair,
    design_transplanted_layer, displacement_constraints, ease_design, null_space, rabi_stats,
    rescale_for_boundary, transplant, EaseOptions, GateTargets, PulseDesign, TransplantedLayer,
};
