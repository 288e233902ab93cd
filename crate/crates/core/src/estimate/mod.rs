//! Fisher information, quantum Fisher information and closed-form precision bounds.
//!
//! Bounds are standard deviations: `1/√(νF)` for a measurement with Fisher information
//! `F` repeated `ν` times.

mod catalog;
mod fisher;
mod gaussian;
mod intensity;

pub use catalog::{
    bound_catalog, catalog_names, catalog_parameters, noon_coincidence, BoundParams,
    BoundResult, NoonCoincidence,
};
pub use fisher::{
    fisher_information, qfi_fock, qfi_mixed, qfi_pure, FisherInformation, OutcomeModel,
    PROBABILITY_FLOOR,
};
pub use gaussian::{
    gaussian_fidelity, gaussian_qfi, homodyne_fisher, optimal_homodyne, HomodyneOptimum,
    QfiEstimate, DEFAULT_STEP,
};
pub use intensity::{
    differential_intensity_figures, multiparam_bounds, projected_variance, qfim_transmittances,
    DifferentialChannels, DifferentialFigures, DifferentialProbe, MultiProbe, MultiparamBound,
    MultiparamKind, Qfim, SnrUnavailable, TransmittanceChannel,
};

/// Cramér-Rao standard deviation `1/√(ν F)`; infinite for `F = 0`.
pub fn cramer_rao(fisher: f64, nu: f64) -> f64 {
    1.0 / (nu * fisher).sqrt()
}
