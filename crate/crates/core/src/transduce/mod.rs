//! Plasmonic transducer physics.
//!
//! Time dependence `exp(-i w t)`, so absorbing media have `Im eps > 0`.
//! Angles are degrees at the API boundary, wavelengths nm, frequencies rad/s.

mod kretschmann;
mod material;
mod plasmon;
mod sensitivity;

pub use kretschmann::{
    branch_sqrt, find_resonance, kretschmann_reflectance, resonance_angle_closed_form,
    three_layer_reflection, LayerStack, Reflection, Resonance, ResonanceMode, SearchWindow,
};
pub use material::{Interpolation, MaterialModel, PermittivityTable, Sellmeier};
pub use plasmon::{
    lsp_cross_sections, lsp_resonance, spp_dispersion, surface_plasma_frequency, CrossSections,
    LspOrder, SppMode,
};
pub use sensitivity::{
    angular_pole, figures_of_merit, fom_star, sensitivity_closed_form, FigureOfMerit,
    SensitivityInputs, SensitivityKind, SpectrumTriplet,
};

use num_complex::Complex64;

use crate::error::Result;

/// m/s
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn wavelength_nm_to_omega(wavelength_nm: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)
}

pub fn omega_to_wavelength_nm(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / omega * 1e9
}

/// Metal permittivity at `omega`, preferring in-range table data when configured.
pub fn drude_permittivity(omega: f64, material: &MaterialModel) -> Result<Complex64> {
    material.permittivity(omega)
}

