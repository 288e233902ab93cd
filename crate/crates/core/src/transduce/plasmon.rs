//! Surface plasmon polaritons on a flat interface and localized modes of small particles.

use num_complex::Complex64;

use super::kretschmann::branch_sqrt;
use super::material::MaterialModel;
use super::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

/// Bound mode at a single metal/dielectric interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SppMode {
    /// 1/m
    pub k_parallel: Complex64,
    /// Decay constant into the dielectric, 1/m.
    pub kappa_d: Complex64,
    /// Decay constant into the metal, 1/m.
    pub kappa_m: Complex64,
}

impl SppMode {
    pub fn is_bound(&self) -> bool {
        self.k_parallel.re > 0.0
    }
}

/// SPP wavenumber and transverse decay constants at frequency `omega`.
pub fn spp_dispersion(omega: f64, eps_d: f64, material: &MaterialModel) -> Result<SppMode> {
    const OP: &str = "spp_dispersion";
    if !(eps_d > 0.0) {
        return Err(Error::domain(OP, "dielectric permittivity must be > 0"));
    }
    let eps_m = material.permittivity(omega)?;
    let sum = eps_m + eps_d;
    if sum == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole {
            op: OP,
            detail: format!("eps_m = -eps_d = {} (surface plasma resonance)", -eps_d),
        });
    }
    let k0 = omega / SPEED_OF_LIGHT;
    let k_parallel = branch_sqrt(eps_m * eps_d / sum) * k0;
    let kappa = |eps: Complex64| branch_sqrt(k_parallel * k_parallel - eps * k0 * k0);
    Ok(SppMode {
        k_parallel,
        kappa_d: kappa(Complex64::new(eps_d, 0.0)),
        kappa_m: kappa(eps_m),
    })
}

/// Asymptotic SPP frequency `wp / sqrt(1 + eps_d)`.
pub fn surface_plasma_frequency(material: &MaterialModel, eps_d: f64) -> f64 {
    material.plasma_frequency / (1.0 + eps_d).sqrt()
}

/// Multipole order of a localized resonance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LspOrder {
    Finite(u32),
    Infinite,
}

/// Resonance frequency of the `l`-th localized mode of a sphere in a Drude picture.
pub fn lsp_resonance(order: LspOrder, eps_d: f64, material: &MaterialModel) -> Result<f64> {
    let wp = material.plasma_frequency;
    match order {
        LspOrder::Infinite => Ok(wp / (1.0 + eps_d).sqrt()),
        LspOrder::Finite(0) => Err(Error::domain("lsp_resonance", "order l must be >= 1")),
        LspOrder::Finite(l) => {
            let l = l as f64;
            Ok(wp * (l / (eps_d * (l + 1.0) + l)).sqrt())
        }
    }
}

/// Quasi-static cross sections of a small particle of volume `volume_m3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSections {
    /// m²
    pub scattering: f64,
    /// m²
    pub absorption: f64,
}

pub fn lsp_cross_sections(
    omega: f64,
    eps_d: f64,
    material: &MaterialModel,
    volume_m3: f64,
) -> Result<CrossSections> {
    const OP: &str = "lsp_cross_sections";
    if !(eps_d > 0.0) || !(volume_m3 > 0.0) {
        return Err(Error::domain(OP, "eps_d and volume must be > 0"));
    }
    let eps = material.permittivity(omega)?;
    let (e1, e2) = (eps.re, eps.im);
    let c = SPEED_OF_LIGHT;
    let denom = (e1 + 2.0 * eps_d).powi(2) + e2 * e2;
    if denom == 0.0 {
        return Err(Error::Pole { op: OP, detail: format!("eps_m = -2 eps_d = {}", -2.0 * eps_d) });
    }
    let scattering = 2.0 * omega.powi(4) * eps_d * eps_d * volume_m3 * volume_m3 / c.powi(4)
        * ((e1 - eps_d).powi(2) + e2 * e2)
        / denom;
    let absorption = 9.0 * omega * eps_d.powf(1.5) * volume_m3 / c * e2 / denom;
    Ok(CrossSections { scattering, absorption })
}
