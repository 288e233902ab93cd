//! Prism / metal film / analyte reflectance and resonance search.

use num_complex::Complex64;

use super::material::{MaterialModel, Sellmeier};
use crate::error::{Error, Result};
use crate::numeric::golden_min;

/// Three-layer Kretschmann stack.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    pub prism_permittivity: f64,
    /// Optional prism dispersion; when set it replaces `prism_permittivity`
    /// for wavelength-dependent queries.
    pub prism_dispersion: Option<Sellmeier>,
    pub metal: MaterialModel,
    pub metal_thickness_nm: f64,
    pub analyte_permittivity: f64,
}

impl LayerStack {
    pub fn new(
        prism_permittivity: f64,
        metal: MaterialModel,
        metal_thickness_nm: f64,
        analyte_permittivity: f64,
    ) -> Result<Self> {
        let stack = Self {
            prism_permittivity,
            prism_dispersion: None,
            metal,
            metal_thickness_nm,
            analyte_permittivity,
        };
        stack.validate()?;
        Ok(stack)
    }

    pub fn with_prism_dispersion(mut self, sellmeier: Sellmeier, wavelength_nm: f64) -> Self {
        self.prism_permittivity = sellmeier.index(wavelength_nm).powi(2);
        self.prism_dispersion = Some(sellmeier);
        self
    }

    pub fn validate(&self) -> Result<()> {
        const OP: &str = "LayerStack";
        if !(self.prism_permittivity > 1.0) {
            return Err(Error::domain(OP, "prism permittivity must be > 1"));
        }
        if !(self.analyte_permittivity >= 1.0) {
            return Err(Error::domain(OP, "analyte permittivity must be >= 1"));
        }
        if !(self.prism_permittivity > self.analyte_permittivity) {
            return Err(Error::domain(
                OP,
                format!(
                    "prism permittivity {} must exceed analyte permittivity {} for evanescent coupling",
                    self.prism_permittivity, self.analyte_permittivity
                ),
            ));
        }
        if !(self.metal_thickness_nm > 0.0) || !self.metal_thickness_nm.is_finite() {
            return Err(Error::domain(OP, "metal thickness must be > 0"));
        }
        Ok(())
    }

    pub fn prism_permittivity_at(&self, wavelength_nm: f64) -> f64 {
        match self.prism_dispersion {
            Some(s) => s.index(wavelength_nm).powi(2),
            None => self.prism_permittivity,
        }
    }

    pub fn with_analyte_index(&self, n_a: f64) -> Self {
        Self { analyte_permittivity: n_a * n_a, ..self.clone() }
    }

    /// Critical angle of the bare prism/analyte interface, degrees.
    pub fn critical_angle_deg(&self, wavelength_nm: f64) -> f64 {
        (self.analyte_permittivity / self.prism_permittivity_at(wavelength_nm))
            .sqrt()
            .asin()
            .to_degrees()
    }
}

/// Complex amplitude and power reflectance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    pub r: Complex64,
    pub reflectance: f64,
    /// Set when the film propagation factor had to be clamped.
    pub clamped: bool,
}

/// Square root with Re >= 0, and Im >= 0 when Re == 0.
pub fn branch_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.re < 0.0 || (s.re == 0.0 && s.im < 0.0) {
        -s
    } else {
        s
    }
}

/// Normal wavenumber in layer `u` normalised by `k0`.
fn normal_k(eps_u: Complex64, eps1_sin2: f64) -> Complex64 {
    branch_sqrt(eps_u - eps1_sin2)
}

fn interface_r(ku: Complex64, eu: Complex64, kv: Complex64, ev: Complex64) -> Complex64 {
    let a = ku / eu;
    let b = kv / ev;
    (a - b) / (a + b)
}

const MAX_LOG_GROWTH: f64 = 700.0;

/// p-polarised reflection of a film `eps2` of thickness `d_nm` between half spaces
/// `eps1` (incidence) and `eps3`.
pub fn three_layer_reflection(
    theta_rad: f64,
    wavelength_nm: f64,
    eps1: f64,
    eps2: Complex64,
    eps3: Complex64,
    d_nm: f64,
) -> Reflection {
    let k0 = 2.0 * std::f64::consts::PI / wavelength_nm;
    let s2 = eps1 * theta_rad.sin().powi(2);
    let e1 = Complex64::new(eps1, 0.0);
    let k1 = normal_k(e1, s2);
    let k2 = normal_k(eps2, s2);
    let k3 = normal_k(eps3, s2);
    let r12 = interface_r(k1, e1, k2, eps2);
    let r23 = interface_r(k2, eps2, k3, eps3);
    let mut phase = Complex64::new(0.0, 2.0) * k2 * k0 * d_nm;
    let mut clamped = false;
    if phase.re > MAX_LOG_GROWTH {
        phase.re = MAX_LOG_GROWTH;
        clamped = true;
    }
    let e = phase.exp();
    let r = (e * r23 + r12) / (e * r23 * r12 + 1.0);
    Reflection { r, reflectance: r.norm_sqr(), clamped }
}

/// Reflectance of the stack at incidence angle `theta_deg` and wavelength `wavelength_nm`.
pub fn kretschmann_reflectance(
    theta_deg: f64,
    wavelength_nm: f64,
    stack: &LayerStack,
) -> Result<Reflection> {
    const OP: &str = "kretschmann_reflectance";
    if !(0.0..90.0).contains(&theta_deg) {
        return Err(Error::domain(OP, format!("theta = {theta_deg} deg outside [0, 90)")));
    }
    if !(wavelength_nm > 0.0) {
        return Err(Error::domain(OP, "wavelength must be > 0"));
    }
    let eps_m = stack.metal.permittivity_at_wavelength(wavelength_nm)?;
    Ok(three_layer_reflection(
        theta_deg.to_radians(),
        wavelength_nm,
        stack.prism_permittivity_at(wavelength_nm),
        eps_m,
        Complex64::new(stack.analyte_permittivity, 0.0),
        stack.metal_thickness_nm,
    ))
}

/// Which variable the resonance search scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResonanceMode {
    /// Scan angle (degrees) at a fixed wavelength.
    Angular { wavelength_nm: f64 },
    /// Scan wavelength (nm) at a fixed angle.
    Spectral { theta_deg: f64 },
}

/// Closed interval scanned on a uniform coarse grid before refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchWindow {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl SearchWindow {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi, points: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    /// Degrees (angular mode) or nm (spectral mode).
    pub location: f64,
    pub r_min: f64,
}

const DIP_PROMINENCE: f64 = 1e-4;
const SEARCH_TOL: f64 = 1e-6;

/// Indices of interior local minima whose prominence exceeds `DIP_PROMINENCE`.
fn dip_candidates(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut prefix_max = vec![f64::NEG_INFINITY; n];
    let mut suffix_max = vec![f64::NEG_INFINITY; n];
    for i in 0..n {
        prefix_max[i] = if i == 0 { values[0] } else { prefix_max[i - 1].max(values[i]) };
    }
    for i in (0..n).rev() {
        suffix_max[i] = if i == n - 1 { values[i] } else { suffix_max[i + 1].max(values[i]) };
    }
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if values[i] < values[i - 1] {
            // walk across flat bottoms
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] > values[i] {
                let prominence = prefix_max[i].min(suffix_max[j]) - values[i];
                if prominence > DIP_PROMINENCE {
                    out.push(i);
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Locates the single reflectance minimum inside `window`.
pub fn find_resonance(
    stack: &LayerStack,
    mode: ResonanceMode,
    window: SearchWindow,
) -> Result<Resonance> {
    const OP: &str = "find_resonance";
    if window.points < 3 || !(window.hi > window.lo) {
        return Err(Error::domain(OP, "window needs hi > lo and at least 3 points"));
    }
    let eval = |x: f64| -> Result<f64> {
        let r = match mode {
            ResonanceMode::Angular { wavelength_nm } => {
                kretschmann_reflectance(x, wavelength_nm, stack)?
            }
            ResonanceMode::Spectral { theta_deg } => kretschmann_reflectance(theta_deg, x, stack)?,
        };
        Ok(r.reflectance)
    };
    let step = (window.hi - window.lo) / (window.points - 1) as f64;
    let grid: Vec<f64> = (0..window.points).map(|i| window.lo + step * i as f64).collect();
    let values = grid.iter().map(|&x| eval(x)).collect::<Result<Vec<_>>>()?;
    let candidates = dip_candidates(&values);
    if candidates.len() != 1 {
        return Err(Error::Ambiguity {
            op: OP,
            candidates: candidates.iter().map(|&i| grid[i]).collect(),
        });
    }
    let i = candidates[0];
    let f = |x: f64| eval(x).unwrap_or(f64::INFINITY);
    let x = golden_min(f, grid[i - 1], grid[i + 1], SEARCH_TOL);
    Ok(Resonance { location: x, r_min: eval(x)? })
}

/// Resonance angle in degrees from the phase-matching condition
/// `n_p sin(theta) = sqrt(n_a^2 eps' / (n_a^2 + eps'))`.
pub fn resonance_angle_closed_form(n_p: f64, n_a: f64, eps_real: f64) -> Result<f64> {
    const OP: &str = "resonance_angle_closed_form";
    let na2 = n_a * n_a;
    let denom = na2 + eps_real;
    if denom == 0.0 {
        return Err(Error::Pole { op: OP, detail: format!("eps' = -n_a^2 = {eps_real}") });
    }
    let k2 = na2 * eps_real / denom;
    if !(k2 > 0.0) {
        return Err(Error::domain(OP, "no bound surface mode for this permittivity"));
    }
    let s = k2.sqrt() / n_p;
    if s >= 1.0 {
        return Err(Error::domain(OP, "surface mode not phase-matchable through the prism"));
    }
    Ok(s.asin().to_degrees())
}
