//! Closed-form sensitivities and figures of merit.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensitivityKind {
    /// deg/RIU
    Angular,
    /// nm/RIU
    Spectral,
}

/// Material and geometry derivatives feeding the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityInputs {
    pub n_a: f64,
    pub n_p: f64,
    pub eps_real: f64,
    /// d eps' / d lambda, 1/nm. Spectral kind only.
    pub deps_dlambda: f64,
    /// d n_p / d lambda, 1/nm. Spectral kind only.
    pub dnp_dlambda: f64,
}

/// Metal permittivity at which the angular closed form diverges.
pub fn angular_pole(n_a: f64, n_p: f64) -> f64 {
    let (na2, np2) = (n_a * n_a, n_p * n_p);
    np2 * na2 / (na2 - np2)
}

pub fn sensitivity_closed_form(kind: SensitivityKind, x: &SensitivityInputs) -> Result<f64> {
    const OP: &str = "sensitivity_closed_form";
    let e = x.eps_real;
    if !(e < 0.0) {
        return Err(Error::domain(OP, format!("eps' = {e} must be negative")));
    }
    let (na2, np2) = (x.n_a * x.n_a, x.n_p * x.n_p);
    match kind {
        SensitivityKind::Angular => {
            let arg = e * (na2 - np2) - np2 * na2;
            let pole = angular_pole(x.n_a, x.n_p);
            if arg == 0.0 || e + na2 == 0.0 {
                return Err(Error::Singularity { op: OP, detail: format!("eps' = {pole}") });
            }
            if arg < 0.0 {
                return Err(Error::domain(
                    OP,
                    format!("no angular resonance: eps' = {e} lies beyond the pole at {pole}"),
                ));
            }
            let rad = e * (-e).sqrt() / ((e + na2) * arg.sqrt());
            Ok(rad.abs().to_degrees())
        }
        SensitivityKind::Spectral => {
            let denom = 0.5 * x.n_a.powi(3) * x.deps_dlambda.abs()
                + (e + na2) * e * x.dnp_dlambda * x.n_a / x.n_p;
            if denom == 0.0 {
                return Err(Error::Singularity {
                    op: OP,
                    detail: "vanishing spectral denominator".into(),
                });
            }
            Ok((e * e / denom).abs())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FigureOfMerit {
    pub sensitivity: f64,
    pub linewidth: Option<f64>,
    pub fom: Option<f64>,
    pub fom_star: Option<f64>,
    pub lod: f64,
}

/// Intensity spectra at `n_a - dn`, `n_a` and `n_a + dn` on a shared wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTriplet {
    pub wavelengths_nm: Vec<f64>,
    pub lower: Vec<f64>,
    pub center: Vec<f64>,
    pub upper: Vec<f64>,
    pub delta_n: f64,
}

impl SpectrumTriplet {
    pub const DEFAULT_DELTA_N: f64 = 1e-5;

    /// Samples `intensity(lambda, n_a)` around `n_a`.
    pub fn sample(
        wavelengths_nm: Vec<f64>,
        n_a: f64,
        delta_n: f64,
        intensity: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let at = |n: f64| wavelengths_nm.iter().map(|&l| intensity(l, n)).collect::<Vec<_>>();
        Self {
            lower: at(n_a - delta_n),
            center: at(n_a),
            upper: at(n_a + delta_n),
            wavelengths_nm,
            delta_n,
        }
    }
}

/// Maximum over the grid of `|dI/dn_a| / I` and the wavelength where it occurs.
pub fn fom_star(spec: &SpectrumTriplet) -> Result<(f64, f64)> {
    const OP: &str = "figures_of_merit";
    let n = spec.wavelengths_nm.len();
    if n == 0 || spec.lower.len() != n || spec.center.len() != n || spec.upper.len() != n {
        return Err(Error::domain(OP, "spectra must share a non-empty wavelength grid"));
    }
    if !(spec.delta_n > 0.0) {
        return Err(Error::domain(OP, "delta_n must be > 0"));
    }
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for i in 0..n {
        let slope = (spec.upper[i] - spec.lower[i]).abs() / (2.0 * spec.delta_n);
        let value = if spec.center[i] == 0.0 {
            if slope == 0.0 {
                0.0
            } else {
                return Err(Error::Degenerate {
                    op: OP,
                    msg: format!("zero intensity at {} nm with non-zero slope", spec.wavelengths_nm[i]),
                });
            }
        } else {
            slope / spec.center[i].abs()
        };
        if value > best.0 {
            best = (value, spec.wavelengths_nm[i]);
        }
    }
    Ok(best)
}

/// LOD, FOM and (when a spectrum is supplied) FOM*.
pub fn figures_of_merit(
    sensitivity: f64,
    linewidth: Option<f64>,
    delta_y_min: f64,
    spectrum: Option<&SpectrumTriplet>,
) -> Result<FigureOfMerit> {
    const OP: &str = "figures_of_merit";
    if !(sensitivity > 0.0) {
        return Err(Error::domain(OP, "sensitivity must be > 0"));
    }
    if !(delta_y_min >= 0.0) {
        return Err(Error::domain(OP, "minimum resolvable change must be >= 0"));
    }
    let fom = match linewidth {
        Some(g) if !(g > 0.0) => return Err(Error::domain(OP, format!("linewidth {g} must be > 0"))),
        Some(g) => Some(sensitivity / g),
        None => None,
    };
    let fom_star = spectrum.map(fom_star).transpose()?.map(|(v, _)| v);
    Ok(FigureOfMerit { sensitivity, linewidth, fom, fom_star, lod: delta_y_min / sensitivity })
}
