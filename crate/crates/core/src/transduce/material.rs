//! Metal and prism material models.

use std::path::Path;

use num_complex::Complex64;

use super::{omega_to_wavelength_nm, wavelength_nm_to_omega};
use crate::error::{Error, Result};

/// How tabulated permittivity samples are interpolated in wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    #[default]
    Linear,
    /// Piecewise cubic Hermite with Fritsch-Carlson slopes (shape preserving).
    MonotoneCubic,
}

/// Complex permittivity sampled on a strictly increasing wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PermittivityTable {
    wavelengths_nm: Vec<f64>,
    values: Vec<Complex64>,
    pub interpolation: Interpolation,
}

impl PermittivityTable {
    pub fn new(
        wavelengths_nm: Vec<f64>,
        values: Vec<Complex64>,
        interpolation: Interpolation,
    ) -> Result<Self> {
        const OP: &str = "PermittivityTable::new";
        if wavelengths_nm.len() != values.len() {
            return Err(Error::domain(OP, "wavelength and value columns differ in length"));
        }
        if wavelengths_nm.len() < 2 {
            return Err(Error::domain(OP, "at least two samples are required"));
        }
        for (i, w) in wavelengths_nm.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::domain(
                    OP,
                    format!("wavelengths not strictly increasing at sample {}", i + 1),
                ));
            }
        }
        if wavelengths_nm.iter().any(|w| !w.is_finite() || *w <= 0.0)
            || values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::domain(OP, "non-finite or non-positive entries"));
        }
        Ok(Self { wavelengths_nm, values, interpolation })
    }

    /// Parses whitespace- or comma-separated columns `wavelength_nm eps_real eps_imag`.
    /// Lines starting with `#` and blank lines are skipped.
    pub fn parse(text: &str, interpolation: Interpolation) -> Result<Self> {
        const OP: &str = "PermittivityTable::parse";
        let mut wl = Vec::new();
        let mut vals = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 3 {
                return Err(Error::config(
                    OP,
                    format!("line {}: expected 3 columns, found {}", lineno + 1, cols.len()),
                ));
            }
            let mut nums = [0.0; 3];
            for (k, c) in cols.iter().enumerate() {
                nums[k] = c.parse().map_err(|_| {
                    Error::config(OP, format!("line {}: cannot parse `{c}`", lineno + 1))
                })?;
            }
            wl.push(nums[0]);
            vals.push(Complex64::new(nums[1], nums[2]));
        }
        Self::new(wl, vals, interpolation).map_err(|e| match e {
            Error::Domain { msg, .. } => Error::config(OP, msg),
            other => other,
        })
    }

    pub fn load(path: impl AsRef<Path>, interpolation: Interpolation) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config("PermittivityTable::load", format!("{}: {e}", path.display()))
        })?;
        Self::parse(&text, interpolation)
    }

    pub fn range_nm(&self) -> (f64, f64) {
        (self.wavelengths_nm[0], *self.wavelengths_nm.last().unwrap())
    }

    pub fn contains(&self, wavelength_nm: f64) -> bool {
        let (lo, hi) = self.range_nm();
        wavelength_nm >= lo && wavelength_nm <= hi
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.wavelengths_nm.iter().copied().zip(self.values.iter().copied())
    }

    /// Interpolated permittivity; `None` outside the tabulated range.
    pub fn at(&self, wavelength_nm: f64) -> Option<Complex64> {
        if !self.contains(wavelength_nm) {
            return None;
        }
        let xs = &self.wavelengths_nm;
        let i = match xs.partition_point(|&x| x <= wavelength_nm) {
            0 => 0,
            p if p >= xs.len() => xs.len() - 2,
            p => p - 1,
        };
        Some(match self.interpolation {
            Interpolation::Linear => {
                let t = (wavelength_nm - xs[i]) / (xs[i + 1] - xs[i]);
                self.values[i] * (1.0 - t) + self.values[i + 1] * t
            }
            Interpolation::MonotoneCubic => {
                let re: Vec<f64> = self.values.iter().map(|v| v.re).collect();
                let im: Vec<f64> = self.values.iter().map(|v| v.im).collect();
                Complex64::new(pchip(xs, &re, i, wavelength_nm), pchip(xs, &im, i, wavelength_nm))
            }
        })
    }
}

fn pchip_slope(xs: &[f64], ys: &[f64], k: usize) -> f64 {
    let n = xs.len();
    let secant = |j: usize| (ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j]);
    if k == 0 {
        return secant(0);
    }
    if k == n - 1 {
        return secant(n - 2);
    }
    let (d0, d1) = (secant(k - 1), secant(k));
    if d0 * d1 <= 0.0 {
        return 0.0;
    }
    let (h0, h1) = (xs[k] - xs[k - 1], xs[k + 1] - xs[k]);
    let (w1, w2) = (2.0 * h1 + h0, h1 + 2.0 * h0);
    (w1 + w2) / (w1 / d0 + w2 / d1)
}

fn pchip(xs: &[f64], ys: &[f64], i: usize, x: f64) -> f64 {
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    let (m0, m1) = (pchip_slope(xs, ys, i), pchip_slope(xs, ys, i + 1));
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * ys[i]
        + (t3 - 2.0 * t2 + t) * h * m0
        + (-2.0 * t3 + 3.0 * t2) * ys[i + 1]
        + (t3 - t2) * h * m1
}

/// Free-electron metal with optional tabulated data.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialModel {
    /// rad/s
    pub plasma_frequency: f64,
    /// rad/s
    pub damping: f64,
    pub table: Option<PermittivityTable>,
    /// When set, in-range queries use the table instead of the Drude formula.
    pub prefer_table: bool,
    /// Dispersionless permittivity overriding both the table and the Drude
    /// formula. Used for idealised metals in tests and limits.
    pub fixed: Option<Complex64>,
}

impl MaterialModel {
    pub fn drude(plasma_frequency: f64, damping: f64) -> Result<Self> {
        if !(plasma_frequency > 0.0) || !plasma_frequency.is_finite() {
            return Err(Error::domain("MaterialModel", "plasma_frequency must be > 0"));
        }
        if !(damping >= 0.0) || !damping.is_finite() {
            return Err(Error::domain("MaterialModel", "damping must be >= 0"));
        }
        Ok(Self { plasma_frequency, damping, table: None, prefer_table: true, fixed: None })
    }

    pub fn with_table(mut self, table: PermittivityTable) -> Self {
        self.table = Some(table);
        self
    }

    /// A metal with the same permittivity at every frequency.
    pub fn constant(eps: Complex64) -> Self {
        Self {
            plasma_frequency: 1.0,
            damping: 0.0,
            table: None,
            prefer_table: false,
            fixed: Some(eps),
        }
    }

    /// Bare Drude response `1 - wp^2 / (w^2 + i g w)`.
    pub fn drude_only(&self, omega: f64) -> Complex64 {
        let wp2 = self.plasma_frequency * self.plasma_frequency;
        Complex64::new(1.0, 0.0) - wp2 / Complex64::new(omega * omega, self.damping * omega)
    }

    /// Permittivity at angular frequency `omega` (rad/s).
    pub fn permittivity(&self, omega: f64) -> Result<Complex64> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::domain("drude_permittivity", format!("omega = {omega} must be > 0")));
        }
        if let Some(eps) = self.fixed {
            return Ok(eps);
        }
        if self.prefer_table {
            if let Some(eps) = self.table.as_ref().and_then(|t| t.at(omega_to_wavelength_nm(omega))) {
                return Ok(eps);
            }
        }
        Ok(self.drude_only(omega))
    }

    /// Permittivity at vacuum wavelength `wavelength_nm`.
    pub fn permittivity_at_wavelength(&self, wavelength_nm: f64) -> Result<Complex64> {
        if !(wavelength_nm > 0.0) || !wavelength_nm.is_finite() {
            return Err(Error::domain(
                "drude_permittivity",
                format!("wavelength = {wavelength_nm} nm must be > 0"),
            ));
        }
        if let Some(eps) = self.fixed {
            return Ok(eps);
        }
        if self.prefer_table {
            if let Some(eps) = self.table.as_ref().and_then(|t| t.at(wavelength_nm)) {
                return Ok(eps);
            }
        }
        Ok(self.drude_only(wavelength_nm_to_omega(wavelength_nm)))
    }

    /// Central-difference `d eps' / d lambda` in 1/nm.
    pub fn real_permittivity_slope(&self, wavelength_nm: f64, step_nm: f64) -> Result<f64> {
        let hi = self.permittivity_at_wavelength(wavelength_nm + step_nm)?.re;
        let lo = self.permittivity_at_wavelength(wavelength_nm - step_nm)?.re;
        Ok((hi - lo) / (2.0 * step_nm))
    }
}

/// Three-term Sellmeier dispersion, wavelengths in micrometres inside the formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sellmeier {
    pub b: [f64; 3],
    /// µm²
    pub c: [f64; 3],
}

impl Sellmeier {
    pub const SF14: Sellmeier = Sellmeier {
        b: [1.69182538, 0.285919934, 1.12595145],
        c: [0.0133151542, 0.0612647445, 121.836676],
    };

    pub const BK7: Sellmeier = Sellmeier {
        b: [1.03961212, 0.231792344, 1.01046945],
        c: [0.00600069867, 0.0200179144, 103.560653],
    };

    pub fn index(&self, wavelength_nm: f64) -> f64 {
        let x = (wavelength_nm * 1e-3).powi(2);
        let mut n2 = 1.0;
        for k in 0..3 {
            n2 += self.b[k] * x / (x - self.c[k]);
        }
        n2.sqrt()
    }

    /// `dn/d lambda` in 1/nm.
    pub fn index_slope(&self, wavelength_nm: f64) -> f64 {
        let x = (wavelength_nm * 1e-3).powi(2);
        let mut dn2_dx = 0.0;
        for k in 0..3 {
            dn2_dx += -self.b[k] * self.c[k] / (x - self.c[k]).powi(2);
        }
        let dx_dl = 2.0 * wavelength_nm * 1e-6;
        dn2_dx * dx_dl / (2.0 * self.index(wavelength_nm))
    }
}
