//! Fidelity-based QFI and homodyne Fisher information for Gaussian families.

use nalgebra::{DMatrix, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{golden_min, richardson};
use crate::states::{symplectic_form, GaussianState};

/// Default finite-difference step in parameter units.
pub const DEFAULT_STEP: f64 = 1e-4;
const PURITY_TOL: f64 = 1e-10;
const NO_INFORMATION: f64 = 1e-14;

fn two_mode(s: &GaussianState) -> GaussianState {
    s.embedded_two_mode()
}

fn is_pure(s: &GaussianState) -> bool {
    ((&s.v * 2.0).determinant() - 1.0).abs() < PURITY_TOL
}

fn complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Uhlmann fidelity (squared-overlap convention) of two one- or two-mode Gaussian states.
pub fn gaussian_fidelity(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    const OP: &str = "gaussian_fidelity";
    s1.check_physical()?;
    s2.check_physical()?;
    if s1.modes() != s2.modes() {
        return Err(Error::domain(OP, "states have different mode counts"));
    }
    let (a, b) = (two_mode(s1), two_mode(s2));
    let sum = &a.v + &b.v;
    let delta = sum.determinant();
    let inv = sum
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::domain(OP, "V1 + V2 is singular"))?;
    let dd = &b.d - &a.d;
    let gauss = (-0.5 * (dd.transpose() * inv * &dd)[0]).exp();
    // one pure argument reduces the fidelity to the overlap Tr(ρσ)
    if is_pure(&a) || is_pure(&b) {
        return Ok((gauss / delta.sqrt()).clamp(0.0, 1.0));
    }
    let omega = symplectic_form(2);
    let quarter = DMatrix::identity(4, 4) * 0.25;
    let gamma = 16.0 * (&omega * &a.v * &omega * &b.v - quarter).determinant();
    let half_omega = complex(&omega) * Complex64::new(0.0, 0.5);
    let la = (complex(&a.v) + &half_omega).determinant();
    let lb = (complex(&b.v) + &half_omega).determinant();
    let lambda = (la * lb * 16.0).re.max(0.0);
    let root = gamma.max(0.0).sqrt() + lambda.sqrt();
    let denom = root - (root * root - delta).max(0.0).sqrt();
    if !(denom > 0.0) {
        return Err(Error::domain(OP, "fidelity denominator is not positive"));
    }
    Ok((gauss / denom).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiEstimate {
    pub value: f64,
    /// Fidelity indistinguishable from 1 at both steps: the family carries no information.
    pub no_information: bool,
}

/// `H = 8 [1 - √F] / dx²` between states `dx` apart centred on `x`, Richardson-combined over
/// `dx` and `dx/2`.
pub fn gaussian_qfi(
    family: impl Fn(f64) -> Result<GaussianState>,
    x: f64,
    dx: f64,
) -> Result<QfiEstimate> {
    if !(dx > 0.0) {
        return Err(Error::domain("gaussian_qfi", "dx must be > 0"));
    }
    let at = |h: f64| -> Result<(f64, f64)> {
        let f = gaussian_fidelity(&family(x - 0.5 * h)?, &family(x + 0.5 * h)?)?;
        Ok((f, 8.0 * (1.0 - f.sqrt()) / (h * h)))
    };
    let (f1, coarse) = at(dx)?;
    let (f2, fine) = at(0.5 * dx)?;
    if f1 >= 1.0 - NO_INFORMATION && f2 >= 1.0 - NO_INFORMATION {
        return Ok(QfiEstimate { value: 0.0, no_information: true });
    }
    Ok(QfiEstimate { value: richardson(coarse, fine).max(0.0), no_information: false })
}

/// Mean and variance of `x_θ = cos θ x + sin θ p` on `mode`.
fn quadrature(s: &GaussianState, mode: usize, angle: f64) -> (f64, f64) {
    let (d, v) = s.mode(mode);
    let u = Vector2::new(angle.cos(), angle.sin());
    (u.dot(&d), (u.transpose() * v * u)[0])
}

/// Fisher information of homodyne detection of `mode` at `angle` (radians).
pub fn homodyne_fisher(
    family: impl Fn(f64) -> Result<GaussianState>,
    x: f64,
    mode: usize,
    angle: f64,
) -> Result<f64> {
    const OP: &str = "homodyne_fisher";
    let h = DEFAULT_STEP;
    let eval = |y: f64| -> Result<(f64, f64)> {
        let s = family(y)?;
        if mode >= s.modes() {
            return Err(Error::domain(OP, format!("mode {mode} out of range")));
        }
        Ok(quadrature(&s, mode, angle))
    };
    let (_, var) = eval(x)?;
    if !(var > 1e-12) {
        return Err(Error::domain(OP, "measured quadrature has vanishing variance"));
    }
    let diff = |step: f64| -> Result<(f64, f64)> {
        let (hi, lo) = (eval(x + step)?, eval(x - step)?);
        Ok(((hi.0 - lo.0) / (2.0 * step), (hi.1 - lo.1) / (2.0 * step)))
    };
    let (c, f) = (diff(h)?, diff(0.5 * h)?);
    let dd = richardson(c.0, f.0);
    let dv = richardson(c.1, f.1);
    Ok(dd * dd / var + 0.5 * (dv / var).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneOptimum {
    pub angle: f64,
    pub fisher: f64,
}

/// Maximises the homodyne FI over the angle: 360-point grid on `[0, π)`, then golden section.
pub fn optimal_homodyne(
    family: impl Fn(f64) -> Result<GaussianState>,
    x: f64,
    mode: usize,
) -> Result<HomodyneOptimum> {
    const GRID: usize = 360;
    let step = std::f64::consts::PI / GRID as f64;
    let values = (0..GRID)
        .map(|i| homodyne_fisher(&family, x, mode, i as f64 * step))
        .collect::<Result<Vec<_>>>()?;
    let best = (0..GRID).max_by(|&i, &j| values[i].total_cmp(&values[j])).expect("non-empty grid");
    let centre = best as f64 * step;
    let neg = |a: f64| -homodyne_fisher(&family, x, mode, a).unwrap_or(0.0);
    let angle = golden_min(neg, centre - step, centre + step, 1e-10);
    let fisher = homodyne_fisher(&family, x, mode, angle)?;
    if fisher >= values[best] {
        Ok(HomodyneOptimum { angle: angle.rem_euclid(std::f64::consts::PI), fisher })
    } else {
        Ok(HomodyneOptimum { angle: centre, fisher: values[best] })
    }
}
