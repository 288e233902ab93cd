//! First and second moments of one or two bosonic modes.
//!
//! Quadratures are ordered `(x1, p1, x2, p2)` with `x = (a + a†)/√2`,
//! so vacuum has covariance `I/2`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const PHYSICALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub d: DVector<f64>,
    pub v: DMatrix<f64>,
}

/// Block-diagonal symplectic form for `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        o[(2 * k, 2 * k + 1)] = 1.0;
        o[(2 * k + 1, 2 * k)] = -1.0;
    }
    o
}

impl GaussianState {
    pub fn new(d: DVector<f64>, v: DMatrix<f64>) -> Result<Self> {
        const OP: &str = "GaussianState";
        let n = d.len();
        if n == 0 || n % 2 != 0 || n > 4 || v.shape() != (n, n) {
            return Err(Error::domain(OP, "expected 1 or 2 modes with matching covariance"));
        }
        let s = Self { d, v };
        s.check_physical()?;
        Ok(s)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self {
            d: DVector::zeros(2 * modes),
            v: DMatrix::identity(2 * modes, 2 * modes) * 0.5,
        }
    }

    pub fn coherent(alpha: Complex64) -> Self {
        let mut s = Self::vacuum(1);
        s.d[0] = std::f64::consts::SQRT_2 * alpha.re;
        s.d[1] = std::f64::consts::SQRT_2 * alpha.im;
        s
    }

    /// `exp[(ξ* a² - ξ a†²)/2]|0⟩` with `ξ = r e^{iθ}`.
    pub fn squeezed_vacuum(r: f64, theta: f64) -> Self {
        let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        let (ct, st) = (theta.cos(), theta.sin());
        let v = DMatrix::from_row_slice(2, 2, &[c - s * ct, -s * st, -s * st, c + s * ct]) * 0.5;
        Self { d: DVector::zeros(2), v }
    }

    pub fn modes(&self) -> usize {
        self.d.len() / 2
    }

    /// Verifies symmetry and `V + iΩ/2 ⪰ 0`.
    pub fn check_physical(&self) -> Result<()> {
        const OP: &str = "GaussianState";
        let n = self.d.len();
        let asym = (&self.v - self.v.transpose()).abs().max();
        if asym > 1e-10 * self.v.abs().max().max(1.0) {
            return Err(Error::domain(OP, "covariance matrix is not symmetric"));
        }
        if self.v.iter().chain(self.d.iter()).any(|x| !x.is_finite()) {
            return Err(Error::domain(OP, "non-finite moments"));
        }
        let omega = symplectic_form(n / 2);
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(self.v[(i, j)], 0.5 * omega[(i, j)]));
        let eig = m.symmetric_eigenvalues();
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -PHYSICALITY_TOL * self.v.abs().max().max(1.0) {
            return Err(Error::domain(
                OP,
                format!("covariance violates the uncertainty principle (min eigenvalue {min:.3e})"),
            ));
        }
        Ok(())
    }

    /// Marginal moments of one mode.
    pub fn mode(&self, k: usize) -> (nalgebra::Vector2<f64>, nalgebra::Matrix2<f64>) {
        let i = 2 * k;
        (
            nalgebra::Vector2::new(self.d[i], self.d[i + 1]),
            nalgebra::Matrix2::new(
                self.v[(i, i)],
                self.v[(i, i + 1)],
                self.v[(i + 1, i)],
                self.v[(i + 1, i + 1)],
            ),
        )
    }

    /// Tensor product of two single-mode states.
    pub fn tensor(a: &GaussianState, b: &GaussianState) -> Result<Self> {
        if a.modes() != 1 || b.modes() != 1 {
            return Err(Error::domain("GaussianState::tensor", "both factors must be single-mode"));
        }
        let d = DVector::from_iterator(4, a.d.iter().chain(b.d.iter()).copied());
        let mut v = DMatrix::zeros(4, 4);
        v.view_mut((0, 0), (2, 2)).copy_from(&a.v);
        v.view_mut((2, 2), (2, 2)).copy_from(&b.v);
        Ok(Self { d, v })
    }

    /// Applies a symplectic (or any linear) map `S` to both moments.
    pub fn transformed(&self, s: &DMatrix<f64>) -> Self {
        Self { d: s * &self.d, v: s * &self.v * s.transpose() }
    }

    /// Embeds into two modes with vacuum in the second.
    pub fn embedded_two_mode(&self) -> Self {
        if self.modes() == 2 {
            return self.clone();
        }
        GaussianState::tensor(self, &GaussianState::vacuum(1)).expect("single-mode input")
    }

    /// Purity `1 / (2^n sqrt(det V))`.
    pub fn purity(&self) -> f64 {
        let n = self.modes() as i32;
        1.0 / (2f64.powi(n) * self.v.determinant().sqrt())
    }
}
