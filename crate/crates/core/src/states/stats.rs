use nalgebra::Matrix2;

use super::{FockState, GaussianState, State};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStats {
    pub mean: f64,
    pub variance: f64,
    pub mandel_q: f64,
    /// Mean photon number is zero; `mandel_q` is set to 0 by convention.
    pub vacuum: bool,
}

impl PhotonStats {
    fn from_moments(mean: f64, variance: f64) -> Self {
        let variance = variance.max(0.0);
        if mean.abs() < 1e-14 {
            return Self { mean: 0.0, variance, mandel_q: 0.0, vacuum: true };
        }
        Self { mean, variance, mandel_q: variance / mean - 1.0, vacuum: false }
    }
}

/// Mean, variance and covariance of the two photon numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumberMoments {
    pub mean: [f64; 2],
    pub variance: [f64; 2],
    pub covariance: f64,
}

fn check_mode(state: &State, mode: usize) -> Result<()> {
    if mode >= state.modes() {
        return Err(Error::domain(
            "photon_statistics",
            format!("mode {mode} out of range for a {}-mode state", state.modes()),
        ));
    }
    Ok(())
}

fn moments_of(p: &[f64]) -> (f64, f64) {
    let mean: f64 = p.iter().enumerate().map(|(n, &x)| n as f64 * x).sum();
    let var: f64 = p.iter().enumerate().map(|(n, &x)| (n as f64 - mean).powi(2) * x).sum();
    (mean, var)
}

fn fock_moments(s: &FockState) -> NumberMoments {
    let [da, db] = s.dims();
    let p = s.joint_distribution();
    let (ma, va) = moments_of(&s.marginal(0));
    let (mb, vb) = if s.modes() == 2 { moments_of(&s.marginal(1)) } else { (0.0, 0.0) };
    let mut cov = 0.0;
    if s.modes() == 2 {
        for n in 0..da {
            for m in 0..db {
                cov += (n as f64 - ma) * (m as f64 - mb) * p[n * db + m];
            }
        }
    }
    NumberMoments { mean: [ma, mb], variance: [va, vb], covariance: cov }
}

/// Gaussian photon-number moments via Isserlis' theorem on the Wigner moments.
pub(crate) fn gaussian_moments(g: &GaussianState) -> NumberMoments {
    let block = |i: usize, j: usize| {
        Matrix2::new(
            g.v[(2 * i, 2 * j)],
            g.v[(2 * i, 2 * j + 1)],
            g.v[(2 * i + 1, 2 * j)],
            g.v[(2 * i + 1, 2 * j + 1)],
        )
    };
    let disp = |i: usize| nalgebra::Vector2::new(g.d[2 * i], g.d[2 * i + 1]);
    let mut out = NumberMoments { mean: [0.0; 2], variance: [0.0; 2], covariance: 0.0 };
    for i in 0..g.modes() {
        let (vi, di) = (block(i, i), disp(i));
        out.mean[i] = 0.5 * (vi.trace() + di.norm_squared()) - 0.5;
        out.variance[i] = 0.5 * (vi * vi).trace() + (di.transpose() * vi * di)[0] - 0.25;
    }
    if g.modes() == 2 {
        let (vab, vba) = (block(0, 1), block(1, 0));
        out.covariance = 0.5 * (vab * vba).trace() + (disp(0).transpose() * vab * disp(1))[0];
    }
    out
}

pub fn number_moments(state: &State) -> NumberMoments {
    match state {
        State::Fock(f) => fock_moments(f),
        State::Gaussian(g) => gaussian_moments(g),
    }
}

pub fn photon_statistics(state: &State, mode: usize) -> Result<PhotonStats> {
    check_mode(state, mode)?;
    if let State::Fock(f) = state {
        let total: f64 = f.joint_distribution().iter().sum();
        if !(total > 0.0) {
            return Err(Error::domain("photon_statistics", "zero-norm state"));
        }
    }
    let m = number_moments(state);
    Ok(PhotonStats::from_moments(m.mean[mode], m.variance[mode]))
}

/// Noise reduction factor `Var(n_b - n_a) / (<n_a> + <n_b>)`.
pub fn nrf(state: &State) -> Result<f64> {
    const OP: &str = "nrf";
    if state.modes() != 2 {
        return Err(Error::domain(OP, "two-mode state required"));
    }
    let m = number_moments(state);
    let total = m.mean[0] + m.mean[1];
    if !(total > 1e-14) {
        return Err(Error::Degenerate { op: OP, msg: "zero total mean photon number".into() });
    }
    let var = m.variance[0] + m.variance[1] - 2.0 * m.covariance;
    Ok(var.max(0.0) / total)
}
