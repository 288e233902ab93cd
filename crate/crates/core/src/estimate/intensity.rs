//! Intensity-difference noise figures and multiparameter transmittance bounds.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Two-mode probes for intensity-difference sensing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DifferentialProbe {
    /// `|N, N>`.
    TwinFock { n: f64 },
    /// Gain `G`; `alpha2` is the seed intensity entering the printed NRF (0 for a vacuum seed).
    Tmsv { gain: f64, alpha2: f64 },
    /// Bright-seed limit of the squeezed displaced state.
    Tmsd { gain: f64, alpha2: f64 },
    /// `|α>|α>` with `|α|² = N`.
    ProductCoherent { n: f64 },
}

impl DifferentialProbe {
    pub fn label(&self) -> &'static str {
        match self {
            DifferentialProbe::TwinFock { .. } => "tf",
            DifferentialProbe::Tmsv { .. } => "tmsv",
            DifferentialProbe::Tmsd { .. } => "tmsd",
            DifferentialProbe::ProductCoherent { .. } => "pc",
        }
    }

    /// Per-mode input mean, Mandel Q and input NRF for symmetric probes.
    fn symmetric_inputs(&self) -> Option<(f64, f64, f64)> {
        match *self {
            DifferentialProbe::TwinFock { n } => Some((n, -1.0, 0.0)),
            DifferentialProbe::Tmsv { gain, .. } => {
                let n = gain - 1.0;
                Some((n, n, 0.0))
            }
            DifferentialProbe::ProductCoherent { n } => Some((n, 0.0, 1.0)),
            DifferentialProbe::Tmsd { .. } => None,
        }
    }
}

/// Transmittances of the differential scheme: object `T` and channel efficiencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentialChannels {
    pub t: f64,
    pub eta_a: f64,
    pub eta_b: f64,
}

/// Why an SNR figure is unavailable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnrUnavailable {
    /// The closed form assumes equal input means and variances in both modes.
    AsymmetricProbe,
    /// `T η_a = η_b`: the difference signal vanishes.
    ZeroSignal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentialFigures {
    pub sigma_out: f64,
    pub snr: std::result::Result<f64, SnrUnavailable>,
    pub r_snr: std::result::Result<f64, SnrUnavailable>,
}

fn check_unit(op: &'static str, name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::domain(op, format!("{name} = {v} outside (0, 1]")));
    }
    Ok(())
}

/// Output NRF, SNR and SNR ratio against product coherent light.
pub fn differential_intensity_figures(
    probe: DifferentialProbe,
    ch: DifferentialChannels,
) -> Result<DifferentialFigures> {
    const OP: &str = "differential_intensity_figures";
    check_unit(OP, "T", ch.t)?;
    check_unit(OP, "eta_a", ch.eta_a)?;
    check_unit(OP, "eta_b", ch.eta_b)?;
    let a = ch.t * ch.eta_a;
    let b = ch.eta_b;
    let sigma_out = match probe {
        DifferentialProbe::TwinFock { n } => {
            if !(n > 0.0) {
                return Err(Error::domain(OP, "N must be > 0"));
            }
            1.0 - (a * a + b * b) / (a + b)
        }
        DifferentialProbe::Tmsv { gain, alpha2 } => {
            if !(gain >= 1.0) || !(alpha2 >= 0.0) {
                return Err(Error::domain(OP, "need G >= 1 and |alpha|^2 >= 0"));
            }
            1.0 + (gain * alpha2 * (a - b).powi(2) - (a * a + b * b)) / (a + b)
        }
        DifferentialProbe::Tmsd { gain, alpha2 } => {
            if !(gain >= 1.0) || !(alpha2 > 0.0) {
                return Err(Error::domain(OP, "need G >= 1 and |alpha|^2 > 0"));
            }
            1.0 + 2.0 * (gain - 1.0) * (gain * (a - b).powi(2) - b * b)
                / (gain * a + (gain - 1.0) * b)
        }
        DifferentialProbe::ProductCoherent { n } => {
            if !(n > 0.0) {
                return Err(Error::domain(OP, "N must be > 0"));
            }
            1.0
        }
    };
    let Some((n, q, sigma_in)) = probe.symmetric_inputs() else {
        return Ok(DifferentialFigures {
            sigma_out,
            snr: Err(SnrUnavailable::AsymmetricProbe),
            r_snr: Err(SnrUnavailable::AsymmetricProbe),
        });
    };
    let noise = (a - b).powi(2) * q + 2.0 * a * b * (sigma_in - 1.0) + (a + b);
    let r_snr = if noise > 0.0 {
        Ok(((a + b) / noise).sqrt())
    } else {
        Err(SnrUnavailable::ZeroSignal)
    };
    let snr = if a == b || !(n > 0.0) || !(noise > 0.0) {
        Err(SnrUnavailable::ZeroSignal)
    } else {
        Ok((b - a).abs() * n / (n * noise).sqrt())
    };
    Ok(DifferentialFigures { sigma_out, snr, r_snr })
}

/// Symmetric positive semidefinite information matrix with parameter labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Qfim {
    pub matrix: DMatrix<f64>,
    pub labels: Vec<String>,
}

impl Qfim {
    pub fn new(matrix: DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        const OP: &str = "Qfim";
        let n = matrix.nrows();
        if matrix.ncols() != n || labels.len() != n || n == 0 {
            return Err(Error::domain(OP, "matrix must be square with one label per parameter"));
        }
        let scale = matrix.abs().max().max(1.0);
        if (&matrix - matrix.transpose()).abs().max() > 1e-10 * scale {
            return Err(Error::domain(OP, "matrix is not symmetric"));
        }
        let min = matrix.clone().symmetric_eigenvalues().min();
        if min < -1e-10 * scale {
            return Err(Error::domain(OP, format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix, labels })
    }

    /// Moore-Penrose inverse on the support (eigenvalues above `1e-10 * max`).
    pub fn pseudo_inverse(&self) -> DMatrix<f64> {
        let eig = self.matrix.clone().symmetric_eigen();
        let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let cut = 1e-10 * max;
        let inv = eig.eigenvalues.map(|l| if l > cut { 1.0 / l } else { 0.0 });
        &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose()
    }
}

/// One transmissive channel of a multiparameter intensity problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmittanceChannel {
    pub t: f64,
    pub eta: f64,
    pub n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiProbe {
    /// Optimal entangled-ancilla probe.
    Quantum,
    ProductCoherent,
}

/// Diagonal QFIM for estimating all channel transmittances simultaneously.
pub fn qfim_transmittances(channels: &[TransmittanceChannel], probe: MultiProbe) -> Result<Qfim> {
    const OP: &str = "multiparam_bounds";
    if channels.is_empty() {
        return Err(Error::domain(OP, "need at least one channel"));
    }
    let mut diag = Vec::with_capacity(channels.len());
    for (k, c) in channels.iter().enumerate() {
        if c.t <= 0.0 || c.t >= 1.0 {
            return Err(Error::Boundary {
                op: OP,
                msg: format!("T_{} = {} must lie strictly inside (0, 1)", k + 1, c.t),
            });
        }
        if !(c.eta > 0.0 && c.eta <= 1.0) || !(c.n > 0.0) {
            return Err(Error::domain(OP, format!("channel {} needs eta in (0, 1] and N > 0", k + 1)));
        }
        diag.push(match probe {
            MultiProbe::Quantum => c.eta * c.n / (c.t * (1.0 - c.eta * c.t)),
            MultiProbe::ProductCoherent => c.eta * c.n / c.t,
        });
    }
    let labels = (1..=channels.len()).map(|k| format!("T{k}")).collect();
    Qfim::new(DMatrix::from_diagonal(&DVector::from_vec(diag)), labels)
}

/// Lower bound `nᵀ H⁺ n / ν` on the variance of the linear combination `n·x`.
pub fn projected_variance(qfim: &Qfim, n: &[f64], nu: f64) -> Result<f64> {
    const OP: &str = "multiparam_bounds";
    if n.len() != qfim.matrix.nrows() {
        return Err(Error::domain(OP, "projection vector has the wrong length"));
    }
    if n.iter().all(|&x| x == 0.0) {
        return Err(Error::domain(OP, "projection vector must be non-zero"));
    }
    if !(nu >= 1.0) {
        return Err(Error::domain(OP, "nu must be >= 1"));
    }
    let v = DVector::from_column_slice(n);
    Ok((v.transpose() * qfim.pseudo_inverse() * &v)[0] / nu)
}

#[derive(Debug, Clone, PartialEq)]
pub enum MultiparamBound {
    Qfim(Qfim),
    Variance(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MultiparamKind {
    QfimTransmittances,
    ProjectedVariance { n: Vec<f64>, nu: f64 },
}

pub fn multiparam_bounds(
    kind: &MultiparamKind,
    channels: &[TransmittanceChannel],
    probe: MultiProbe,
) -> Result<MultiparamBound> {
    let qfim = qfim_transmittances(channels, probe)?;
    match kind {
        MultiparamKind::QfimTransmittances => Ok(MultiparamBound::Qfim(qfim)),
        MultiparamKind::ProjectedVariance { n, nu } => {
            projected_variance(&qfim, n, *nu).map(MultiparamBound::Variance)
        }
    }
}
