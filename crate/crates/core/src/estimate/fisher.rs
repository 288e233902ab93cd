//! Classical Fisher information of discrete outcome models and QFI of Fock-space families.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{binomial_pmf, ln_factorial, richardson_derivative};
use crate::states::{FockData, FockState};

/// Outcome probabilities below this are excluded from the Fisher sum.
pub const PROBABILITY_FLOOR: f64 = 1e-15;
const NORMALISATION_TOL: f64 = 1e-9;
const NORM_DRIFT_TOL: f64 = 1e-8;
const SLD_CUTOFF: f64 = 1e-12;

type Distribution = dyn Fn(f64) -> Result<Vec<f64>> + Send + Sync;

/// Discrete measurement statistics `p(y | x)` over a fixed outcome set.
pub struct OutcomeModel {
    outcomes: usize,
    domain: (f64, f64),
    distribution: Box<Distribution>,
}

impl std::fmt::Debug for OutcomeModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OutcomeModel")
            .field("outcomes", &self.outcomes)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl OutcomeModel {
    /// `distribution(x)` must return `outcomes` probabilities for every `x` in `domain`.
    pub fn new(
        outcomes: usize,
        domain: (f64, f64),
        distribution: impl Fn(f64) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Result<Self> {
        if outcomes == 0 || !(domain.1 > domain.0) {
            return Err(Error::domain("OutcomeModel", "need outcomes and a non-empty domain"));
        }
        Ok(Self { outcomes, domain, distribution: Box::new(distribution) })
    }

    /// Photon counts of a Fock probe with `n` photons sent through transmittance `eta * T`;
    /// parameter `T`.
    pub fn binomial_intensity(n: usize, eta: f64) -> Result<Self> {
        check_efficiency(eta)?;
        Self::new(n + 1, (0.0, 1.0), move |t| Ok(binomial_pmf(n, eta * t)))
    }

    /// Photon counts of a coherent probe with mean `n` through `eta * T`; parameter `T`.
    /// The count space is cut where the Poisson tail drops below the probability floor.
    pub fn poisson_intensity(n: f64, eta: f64) -> Result<Self> {
        check_efficiency(eta)?;
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::domain("OutcomeModel", "mean photon number must be > 0"));
        }
        let top = n * eta;
        let kmax = (top + 12.0 * top.sqrt() + 40.0).ceil() as usize;
        Self::new(kmax + 1, (0.0, 1.0), move |t| {
            let mu = n * eta * t;
            Ok((0..=kmax)
                .map(|k| {
                    if mu == 0.0 {
                        return if k == 0 { 1.0 } else { 0.0 };
                    }
                    (k as f64 * mu.ln() - mu - ln_factorial(k)).exp()
                })
                .collect())
        })
    }

    /// Joint photon counting on a state family, flattened on the fixed grid `dims`.
    pub fn photon_counting(
        dims: [usize; 2],
        domain: (f64, f64),
        family: impl Fn(f64) -> Result<FockState> + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(dims[0] * dims[1], domain, move |x| {
            let s = family(x)?;
            let d = s.dims();
            if d[0] > dims[0] || d[1] > dims[1] {
                return Err(Error::domain(
                    "OutcomeModel",
                    format!("state dimensions {d:?} exceed the outcome grid {dims:?}"),
                ));
            }
            Ok(s.padded(if s.modes() == 1 { [dims[0], 1] } else { dims })?.joint_distribution())
        })
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Probabilities at `x`, checked for shape and normalisation.
    pub fn probabilities(&self, x: f64) -> Result<Vec<f64>> {
        const OP: &str = "fisher_information";
        let p = (self.distribution)(x)?;
        if p.len() != self.outcomes {
            return Err(Error::Model {
                op: OP,
                msg: format!("expected {} outcomes, got {}", self.outcomes, p.len()),
            });
        }
        if p.iter().any(|&v| !(v >= -1e-15) || !v.is_finite()) {
            return Err(Error::Model { op: OP, msg: format!("negative probability at x = {x}") });
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > NORMALISATION_TOL {
            return Err(Error::Model {
                op: OP,
                msg: format!("probabilities sum to {total} at x = {x}"),
            });
        }
        Ok(p)
    }
}

fn check_efficiency(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::domain("OutcomeModel", format!("eta = {eta} outside (0, 1]")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherInformation {
    pub value: f64,
    /// Probability carried by outcomes skipped for falling below the floor.
    pub dropped_mass: f64,
}

fn check_stencil(op: &'static str, domain: (f64, f64), x: f64, step: f64) -> Result<()> {
    if !(step > 0.0) {
        return Err(Error::domain(op, "step must be > 0"));
    }
    if !(x - step >= domain.0 && x + step <= domain.1) {
        return Err(Error::domain(
            op,
            format!("stencil [{}, {}] leaves the domain {domain:?}", x - step, x + step),
        ));
    }
    Ok(())
}

/// `Σ_y (∂_x p)² / p` with Richardson-extrapolated central differences.
pub fn fisher_information(model: &OutcomeModel, x: f64, step: f64) -> Result<FisherInformation> {
    check_stencil("fisher_information", model.domain, x, step)?;
    let p = model.probabilities(x)?;
    let dp = richardson_derivative(|y| model.probabilities(y), x, step)?;
    let mut value = 0.0;
    let mut dropped_mass = 0.0;
    for (&pi, &di) in p.iter().zip(&dp) {
        if pi < PROBABILITY_FLOOR {
            dropped_mass += pi.max(0.0);
        } else {
            value += di * di / pi;
        }
    }
    Ok(FisherInformation { value, dropped_mass })
}

/// Common dimensions of a set of states.
fn common_dims(states: &[&FockState]) -> [usize; 2] {
    let mut d = [0, 0];
    for s in states {
        d[0] = d[0].max(s.dims()[0]);
        d[1] = d[1].max(s.dims()[1]);
    }
    d
}

fn padded_amplitudes(s: &FockState, dims: [usize; 2]) -> Result<Vec<Complex64>> {
    let dims = if s.modes() == 1 { [dims[0], 1] } else { dims };
    match s.padded(dims)?.data() {
        FockData::Pure(a) => Ok(a.clone()),
        _ => Err(Error::domain("qfi_pure", "family returned a mixed state")),
    }
}

/// `H = 4 [<∂ψ|∂ψ> - |<ψ|∂ψ>|²]` for a family of pure states.
pub fn qfi_pure(
    family: impl Fn(f64) -> Result<FockState>,
    x: f64,
    step: f64,
) -> Result<f64> {
    const OP: &str = "qfi_pure";
    if !(step > 0.0) {
        return Err(Error::domain(OP, "step must be > 0"));
    }
    let stencil: Vec<f64> = [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|k| x + k * step).collect();
    let states = stencil.iter().map(|&y| family(y)).collect::<Result<Vec<_>>>()?;
    if states.iter().any(|s| s.modes() != states[0].modes()) {
        return Err(Error::Differentiation { op: OP, msg: "mode count changes across the stencil".into() });
    }
    let dims = common_dims(&states.iter().collect::<Vec<_>>());
    let amps = states.iter().map(|s| padded_amplitudes(s, dims)).collect::<Result<Vec<_>>>()?;
    for (y, a) in stencil.iter().zip(&amps) {
        let norm: f64 = a.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_DRIFT_TOL {
            return Err(Error::Differentiation {
                op: OP,
                msg: format!("norm {norm} at x = {y} drifts beyond tolerance"),
            });
        }
    }
    let lookup = |y: f64| -> Result<Vec<Complex64>> {
        let i = stencil.iter().position(|&s| s == y).expect("stencil point");
        Ok(amps[i].clone())
    };
    let d = richardson_derivative(lookup, x, step)?;
    let psi = &amps[2];
    let dd: f64 = d.iter().map(|c| c.norm_sqr()).sum();
    let overlap: Complex64 = psi.iter().zip(&d).map(|(p, q)| p.conj() * q).sum();
    Ok((4.0 * (dd - overlap.norm_sqr())).max(0.0))
}

fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    (m - m.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Spectral SLD formula `Σ 2 |<m|∂ρ|n>|² / (p_n + p_m)` over pairs with `p_n + p_m ≥ 1e-12`.
pub fn qfi_mixed(
    family: impl Fn(f64) -> Result<DMatrix<Complex64>>,
    x: f64,
    step: f64,
) -> Result<f64> {
    const OP: &str = "qfi_mixed";
    if !(step > 0.0) {
        return Err(Error::domain(OP, "step must be > 0"));
    }
    let rho = family(x)?;
    let n = rho.nrows();
    if rho.ncols() != n {
        return Err(Error::domain(OP, "density matrix must be square"));
    }
    if hermitian_defect(&rho) > 1e-10 {
        return Err(Error::domain(OP, "density matrix is not Hermitian"));
    }
    let flat = |y: f64| -> Result<Vec<Complex64>> {
        let m = family(y)?;
        if m.shape() != (n, n) {
            return Err(Error::Differentiation { op: OP, msg: "dimension changes across the stencil".into() });
        }
        if hermitian_defect(&m) > 1e-10 {
            return Err(Error::domain(OP, "density matrix is not Hermitian"));
        }
        Ok(m.as_slice().to_vec())
    };
    let d = DMatrix::from_column_slice(n, n, &richardson_derivative(flat, x, step)?);
    let eig = rho.symmetric_eigen();
    let u = &eig.eigenvectors;
    let dm = u.adjoint() * d * u;
    let p = &eig.eigenvalues;
    let mut h = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s = p[i] + p[j];
            if s >= SLD_CUTOFF {
                h += 2.0 * dm[(i, j)].norm_sqr() / s;
            }
        }
    }
    Ok(h)
}

/// QFI of a Fock-state family, dispatching on purity.
pub fn qfi_fock(family: impl Fn(f64) -> Result<FockState>, x: f64, step: f64) -> Result<f64> {
    const OP: &str = "qfi_fock";
    let stencil = [x - step, x - 0.5 * step, x, x + 0.5 * step, x + step];
    let states = stencil.iter().map(|&y| family(y)).collect::<Result<Vec<_>>>()?;
    let dims = common_dims(&states.iter().collect::<Vec<_>>());
    let pick = |y: f64| -> Result<FockState> {
        let i = stencil.iter().position(|&s| s == y).ok_or_else(|| Error::Differentiation {
            op: OP,
            msg: "evaluation outside the stencil".into(),
        })?;
        let s = &states[i];
        s.padded(if s.modes() == 1 { [dims[0], 1] } else { dims })
    };
    if states.iter().all(|s| s.is_pure()) {
        qfi_pure(pick, x, step)
    } else {
        qfi_mixed(|y| pick(y).map(|s| s.density_matrix()), x, step)
    }
}
