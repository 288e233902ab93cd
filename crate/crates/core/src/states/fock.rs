//! Truncated photon-number representation of one or two modes.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Layer mass above which a truncation warning is attached.
pub const LEAKAGE_WARN: f64 = 1e-8;
const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum FockData {
    /// Amplitudes `c[n * dim_b + m]`.
    Pure(Vec<Complex64>),
    /// Joint photon-number distribution, same layout.
    Diagonal(Vec<f64>),
    /// Mixture of unnormalised pure branches `ρ = Σ |v><v|`, same layout per branch.
    Ensemble(Vec<Vec<Complex64>>),
}

fn branch_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// Pure, number-diagonal or mixed state on `dims[0] x dims[1]` basis states.
/// Single-mode states use `dims[1] == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    dims: [usize; 2],
    data: FockData,
    leakage: f64,
}

impl FockState {
    fn checked(modes: usize, dims: [usize; 2], data: FockData) -> Result<Self> {
        const OP: &str = "FockState";
        let len = dims[0] * dims[1];
        let norm = match &data {
            FockData::Pure(a) if a.len() == len => a.iter().map(|c| c.norm_sqr()).sum::<f64>(),
            FockData::Diagonal(p) if p.len() == len => {
                if p.iter().any(|&x| x < -1e-15 || !x.is_finite()) {
                    return Err(Error::domain(OP, "negative or non-finite probability"));
                }
                p.iter().sum::<f64>()
            }
            FockData::Ensemble(b) if !b.is_empty() && b.iter().all(|v| v.len() == len) => {
                b.iter().map(|v| branch_norm(v)).sum::<f64>()
            }
            _ => return Err(Error::domain(OP, "data length does not match dimensions")),
        };
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(OP, format!("state norm {norm} differs from 1")));
        }
        let mut s = Self { modes, dims, data, leakage: 0.0 };
        s.leakage = s.cutoff_layer_mass();
        Ok(s)
    }

    fn normalised(modes: usize, dims: [usize; 2], mut data: FockData) -> Result<Self> {
        let norm = match &data {
            FockData::Pure(a) => a.iter().map(|c| c.norm_sqr()).sum::<f64>(),
            FockData::Diagonal(p) => p.iter().sum::<f64>(),
            FockData::Ensemble(b) => b.iter().map(|v| branch_norm(v)).sum::<f64>(),
        };
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain("FockState", "zero-norm state"));
        }
        match &mut data {
            FockData::Pure(a) => {
                let s = norm.sqrt();
                a.iter_mut().for_each(|c| *c /= s);
            }
            FockData::Diagonal(p) => p.iter_mut().for_each(|x| *x = x.max(0.0) / norm),
            FockData::Ensemble(b) => {
                let s = norm.sqrt();
                b.iter_mut().flatten().for_each(|c| *c /= s);
            }
        }
        Self::checked(modes, dims, data)
    }

    pub fn single_pure(amps: Vec<Complex64>) -> Result<Self> {
        let d = amps.len();
        Self::checked(1, [d, 1], FockData::Pure(amps))
    }

    pub fn single_diagonal(probs: Vec<f64>) -> Result<Self> {
        let d = probs.len();
        Self::checked(1, [d, 1], FockData::Diagonal(probs))
    }

    pub fn two_mode_pure(dims: [usize; 2], amps: Vec<Complex64>) -> Result<Self> {
        Self::checked(2, dims, FockData::Pure(amps))
    }

    pub fn two_mode_diagonal(dims: [usize; 2], probs: Vec<f64>) -> Result<Self> {
        Self::checked(2, dims, FockData::Diagonal(probs))
    }

    /// Renormalises after truncation; intended for freshly truncated data.
    pub(crate) fn from_truncated(modes: usize, dims: [usize; 2], data: FockData) -> Result<Self> {
        Self::normalised(modes, dims, data)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    /// Largest photon number kept for `mode`.
    pub fn cutoff(&self, mode: usize) -> usize {
        self.dims[mode] - 1
    }

    pub fn data(&self) -> &FockData {
        &self.data
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.data, FockData::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match &self.data {
            FockData::Pure(a) => Some(a),
            _ => None,
        }
    }

    /// Probability mass on the outermost kept layer of either mode.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn truncation_warning(&self) -> Option<String> {
        (self.leakage >= LEAKAGE_WARN).then(|| {
            format!(
                "cutoff layer holds probability {:.3e}; raise the cutoff for accurate moments",
                self.leakage
            )
        })
    }

    fn cutoff_layer_mass(&self) -> f64 {
        let p = self.joint_distribution();
        let [da, db] = self.dims;
        let mut mass = 0.0;
        for n in 0..da {
            for m in 0..db {
                let edge = n == da - 1 || (self.modes == 2 && m == db - 1);
                if edge {
                    mass += p[n * db + m];
                }
            }
        }
        mass
    }

    pub fn probability(&self, n: usize, m: usize) -> f64 {
        let [da, db] = self.dims;
        if n >= da || m >= db {
            return 0.0;
        }
        match &self.data {
            FockData::Pure(a) => a[n * db + m].norm_sqr(),
            FockData::Diagonal(p) => p[n * db + m],
            FockData::Ensemble(b) => b.iter().map(|v| v[n * db + m].norm_sqr()).sum(),
        }
    }

    /// `p(n, m)` flattened as `n * dim_b + m`.
    pub fn joint_distribution(&self) -> Vec<f64> {
        match &self.data {
            FockData::Pure(a) => a.iter().map(|c| c.norm_sqr()).collect(),
            FockData::Diagonal(p) => p.clone(),
            FockData::Ensemble(b) => {
                let mut p = vec![0.0; self.dims[0] * self.dims[1]];
                for v in b {
                    p.iter_mut().zip(v).for_each(|(x, c)| *x += c.norm_sqr());
                }
                p
            }
        }
    }

    pub fn marginal(&self, mode: usize) -> Vec<f64> {
        let [da, db] = self.dims;
        let p = self.joint_distribution();
        let mut out = vec![0.0; self.dims[mode]];
        for n in 0..da {
            for m in 0..db {
                out[if mode == 0 { n } else { m }] += p[n * db + m];
            }
        }
        out
    }

    /// Distribution of the total photon number `n + m`.
    pub fn total_number_distribution(&self) -> Vec<f64> {
        let [da, db] = self.dims;
        let p = self.joint_distribution();
        let mut out = vec![0.0; da + db - 1];
        for n in 0..da {
            for m in 0..db {
                out[n + m] += p[n * db + m];
            }
        }
        out
    }

    /// Joins two single-mode states into a product state.
    pub fn tensor(a: &FockState, b: &FockState) -> Result<FockState> {
        if a.modes != 1 || b.modes != 1 {
            return Err(Error::domain("FockState::tensor", "both factors must be single-mode"));
        }
        let dims = [a.dims[0], b.dims[0]];
        let data = match (&a.data, &b.data) {
            (FockData::Pure(x), FockData::Pure(y)) => {
                FockData::Pure(x.iter().flat_map(|&u| y.iter().map(move |&v| u * v)).collect())
            }
            (FockData::Diagonal(_), FockData::Diagonal(_)) => {
                let (x, y) = (a.joint_distribution(), b.joint_distribution());
                FockData::Diagonal(x.iter().flat_map(|&u| y.iter().map(move |&v| u * v)).collect())
            }
            _ => {
                let (x, y) = (a.branches(), b.branches());
                let mut out = Vec::with_capacity(x.len() * y.len());
                for u in &x {
                    for v in &y {
                        out.push(u.iter().flat_map(|&p| v.iter().map(move |&q| p * q)).collect());
                    }
                }
                FockData::Ensemble(out)
            }
        };
        Self::checked(2, dims, data)
    }

    /// Density matrix on the flattened basis. Size grows as `(da*db)^2`.
    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        let n = self.dims[0] * self.dims[1];
        match &self.data {
            FockData::Pure(a) => DMatrix::from_fn(n, n, |i, j| a[i] * a[j].conj()),
            FockData::Diagonal(p) => {
                DMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(p[i], 0.0) } else { Complex64::new(0.0, 0.0) })
            }
            FockData::Ensemble(b) => {
                let mut rho = DMatrix::zeros(n, n);
                for v in b {
                    let col = nalgebra::DVector::from_column_slice(v);
                    rho += &col * col.adjoint();
                }
                rho
            }
        }
    }

    /// Same state embedded in larger cutoffs (zero padded).
    pub fn padded(&self, dims: [usize; 2]) -> Result<FockState> {
        if dims[0] < self.dims[0] || dims[1] < self.dims[1] || (self.modes == 1 && dims[1] != 1) {
            return Err(Error::domain("FockState::padded", "target dimensions too small"));
        }
        let [da, db] = self.dims;
        let remap = |i: usize| (i / db) * dims[1] + (i % db);
        let pad = |a: &[Complex64]| {
            let mut v = vec![Complex64::new(0.0, 0.0); dims[0] * dims[1]];
            for (i, &c) in a.iter().enumerate().take(da * db) {
                v[remap(i)] = c;
            }
            v
        };
        let data = match &self.data {
            FockData::Pure(a) => FockData::Pure(pad(a)),
            FockData::Ensemble(b) => FockData::Ensemble(b.iter().map(|v| pad(v)).collect()),
            FockData::Diagonal(p) => {
                let mut v = vec![0.0; dims[0] * dims[1]];
                for (i, &x) in p.iter().enumerate() {
                    v[remap(i)] = x;
                }
                FockData::Diagonal(v)
            }
        };
        Self::checked(self.modes, dims, data)
    }

    /// Pure branches whose projectors sum to the density matrix.
    pub fn branches(&self) -> Vec<Vec<Complex64>> {
        match &self.data {
            FockData::Pure(a) => vec![a.clone()],
            FockData::Ensemble(b) => b.clone(),
            FockData::Diagonal(p) => {
                let len = p.len();
                p.iter()
                    .enumerate()
                    .filter(|(_, &x)| x > 0.0)
                    .map(|(i, &x)| {
                        let mut v = vec![Complex64::new(0.0, 0.0); len];
                        v[i] = Complex64::new(x.sqrt(), 0.0);
                        v
                    })
                    .collect()
            }
        }
    }

    pub(crate) fn with_leakage(mut self, leakage: f64) -> Self {
        self.leakage = self.leakage.max(leakage);
        self
    }

    /// Carries truncation leakage forward from the state this one was derived from.
    pub(crate) fn inherit(mut self, parent: &FockState) -> Self {
        self.leakage = self.leakage.max(parent.leakage);
        self
    }
}
