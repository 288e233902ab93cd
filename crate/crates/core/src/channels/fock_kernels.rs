//! Number-basis implementations of the channels.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{binomial_pmf, ln_factorial};
use crate::states::{FockData, FockState};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const NEGLIGIBLE: f64 = 1e-30;
const TAIL_MASS: f64 = 1e-24;

fn resource(op: &'static str, need: usize, cap: usize) -> Error {
    Error::Resource {
        op,
        msg: format!("output needs cutoff {need}, above the hard limit of {cap} photons per mode"),
    }
}

/// Branches lighter than this are dropped after a Kraus step.
const BRANCH_FLOOR: f64 = 1e-18;
/// Largest ensemble (branches x basis states) a loss step may produce.
const MAX_ENSEMBLE: usize = 50_000_000;

/// Binomial thinning of one mode. Number-diagonal inputs stay diagonal; coherent
/// superpositions become a mixture of Kraus branches `K_k |ψ>`.
pub(crate) fn loss(state: &FockState, eta: f64, mode: usize) -> Result<FockState> {
    const OP: &str = "apply_loss";
    let [da, db] = state.dims();
    let rows: Vec<Vec<f64>> = (0..state.dims()[mode]).map(|n| binomial_pmf(n, eta)).collect();
    let data = match state.data() {
        FockData::Diagonal(p) => {
            let mut out = vec![0.0; da * db];
            for n in 0..da {
                for m in 0..db {
                    let w = p[n * db + m];
                    if w == 0.0 {
                        continue;
                    }
                    if mode == 0 {
                        for (k, b) in rows[n].iter().enumerate() {
                            out[k * db + m] += w * b;
                        }
                    } else {
                        for (k, b) in rows[m].iter().enumerate() {
                            out[n * db + k] += w * b;
                        }
                    }
                }
            }
            FockData::Diagonal(out)
        }
        _ => {
            let input = state.branches();
            let lost = state.dims()[mode];
            if input.len() * lost * da * db > MAX_ENSEMBLE {
                return Err(Error::Resource {
                    op: OP,
                    msg: format!("mixed state with {} branches is too large to thin", input.len() * lost),
                });
            }
            let mut out = Vec::new();
            for v in &input {
                for k in 0..lost {
                    let mut w = vec![ZERO; da * db];
                    for n in 0..da {
                        for m in 0..db {
                            let c = v[n * db + m];
                            let have = if mode == 0 { n } else { m };
                            if c == ZERO || have < k {
                                continue;
                            }
                            let amp = rows[have][have - k].sqrt();
                            let j = if mode == 0 { (n - k) * db + m } else { n * db + m - k };
                            w[j] += c * amp;
                        }
                    }
                    if w.iter().map(|c| c.norm_sqr()).sum::<f64>() > BRANCH_FLOOR {
                        out.push(w);
                    }
                }
            }
            diagonal_if_possible(out)
        }
    };
    Ok(FockState::from_truncated(state.modes(), [da, db], data)?.inherit(state))
}

/// Mixtures of single basis states are stored as a distribution.
fn diagonal_if_possible(branches: Vec<Vec<Complex64>>) -> FockData {
    let basis = branches.iter().all(|v| v.iter().filter(|c| **c != ZERO).count() <= 1);
    if !basis {
        return FockData::Ensemble(branches);
    }
    let mut p = vec![0.0; branches[0].len()];
    for v in &branches {
        p.iter_mut().zip(v).for_each(|(x, c)| *x += c.norm_sqr());
    }
    FockData::Diagonal(p)
}

/// `exp(i Σ_k phases_k n_k)`; number-diagonal states are unchanged.
pub(crate) fn phase(state: &FockState, phases: [f64; 2]) -> Result<FockState> {
    let [_, db] = state.dims();
    let rotate = |a: &[Complex64]| -> Vec<Complex64> {
        a.iter()
            .enumerate()
            .map(|(i, &c)| {
                let (n, m) = (i / db, i % db);
                c * Complex64::from_polar(1.0, phases[0] * n as f64 + phases[1] * m as f64)
            })
            .collect()
    };
    let data = match state.data() {
        FockData::Diagonal(_) => return Ok(state.clone()),
        FockData::Pure(a) => FockData::Pure(rotate(a)),
        FockData::Ensemble(b) => FockData::Ensemble(b.iter().map(|v| rotate(v)).collect()),
    };
    Ok(FockState::from_truncated(state.modes(), state.dims(), data)?.inherit(state))
}

/// Splitter matrix on the sector with `n` photons in total, basis `|k, n-k>`.
///
/// The splitter is `exp(β (e^{iθ} a†b - e^{-iθ} b†a))` with `cos β = √T`. A diagonal
/// phase gauge turns the generator into `i β J` with `J` real symmetric tridiagonal,
/// which is diagonalised once per sector.
fn sector_unitary(n: usize, beta: f64, omega: Complex64) -> DMatrix<Complex64> {
    let dim = n + 1;
    let mut j = DMatrix::<f64>::zeros(dim, dim);
    for k in 0..n {
        let x = (((k + 1) * (n - k)) as f64).sqrt();
        j[(k + 1, k)] = x;
        j[(k, k + 1)] = x;
    }
    let eig = j.symmetric_eigen();
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phase = eig.eigenvalues.map(|l| Complex64::from_polar(1.0, beta * l));
    let core = &v * DMatrix::from_diagonal(&phase) * v.transpose();
    let pow: Vec<Complex64> = (0..dim).map(|k| omega.powu(k as u32)).collect();
    DMatrix::from_fn(dim, dim, |r, c| pow[r] * core[(r, c)] * pow[c].conj())
}

pub(crate) fn beam_splitter(
    state: &FockState,
    transmittance: f64,
    theta: f64,
    cap: usize,
) -> Result<FockState> {
    const OP: &str = "apply_beam_splitter";
    let [da, db] = state.dims();
    // drop total-number sectors whose combined tail mass is below TAIL_MASS
    let total = state.total_number_distribution();
    let mut tail = 0.0;
    let mut top = total.len() - 1;
    while top > 0 && tail + total[top] < TAIL_MASS {
        tail += total[top];
        top -= 1;
    }
    // one spare layer so the outermost kept layer is empty
    let d = top + 2;
    if d - 1 > cap {
        return Err(resource(OP, d - 1, cap));
    }
    let beta = transmittance.sqrt().acos();
    let omega = Complex64::from_polar(1.0, theta - std::f64::consts::FRAC_PI_2);
    let sectors: Vec<DMatrix<Complex64>> = (0..=top).map(|n| sector_unitary(n, beta, omega)).collect();
    // input index range of sector `n`: photons in mode a from lo to hi
    let range = |n: usize| (n.saturating_sub(db - 1), n.min(da - 1));
    let transform = |a: &[Complex64]| -> Vec<Complex64> {
        let mut out = vec![ZERO; d * d];
        for (n, u) in sectors.iter().enumerate() {
            let (lo, hi) = range(n);
            if lo > hi {
                continue;
            }
            for i in lo..=hi {
                let c = a[i * db + n - i];
                if c == ZERO {
                    continue;
                }
                for k in 0..=n {
                    out[k * d + n - k] += u[(k, i)] * c;
                }
            }
        }
        out
    };
    let out = match state.data() {
        FockData::Pure(a) => FockData::Pure(transform(a)),
        FockData::Ensemble(b) => FockData::Ensemble(b.iter().map(|v| transform(v)).collect()),
        FockData::Diagonal(p) => {
            let mut out = vec![0.0; d * d];
            for (n, u) in sectors.iter().enumerate() {
                let (lo, hi) = range(n);
                for i in lo..=hi {
                    let w = p[i * db + n - i];
                    if w == 0.0 {
                        continue;
                    }
                    for k in 0..=n {
                        out[k * d + n - k] += w * u[(k, i)].norm_sqr();
                    }
                }
            }
            FockData::Diagonal(out)
        }
    };
    Ok(FockState::from_truncated(2, [d, d], out)?.inherit(state))
}

/// Two-mode squeezing through the normal-ordered factorisation
/// `exp(-t a†b†) (cosh r)^-(n_a+n_b+1) exp(t* a b)` with `t = e^{iθ} tanh r`.
pub(crate) fn squeeze(state: &FockState, r: f64, theta: f64, cap: usize) -> Result<FockState> {
    if state.modes() != 2 {
        return Err(Error::domain("apply_two_mode_squeezer", "two-mode state required"));
    }
    if state.is_pure() {
        return squeeze_pure(state, r, theta, cap);
    }
    // mixed input: squeeze each branch and pad to a common cutoff
    let mut parts = Vec::new();
    for v in state.branches() {
        let w: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let branch = FockState::from_truncated(2, state.dims(), FockData::Pure(v))?;
        parts.push((w.sqrt(), squeeze_pure(&branch, r, theta, cap)?));
    }
    let d = parts.iter().map(|(_, s)| s.dims()[0]).max().unwrap_or(1);
    let mut out = Vec::with_capacity(parts.len());
    let mut leak: f64 = 0.0;
    for (scale, s) in &parts {
        leak = leak.max(s.leakage());
        let padded = s.padded([d, d])?;
        out.push(padded.amplitudes().expect("pure branch").iter().map(|c| c * scale).collect());
    }
    let result = FockState::from_truncated(2, [d, d], FockData::Ensemble(out))?.inherit(state);
    Ok(result.with_leakage(leak))
}

fn squeeze_pure(state: &FockState, r: f64, theta: f64, cap: usize) -> Result<FockState> {
    const OP: &str = "apply_two_mode_squeezer";
    let FockData::Pure(a) = state.data() else { unreachable!("pure input") };
    if r == 0.0 {
        return Ok(state.clone());
    }
    let [da, db] = state.dims();
    let t = Complex64::from_polar(r.tanh(), theta);
    let ln_tanh = r.tanh().ln();
    let ln_cosh = r.cosh().ln();

    // lowering stage, then the diagonal factor
    let mut lowered = vec![ZERO; da * db];
    for n in 0..da {
        for m in 0..db {
            let c = a[n * db + m];
            if c.norm_sqr() <= NEGLIGIBLE {
                continue;
            }
            for k in 0..=n.min(m) {
                let lm = k as f64 * ln_tanh - ln_factorial(k)
                    + 0.5 * (ln_factorial(n) - ln_factorial(n - k) + ln_factorial(m) - ln_factorial(m - k));
                let coef = Complex64::from_polar(lm.exp(), -(k as f64) * theta);
                lowered[(n - k) * db + (m - k)] += coef * c;
            }
        }
    }
    for n in 0..da {
        for m in 0..db {
            lowered[n * db + m] *= (-((n + m + 1) as f64) * ln_cosh).exp();
        }
    }

    let s2 = r.sinh().powi(2);
    let mean_est = state.marginal(0).iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>()
        .max(state.marginal(1).iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>());
    let g = r.cosh().powi(2);
    let est = g * mean_est + s2 * (mean_est + 1.0);
    let mut dim = ((est + 8.0 * (est * (est + 1.0)).sqrt()).ceil() as usize + 2).max(da.max(db) + 2)
        .min(cap + 1);
    let neg_t = -t;
    loop {
        let mut out = vec![ZERO; dim * dim];
        for p in 0..da.min(dim) {
            for q in 0..db.min(dim) {
                let c = lowered[p * db + q];
                if c.norm_sqr() <= NEGLIGIBLE * 1e-10 {
                    continue;
                }
                let jmax = (dim - 1 - p).min(dim - 1 - q);
                for j in 0..=jmax {
                    let lm = j as f64 * ln_tanh - ln_factorial(j)
                        + 0.5
                            * (ln_factorial(p + j) - ln_factorial(p) + ln_factorial(q + j)
                                - ln_factorial(q));
                    let coef = Complex64::from_polar(lm.exp(), j as f64 * neg_t.arg());
                    out[(p + j) * dim + (q + j)] += coef * c;
                }
            }
        }
        let norm: f64 = out.iter().map(|c| c.norm_sqr()).sum();
        let edge: f64 = (0..dim)
            .map(|i| out[(dim - 1) * dim + i].norm_sqr() + out[i * dim + (dim - 1)].norm_sqr())
            .sum();
        if 1.0 - norm < 1e-13 && edge < 1e-17 {
            return Ok(FockState::from_truncated(2, [dim, dim], FockData::Pure(out))?.inherit(state));
        }
        if dim - 1 == cap {
            return Err(resource(OP, dim, cap));
        }
        dim = ((dim as f64 * 1.3).ceil() as usize).min(cap + 1);
    }
}
