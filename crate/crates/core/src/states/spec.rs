use num_complex::Complex64;

use super::{FockData, FockState, GaussianState, State};
use crate::channels::{squeezer_symplectic, two_mode_squeeze};
use crate::error::{Error, Result};
use crate::numeric::ln_factorial;

/// Declarative description of a probe state.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Vacuum,
    Coherent { alpha: Complex64 },
    Fock { n: usize },
    TwinFock { n: usize },
    Noon { n: usize },
    SqueezedVacuum { r: f64, theta: f64 },
    Tmsv { r: f64, theta: f64 },
    /// Two-mode squeezer applied to `|alpha>|0>`.
    Tmsd { alpha: Complex64, r: f64, theta: f64 },
    /// Two single-mode specs side by side (modes a, b).
    Product(Box<StateSpec>, Box<StateSpec>),
}

impl StateSpec {
    pub fn product(a: StateSpec, b: StateSpec) -> Self {
        StateSpec::Product(Box::new(a), Box::new(b))
    }

    pub fn modes(&self) -> usize {
        match self {
            StateSpec::Vacuum
            | StateSpec::Coherent { .. }
            | StateSpec::Fock { .. }
            | StateSpec::SqueezedVacuum { .. } => 1,
            _ => 2,
        }
    }

    /// True when the spec contains a number state with no Gaussian form.
    pub fn is_number_state(&self) -> bool {
        match self {
            StateSpec::Fock { .. } | StateSpec::TwinFock { .. } | StateSpec::Noon { .. } => true,
            StateSpec::Product(a, b) => a.is_number_state() || b.is_number_state(),
            _ => false,
        }
    }

    /// Mean photon number of each mode (mode b is zero for single-mode specs).
    pub fn mean_photons(&self) -> [f64; 2] {
        match self {
            StateSpec::Vacuum => [0.0, 0.0],
            StateSpec::Coherent { alpha } => [alpha.norm_sqr(), 0.0],
            StateSpec::Fock { n } => [*n as f64, 0.0],
            StateSpec::TwinFock { n } => [*n as f64, *n as f64],
            StateSpec::Noon { n } => [*n as f64 / 2.0, *n as f64 / 2.0],
            StateSpec::SqueezedVacuum { r, .. } => [r.sinh().powi(2), 0.0],
            StateSpec::Tmsv { r, .. } => [r.sinh().powi(2); 2],
            StateSpec::Tmsd { alpha, r, .. } => {
                let (s2, c2, a2) = (r.sinh().powi(2), r.cosh().powi(2), alpha.norm_sqr());
                [s2 + a2 * c2, s2 + a2 * s2]
            }
            StateSpec::Product(a, b) => [a.mean_photons()[0], b.mean_photons()[0]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Fock,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockOptions {
    /// Largest photon number allowed per mode.
    pub hard_cap: usize,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self { hard_cap: 64 }
    }
}

/// Layer probability below which a distribution tail is considered exhausted.
const TAIL_EPS: f64 = 1e-17;

fn min_cutoff(mean: f64, var: f64) -> usize {
    (mean + 8.0 * var.max(0.0).sqrt()).ceil() as usize
}

/// Extends a single-mode amplitude sequence until the tail is exhausted.
fn grow(
    mean: f64,
    var: f64,
    cap: usize,
    what: &str,
    amp: impl Fn(usize) -> Complex64,
) -> Result<Vec<Complex64>> {
    let floor = min_cutoff(mean, var).max(1);
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        out.push(amp(k));
        let small = |j: usize| out.get(j).map_or(true, |c: &Complex64| c.norm_sqr() < TAIL_EPS);
        if k >= floor && k as f64 > mean && small(k) && (k == 0 || small(k - 1)) {
            return Ok(out);
        }
        if k >= cap {
            return Err(Error::Resource {
                op: "make_state",
                msg: format!("{what} needs a cutoff above the hard limit of {cap} photons per mode"),
            });
        }
        k += 1;
    }
}

fn coherent_amps(alpha: Complex64, cap: usize) -> Result<Vec<Complex64>> {
    let n = alpha.norm_sqr();
    let (mag, phase) = (alpha.norm(), alpha.arg());
    grow(n, n, cap, "coherent state", |k| {
        if mag == 0.0 {
            return if k == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        }
        let lm = -0.5 * n + k as f64 * mag.ln() - 0.5 * ln_factorial(k);
        Complex64::from_polar(lm.exp(), k as f64 * phase)
    })
}

fn squeezed_amps(r: f64, theta: f64, cap: usize) -> Result<Vec<Complex64>> {
    let s2 = r.sinh().powi(2);
    let var = 2.0 * s2 * (s2 + 1.0);
    let t = r.tanh();
    grow(s2, var, cap, "squeezed vacuum", |k| {
        if k % 2 == 1 {
            return Complex64::new(0.0, 0.0);
        }
        let j = k / 2;
        if t == 0.0 {
            return if j == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        }
        let lm = j as f64 * t.ln() + 0.5 * ln_factorial(2 * j)
            - j as f64 * 2f64.ln()
            - ln_factorial(j)
            - 0.5 * r.cosh().ln();
        // (-e^{iθ} tanh r)^j
        Complex64::from_polar(lm.exp(), j as f64 * (theta + std::f64::consts::PI))
    })
}

fn tmsv_amps(r: f64, theta: f64, cap: usize) -> Result<Vec<Complex64>> {
    let s2 = r.sinh().powi(2);
    let t = r.tanh();
    grow(s2, s2 * (s2 + 1.0), cap, "two-mode squeezed vacuum", |k| {
        if t == 0.0 {
            return if k == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        }
        let lm = k as f64 * t.ln() - r.cosh().ln();
        Complex64::from_polar(lm.exp(), k as f64 * (theta + std::f64::consts::PI))
    })
}

fn single_fock(spec: &StateSpec, opts: FockOptions) -> Result<FockState> {
    let cap = opts.hard_cap;
    let amps = match *spec {
        StateSpec::Vacuum => vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        StateSpec::Coherent { alpha } => coherent_amps(alpha, cap)?,
        StateSpec::Fock { n } => {
            if n + 1 > cap {
                return Err(Error::Resource {
                    op: "make_state",
                    msg: format!("Fock state |{n}> exceeds the hard limit of {cap}"),
                });
            }
            let mut v = vec![Complex64::new(0.0, 0.0); n + 2];
            v[n] = Complex64::new(1.0, 0.0);
            v
        }
        StateSpec::SqueezedVacuum { r, theta } => squeezed_amps(r, theta, cap)?,
        _ => return Err(Error::domain("make_state", "expected a single-mode spec")),
    };
    let d = amps.len();
    FockState::from_truncated(1, [d, 1], FockData::Pure(amps))
}

fn fock_state(spec: &StateSpec, opts: FockOptions) -> Result<FockState> {
    let cap = opts.hard_cap;
    let zero = Complex64::new(0.0, 0.0);
    match *spec {
        StateSpec::TwinFock { n } | StateSpec::Noon { n } => {
            if n + 1 > cap {
                return Err(Error::Resource {
                    op: "make_state",
                    msg: format!("{n}-photon state exceeds the hard limit of {cap}"),
                });
            }
            let d = n + 2;
            let mut v = vec![zero; d * d];
            if let StateSpec::TwinFock { .. } = spec {
                v[n * d + n] = Complex64::new(1.0, 0.0);
            } else {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                v[n * d] += h;
                v[n] += h;
            }
            FockState::two_mode_pure([d, d], v)
        }
        StateSpec::Tmsv { r, theta } => {
            let c = tmsv_amps(r, theta, cap)?;
            let d = c.len();
            let mut v = vec![zero; d * d];
            for (k, ck) in c.into_iter().enumerate() {
                v[k * d + k] = ck;
            }
            FockState::from_truncated(2, [d, d], FockData::Pure(v))
        }
        StateSpec::Tmsd { alpha, r, theta } => {
            let seed = FockState::tensor(
                &single_fock(&StateSpec::Coherent { alpha }, opts)?,
                &single_fock(&StateSpec::Vacuum, opts)?,
            )?;
            let out = two_mode_squeeze(&State::Fock(seed), r, theta, opts)?;
            match out {
                State::Fock(f) => Ok(f),
                State::Gaussian(_) => unreachable!("Fock input yields Fock output"),
            }
        }
        StateSpec::Product(ref a, ref b) => {
            FockState::tensor(&single_fock(a, opts)?, &single_fock(b, opts)?)
        }
        _ => single_fock(spec, opts),
    }
}

fn gaussian_single(spec: &StateSpec) -> Result<GaussianState> {
    match *spec {
        StateSpec::Vacuum => Ok(GaussianState::vacuum(1)),
        StateSpec::Coherent { alpha } => Ok(GaussianState::coherent(alpha)),
        StateSpec::SqueezedVacuum { r, theta } => Ok(GaussianState::squeezed_vacuum(r, theta)),
        _ => Err(Error::config(
            "make_state",
            "number states have no Gaussian representation; request the Fock representation",
        )),
    }
}

fn gaussian_state(spec: &StateSpec) -> Result<GaussianState> {
    match *spec {
        StateSpec::Tmsv { r, theta } => {
            Ok(GaussianState::vacuum(2).transformed(&squeezer_symplectic(r, theta)))
        }
        StateSpec::Tmsd { alpha, r, theta } => {
            let seed = GaussianState::tensor(&GaussianState::coherent(alpha), &GaussianState::vacuum(1))?;
            Ok(seed.transformed(&squeezer_symplectic(r, theta)))
        }
        StateSpec::Product(ref a, ref b) => {
            GaussianState::tensor(&gaussian_single(a)?, &gaussian_single(b)?)
        }
        _ => gaussian_single(spec),
    }
}

fn validate(spec: &StateSpec) -> Result<()> {
    const OP: &str = "make_state";
    match spec {
        StateSpec::SqueezedVacuum { r, theta }
        | StateSpec::Tmsv { r, theta }
        | StateSpec::Tmsd { r, theta, .. } => {
            if !(*r >= 0.0) || !r.is_finite() || !theta.is_finite() {
                return Err(Error::domain(OP, "squeezing parameter must be finite and >= 0"));
            }
        }
        StateSpec::Coherent { alpha } if !(alpha.re.is_finite() && alpha.im.is_finite()) => {
            return Err(Error::domain(OP, "non-finite coherent amplitude"));
        }
        StateSpec::Noon { n } if *n == 0 => {
            return Err(Error::domain(OP, "NOON state needs N >= 1"));
        }
        StateSpec::Product(a, b) => {
            if a.modes() != 1 || b.modes() != 1 {
                return Err(Error::domain(OP, "product factors must be single-mode specs"));
            }
            validate(a)?;
            validate(b)?;
        }
        _ => {}
    }
    Ok(())
}

/// Builds the state described by `spec` in the requested representation.
pub fn make_state(spec: &StateSpec, repr: Representation, opts: FockOptions) -> Result<State> {
    validate(spec)?;
    match repr {
        Representation::Fock => fock_state(spec, opts).map(State::Fock),
        Representation::Gaussian => gaussian_state(spec).map(State::Gaussian),
    }
}
