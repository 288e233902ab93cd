//! Loss, beam splitters, phase shifts and two-mode gain in both representations.
//!
//! Loss is a beam splitter with a vacuum environment that is never materialised.
//! On Fock states it is the only non-unitary path: it turns pure inputs into a mixture
//! of Kraus branches, which the unitary channels then transform branch by branch.

mod fock_kernels;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::{FockOptions, GaussianState, State};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseKind {
    /// `exp(i φ n)` on the given mode.
    Single { mode: usize },
    /// `exp(i φ/2 (n_a - n_b))`.
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelSpec {
    Loss { eta: f64, mode: usize },
    BeamSplitter { transmittance: f64, theta: f64 },
    Phase { phi: f64, kind: PhaseKind },
    /// `a → √G a + √(G-1) b†` at `theta = π`.
    TwoModeSqueezer { gain: f64, theta: f64 },
}

impl ChannelSpec {
    pub fn loss(eta: f64, mode: usize) -> Self {
        ChannelSpec::Loss { eta, mode }
    }

    /// Symmetric splitter phase `θ = π/2`.
    pub fn beam_splitter(transmittance: f64) -> Self {
        ChannelSpec::BeamSplitter { transmittance, theta: std::f64::consts::FRAC_PI_2 }
    }

    pub fn phase(phi: f64, mode: usize) -> Self {
        ChannelSpec::Phase { phi, kind: PhaseKind::Single { mode } }
    }

    pub fn relative_phase(phi: f64) -> Self {
        ChannelSpec::Phase { phi, kind: PhaseKind::Relative }
    }

    pub fn squeezer(gain: f64) -> Self {
        ChannelSpec::TwoModeSqueezer { gain, theta: std::f64::consts::PI }
    }

    pub fn squeezer_r(r: f64, theta: f64) -> Self {
        ChannelSpec::TwoModeSqueezer { gain: r.cosh().powi(2), theta }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelSpec::Loss { eta, .. } if !(0.0..=1.0).contains(&eta) => {
                Err(Error::domain("apply_loss", format!("eta = {eta} outside [0, 1]")))
            }
            ChannelSpec::BeamSplitter { transmittance: t, .. } if !(0.0..=1.0).contains(&t) => Err(
                Error::domain("apply_beam_splitter", format!("T = {t} outside [0, 1]")),
            ),
            ChannelSpec::TwoModeSqueezer { gain, .. } if !(gain >= 1.0) || !gain.is_finite() => Err(
                Error::domain("apply_two_mode_squeezer", format!("G = {gain} must be >= 1")),
            ),
            ChannelSpec::Phase { phi, .. } if !phi.is_finite() => {
                Err(Error::domain("apply_phase", "phase must be finite"))
            }
            _ => Ok(()),
        }
    }
}

fn check_mode(state: &State, mode: usize, op: &'static str) -> Result<()> {
    if mode >= state.modes() {
        return Err(Error::domain(op, format!("mode {mode} out of range")));
    }
    Ok(())
}

fn require_two_modes(state: &State, op: &'static str) -> Result<()> {
    if state.modes() != 2 {
        return Err(Error::domain(op, "two-mode state required"));
    }
    Ok(())
}

/// Embeds per-mode 2x2 blocks `[[u, -v], [v, u]]` for a complex 2x2 amplitude map.
fn passive_symplectic(a: [[Complex64; 2]; 2]) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(4, 4);
    for j in 0..2 {
        for k in 0..2 {
            let (u, v) = (a[j][k].re, a[j][k].im);
            s[(2 * j, 2 * k)] = u;
            s[(2 * j, 2 * k + 1)] = -v;
            s[(2 * j + 1, 2 * k)] = v;
            s[(2 * j + 1, 2 * k + 1)] = u;
        }
    }
    s
}

fn rotation(phases: [f64; 2], modes: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        let (sn, cs) = phases[k].sin_cos();
        s[(2 * k, 2 * k)] = cs;
        s[(2 * k, 2 * k + 1)] = -sn;
        s[(2 * k + 1, 2 * k)] = sn;
        s[(2 * k + 1, 2 * k + 1)] = cs;
    }
    s
}

/// Moment map of the two-mode squeezer `exp(ξ* a b - ξ a† b†)`, `ξ = r e^{iθ}`.
pub fn squeezer_symplectic(r: f64, theta: f64) -> DMatrix<f64> {
    let mu = r.cosh();
    let nu = -Complex64::from_polar(r.sinh(), theta);
    let (nr, ni) = (nu.re, nu.im);
    #[rustfmt::skip]
    let s = DMatrix::from_row_slice(4, 4, &[
        mu,  0.0, nr,  ni,
        0.0, mu,  ni,  -nr,
        nr,  ni,  mu,  0.0,
        ni,  -nr, 0.0, mu,
    ]);
    s
}

/// Complex amplitude map `α_out = M α_in` of the splitter.
pub fn beam_splitter_matrix(transmittance: f64, theta: f64) -> [[Complex64; 2]; 2] {
    let t = Complex64::new(transmittance.sqrt(), 0.0);
    let rr = (1.0 - transmittance).sqrt();
    [
        [t, Complex64::from_polar(rr, theta)],
        [-Complex64::from_polar(rr, -theta), t],
    ]
}

pub fn apply_loss(state: &State, eta: f64, mode: usize) -> Result<State> {
    ChannelSpec::loss(eta, mode).validate()?;
    check_mode(state, mode, "apply_loss")?;
    if eta == 1.0 {
        return Ok(state.clone());
    }
    match state {
        State::Fock(f) => fock_kernels::loss(f, eta, mode).map(State::Fock),
        State::Gaussian(g) => {
            let mut out = g.clone();
            let s = eta.sqrt();
            for i in [2 * mode, 2 * mode + 1] {
                out.d[i] *= s;
                for j in 0..out.v.ncols() {
                    out.v[(i, j)] *= s;
                    out.v[(j, i)] *= s;
                }
                out.v[(i, i)] += 0.5 * (1.0 - eta);
            }
            Ok(State::Gaussian(out))
        }
    }
}

pub fn apply_beam_splitter(
    state: &State,
    transmittance: f64,
    theta: f64,
    opts: FockOptions,
) -> Result<State> {
    ChannelSpec::BeamSplitter { transmittance, theta }.validate()?;
    require_two_modes(state, "apply_beam_splitter")?;
    let m = beam_splitter_matrix(transmittance, theta);
    match state {
        State::Gaussian(g) => Ok(State::Gaussian(g.transformed(&passive_symplectic(m)))),
        State::Fock(f) => {
            fock_kernels::beam_splitter(f, transmittance, theta, opts.hard_cap).map(State::Fock)
        }
    }
}

pub fn apply_phase(state: &State, phi: f64, kind: PhaseKind) -> Result<State> {
    ChannelSpec::Phase { phi, kind }.validate()?;
    let phases = match kind {
        PhaseKind::Single { mode } => {
            check_mode(state, mode, "apply_phase")?;
            let mut p = [0.0; 2];
            p[mode] = phi;
            p
        }
        PhaseKind::Relative => {
            require_two_modes(state, "apply_phase")?;
            [0.5 * phi, -0.5 * phi]
        }
    };
    match state {
        State::Gaussian(g) => Ok(State::Gaussian(g.transformed(&rotation(phases, g.modes())))),
        State::Fock(f) => fock_kernels::phase(f, phases).map(State::Fock),
    }
}

pub(crate) fn two_mode_squeeze(state: &State, r: f64, theta: f64, opts: FockOptions) -> Result<State> {
    require_two_modes(state, "apply_two_mode_squeezer")?;
    match state {
        State::Gaussian(g) => Ok(State::Gaussian(g.transformed(&squeezer_symplectic(r, theta)))),
        State::Fock(f) => fock_kernels::squeeze(f, r, theta, opts.hard_cap).map(State::Fock),
    }
}

/// Phase-insensitive amplifier with gain `G = cosh² r`.
pub fn apply_two_mode_squeezer(
    state: &State,
    gain: f64,
    theta: f64,
    opts: FockOptions,
) -> Result<State> {
    ChannelSpec::TwoModeSqueezer { gain, theta }.validate()?;
    two_mode_squeeze(state, gain.sqrt().acosh(), theta, opts)
}

pub fn apply(state: &State, channel: &ChannelSpec, opts: FockOptions) -> Result<State> {
    match *channel {
        ChannelSpec::Loss { eta, mode } => apply_loss(state, eta, mode),
        ChannelSpec::BeamSplitter { transmittance, theta } => {
            apply_beam_splitter(state, transmittance, theta, opts)
        }
        ChannelSpec::Phase { phi, kind } => apply_phase(state, phi, kind),
        ChannelSpec::TwoModeSqueezer { gain, theta } => {
            apply_two_mode_squeezer(state, gain, theta, opts)
        }
    }
}

/// Applies channels left to right.
pub fn apply_chain(state: &State, chain: &[ChannelSpec], opts: FockOptions) -> Result<State> {
    chain.iter().try_fold(state.clone(), |s, c| apply(&s, c, opts))
}

/// Convenience for Gaussian-only pipelines.
pub fn apply_gaussian_chain(state: &GaussianState, chain: &[ChannelSpec]) -> Result<GaussianState> {
    match apply_chain(&State::Gaussian(state.clone()), chain, FockOptions::default())? {
        State::Gaussian(g) => Ok(g),
        State::Fock(_) => unreachable!("Gaussian channels keep the representation"),
    }
}
