//! Probe states in truncated Fock and Gaussian representations.

mod fock;
mod gaussian;
mod spec;
mod stats;

pub use fock::{FockData, FockState, LEAKAGE_WARN};
pub use gaussian::{symplectic_form, GaussianState};
pub use spec::{make_state, FockOptions, Representation, StateSpec};
pub use stats::{nrf, number_moments, photon_statistics, NumberMoments, PhotonStats};

/// A state in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Fock(FockState),
    Gaussian(GaussianState),
}

impl State {
    pub fn modes(&self) -> usize {
        match self {
            State::Fock(f) => f.modes(),
            State::Gaussian(g) => g.modes(),
        }
    }

    pub fn as_fock(&self) -> Option<&FockState> {
        match self {
            State::Fock(f) => Some(f),
            State::Gaussian(_) => None,
        }
    }

    pub fn as_gaussian(&self) -> Option<&GaussianState> {
        match self {
            State::Gaussian(g) => Some(g),
            State::Fock(_) => None,
        }
    }
}

impl From<FockState> for State {
    fn from(f: FockState) -> Self {
        State::Fock(f)
    }
}

impl From<GaussianState> for State {
    fn from(g: GaussianState) -> Self {
        State::Gaussian(g)
    }
}
