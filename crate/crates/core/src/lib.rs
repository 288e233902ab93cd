//! Plasmonic sensing models and quantum estimation bounds.
//!
//! * [`transduce`] turns analyte refractive index into optical observables.
//! * [`states`] and [`channels`] build and transform probe light.
//! * [`estimate`] computes Fisher information and closed-form precision bounds.
//! * [`mc`] samples detector outcomes and checks the bounds empirically.

pub mod channels;
pub mod error;
pub mod estimate;
pub mod mc;
pub mod numeric;
pub mod states;
pub mod transduce;

pub use error::{Error, Result};
