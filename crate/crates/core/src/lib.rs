//! Dispersive qubit-resonator dynamics in the doubled (vectorized) Liouville space.
//!
//! Frequencies are in MHz (ν-units, ω/2π) and times in ns unless a name says
//! otherwise. Every phase or decay exponential carries the factor 2π, see
//! [`model::RAD_PER_NS`].

pub mod effective;
pub mod eigenstates;
mod error;
pub mod exec;
pub mod io;
pub mod linalg;
pub mod liouville;
pub mod model;
pub mod response;
pub mod spectra;
pub mod transient;

pub use error::{Error, Result};
pub use num_complex::Complex64;
