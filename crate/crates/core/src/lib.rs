//! Subordinators obtained as first-passage processes of spectrally negative
//! Lévy processes.
//!
//! Starting from a subordinator `X` with known transition density, the
//! process `ξ_t = t − X_t` is spectrally negative and its first-passage times
//! `τ_x⁺` form a new subordinator whose exponent, transition density and Lévy
//! density are available in closed form through Kendall's identity. This
//! crate evaluates those objects for seven base families, samples the Poisson
//! case exactly, and checks the resulting identities numerically.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod exponents;
pub mod families;
pub mod quad;
pub mod roots;
pub mod simulate;
pub mod specialfn;
pub mod verify;

pub use error::{Error, Result};
pub use exponents::{ExponentHandle, Family, FamilyParams, Method, PhiResult};
pub use families::{DensityPoint, Space};
pub use specialfn::SeriesValue;
