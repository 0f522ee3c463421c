//! Two isotropic harmonic oscillators coupled to the quantized electromagnetic
//! field in the multipolar scheme, solved exactly by a Bogoliubov transformation.
//!
//! Units: ħ = c = 1. Oscillator 1 sits at the origin, oscillator 2 at `r ẑ`.

pub mod bogoliubov;
pub mod cli;
pub mod discrete_oracle;
pub mod energy;
pub mod error;
pub mod model;
pub mod par;
pub mod quad;
pub mod resolvent;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
