//! Classical simulation toolkit for a boson-sampling quantum random number
//! generator.
//!
//! The crate models the full chain from optics to bits:
//!
//! * [`linalg`] — dense complex matrices, unitarity checks, Haar-random
//!   unitary sampling, and the scattering submatrix selection that connects
//!   a mode unitary to a photon configuration.
//! * [`permanent`] — matrix permanents (Gray-code Ryser and a naive
//!   cross-check), the computational core of output probabilities.
//! * [`interferometer`] — Mach–Zehnder mesh descriptions: triangular
//!   layouts, per-cell phase parameters, and compilation to a mode unitary.
//! * [`fock`] — Fock states, output-state enumeration, exact output
//!   distributions, and seeded sampling from them.
//! * [`pipeline`] — the generator itself: sampled click patterns fed
//!   through von Neumann pair extraction into unbiased bits, plus bias
//!   diagnostics and the bit-rate comparison against a branching-process
//!   baseline.
//! * [`entropy`] — Shannon, Rényi, and min-entropy of output
//!   distributions, and entropy sweeps along a mesh phase parameter.
//! * [`randtests`] — a nine-test statistical randomness battery with
//!   p-values and α = 0.01 verdicts.
//! * [`seed`] — deterministic sub-seed derivation so every stochastic
//!   stage is reproducible from one master seed.
//!
//! Fallible operations return the crate-wide [`error::Error`], which
//! callers can map onto coarse failure categories (configuration, bad
//! data, cost guards, numerical integrity).

pub mod entropy;
pub mod error;
pub mod fock;
pub mod interferometer;
pub mod linalg;
pub mod permanent;
pub mod pipeline;
pub mod randtests;
pub mod seed;

pub use error::{Error, Result};
