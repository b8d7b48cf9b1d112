//! Minimum-time "on-off" Roland-Cerf pulse sequences for adiabatic passage in
//! a two-level system driven by detuning only.
//!
//! The crate is `no_std` (with `alloc`) and contains only the numerical core:
//!
//! * [`su2`]: exact SU(2) propagators stored as Pauli coefficients.
//! * [`protocols`]: boundary conditions, the constant-control Roland-Cerf
//!   resonances and the duration bounds.
//! * [`solver`]: optimality/area/return conditions and the search for the
//!   shortest bang-bang sequence at a given maximum amplitude.
//! * [`dynamics`]: waveform synthesis in physical time and independent
//!   integration of the Schrödinger equation in both frames.
//!
//! File formats, the command line and parallel sweeps live in the `apforge`
//! crate.

#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod protocols;
pub mod solver;
pub mod su2;

pub use error::{Error, Result};
pub use protocols::{BoundaryConditions, DurationBounds, RcResonance};
pub use solver::{PulseSequence, SolverResult};
pub use su2::{BlochVector, Frame, SpinState, Su2Operator};
