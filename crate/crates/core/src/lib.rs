//! Numerical core for tipping analysis between coexisting limit cycles of
//! planar oscillators.
//!
//! The crate is organised around the autonomous "frozen" systems (two planar
//! vector fields and their limit-cycle skeletons) and the non-autonomous
//! machinery that drives an input parameter along a path in time:
//!
//! * [`models`] — the two vector fields, parameter records, Jacobians.
//! * [`integrate`] — adaptive embedded Runge-Kutta 5(4) with dense output and
//!   section-crossing detection.
//! * [`cycles`] — equilibria, stable/unstable limit cycles, amplitude
//!   polynomial roots.
//! * [`regions`] — attractor census, one/two-parameter scans, fold and Hopf
//!   curve refinement.
//! * [`phase`] — time-parametrisation of cycles and phase/state conversions.
//! * [`basin`] — separatrix polygons, membership tests, basin-unstable arcs.
//! * [`forcing`] — the three time-dependent input laws and parameter paths.
//! * [`tipping`] — track/tip classification, tipping diagrams, critical
//!   rates, pace-vs-phase grids.
//!
//! Everything here is deterministic: no randomness, no time-dependent state,
//! and grid sweeps assemble their output in index order regardless of the
//! executor used. The crate is `no_std`-compatible (with `alloc`); enable the
//! `libm` feature instead of `std` for builds without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("phasetip-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod basin;
pub mod cycles;
mod error;
pub mod exec;
pub mod forcing;
pub mod integrate;
pub(crate) mod math;
pub mod models;
pub mod phase;
pub mod regions;
pub mod tipping;

pub use error::Error;

/// Crate result alias.
pub type Result<T> = core::result::Result<T, Error>;
