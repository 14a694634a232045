//! Open-system dynamics of the dissipative Jaynes-Cummings model and the
//! two-step cavity-loss quench that speeds up relaxation.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and parallel sweeps live in the `pontus` crate.
//!
//! Modules, bottom-up:
//!
//! * [`linalg`]: small dense complex eigen-solvers.
//! * [`hilbert`]: basis ordering, [`DensityMatrix`], observables, distances.
//! * [`params`]: physical rates in [`ModelParams`].
//! * [`liouvillian`]: Lindblad right-hand sides and stationary states.
//! * [`spectral`]: the 4x4 dynamical matrix of the single-excitation sector.
//! * [`integrator`]: adaptive integration over quench schedules.
//! * [`protocol`]: single-step vs two-step runs, the speed-up predicate and
//!   phase-diagram sweeps.

#![no_std]

extern crate alloc;

pub mod error;
pub mod hilbert;
pub mod integrator;
pub mod linalg;
pub mod liouvillian;
pub mod params;
pub mod protocol;
pub mod spectral;

pub use error::{Error, Result};
pub use hilbert::{atomic_excitation, hs_distance, photon_number, trace_distance, BasisLabel, DensityMatrix};
pub use liouvillian::{Generator, GeneratorKind};
pub use params::ModelParams;
