//! Simulation and control optimization for quantum state transfer along
//! spin-1/2 chains governed by excitation-conserving XXZ Hamiltonians.
//!
//! The crate covers three protocols:
//!
//! * **State restoring** — an inhomogeneous time-dependent magnetic field
//!   (a few controlled Larmor frequencies at the receiver end) is tuned so
//!   that every receiver matrix element becomes proportional to the matching
//!   sender element, with state-independent scale factors λ.
//! * **Perfect transfer of the zero-order coherence matrix (PTZ)** — for
//!   block-diagonal sender states, a linear solve produces the transferable
//!   state; zigzag and multichannel rectangular geometries are optimized
//!   over their shape parameters, optionally with a corrective unitary on an
//!   extended receiver.
//! * **Nearest-neighbor analytics** — the closed-form eigen-system of the
//!   homogeneous chain, used to study the exponential growth of the transfer
//!   time with chain length.

pub mod analytic;
pub mod basis;
pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod lattice;
pub mod optim;
pub mod ptz;
pub mod restoring;

pub use error::{Error, Result};
