//! State-vector simulation of chiral three-spin rotations and the pulse
//! schedules that zip a spin register into a GHZ state, together with the
//! Floquet machinery that synthesizes the required imaginary spin-spin
//! coupling from phase-modulated spin-cavity interactions.
//!
//! The crate is organized around the stages of the protocol:
//!
//! - [`spin_state`]: dense amplitude vectors over the 2^N computational
//!   basis, basis bookkeeping, fidelities.
//! - [`chiral`]: the cyclic Hamiltonian `iκ Σ σ⁺_{j+1}σ⁻_j + h.c.` on a spin
//!   triple, exact evolution by eigendecomposition, and the closed-form
//!   three-spin solution used as an analytic oracle.
//! - [`pulses`]: ideal single-spin π and π/2 rotations.
//! - [`zipper`]: schedule generation and execution for the GHZ zipping
//!   protocol, with per-step trajectory records and CSV/JSON export.
//! - [`floquet`]: Bessel functions, the η series, modulation harmonics h_n,
//!   the effective Hamiltonian commutator series, and a full time-dependent
//!   integrator for validating the effective model against the driven
//!   spin-cavity dynamics.
//!
//! All Hamiltonians in scope conserve excitation number and all evolution
//! paths are unitary; ħ = 1 throughout and times are reported in units of
//! 1/κ.
//!
//! With the default `parallel` feature, batch work (substep propagators,
//! sweep points) runs on rayon; building with `--no-default-features`
//! produces a sequential build with identical results.

pub mod chiral;
mod error;
mod exec;
pub mod floquet;
pub mod pulses;
pub mod spin_state;
pub mod zipper;

pub use error::{Error, Result};
