//! Simulation of a finite-dimensional observer that unitarily "measures"
//! streams of qubits.
//!
//! Two evolution modes are provided. In the no-collapse mode the observer and
//! the streams evolve unitarily and the averaged stream density matrix is
//! computed exactly; its rank can never exceed `D^2` for an observer of
//! dimension `D`. In the collapse mode every qubit is projected onto `|0>` or
//! `|1>` and the averaged stream state is fully mixed. The [`distinguish`]
//! module turns the difference into a hypothesis test.

pub mod cli;
pub mod distinguish;
pub mod engine;
mod error;
pub mod observer;
pub mod qlin;

pub use error::{Error, Result};

/// Version string embedded in every report.
pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
