//! Exact density-matrix simulation of time-displaced entanglement.
//!
//! Qubits carry `(location, clock cycle)` labels. A Bell measurement on a
//! time-displaced pair closes a loop in time, so the state entering the
//! measurement has to be solved for self-consistently. The [`consistency`]
//! module turns every such scenario into a linear map on the unknown state
//! and finds its fixed points; [`protocols`] runs the end-to-end scenarios
//! and [`analysis`] derives the trace-distance tables.
//!
//! Interchangeable pieces are selected by name at runtime:
//!
//! * consistency scenarios: [`consistency::ScenarioRegistry`]
//! * measurement perturbation models: [`gates::PerturbationRegistry`]
//! * Deutsch-CTC interaction orderings: [`consistency::InteractionRegistry`]

pub mod analysis;
pub mod cli;
pub mod consistency;
mod error;
pub mod gates;
pub mod protocols;
pub mod qlinalg;
pub mod temporal;
pub mod tolerance;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use tolerance::TOL;
