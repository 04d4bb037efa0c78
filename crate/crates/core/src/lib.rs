//! Simulation and certification of high-dimensional spatial entanglement
//! between photon pairs measured with macro-pixel holograms.
//!
//! The pipeline runs from pump optics and the joint transverse momentum
//! amplitude ([`optics`]), through tailored pixel layouts ([`basis_design`])
//! and the resulting two-qudit state and its count statistics ([`state`]),
//! to fidelity witnesses, Schmidt-number certification and entanglement of
//! formation bounds ([`witness`]) with Poisson bootstrap errors ([`stats`]).

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis_design;
pub mod error;
pub mod mub;
pub mod numtheory;
pub mod optics;
pub mod plot;
pub mod state;
pub mod stats;
pub mod witness;

pub use error::{Error, Result};
