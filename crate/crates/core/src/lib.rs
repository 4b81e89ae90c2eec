//! Random dynamical systems driven by random systems with complete connections.
//!
//! A scenario is a chain on a state space `W` choosing indices `x ∈ X` with
//! state-dependent probabilities `P(w, ·)`; each index carries a finite
//! distribution `τ_x` over maps of the phase space `Y` (the Riemann sphere or a
//! real interval). The crate evaluates the chain exactly, computes Julia and
//! kernel Julia sets of monomial families in log-radius coordinates, estimates
//! Julia sets of general families on pixel grids, and iterates the transition
//! operator on `Y × W`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;

pub mod analysis;
pub mod chain;
pub mod grid;
pub mod maps;
pub mod operator;
pub mod radial;
pub mod rng;
pub mod scenario;
pub mod state;

pub use error::{Result, RsccError};
pub use maps::{chordal_distance, compose_monomials, Complex64, MapSpec, Monomial, SpherePoint};
pub use radial::{KernelCertificate, RadialSet};
pub use scenario::{builtin, ScenarioSpec};
pub use state::{IndexId, StatePoint, StateSpace, Word};
