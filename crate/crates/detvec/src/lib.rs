//! detvec: compact Lie group actions described by invariant vector fields.
//!
//! The crate builds the explicit invariant vector fields attached to the
//! natural actions of SO(n), SU(m), U(m), Sp(r) and tori, checks
//! automorphism and invariance claims through exact-derivative pushforward
//! residuals, constructs the fiber-twist counterexample diffeomorphisms,
//! and verifies the flow-straightening and truncated commutant-dimension
//! statements at desk scale.
//!
//! Modules:
//! - [`lie`]: matrix groups, algebras, Haar sampling, dense couples.
//! - [`dsl`]: expression trees for scalar functions, vector fields and
//!   smooth maps on chart coordinates, with exact differentiation.
//! - [`constructions`]: the named fields and field pairs (radial field,
//!   complex/quaternionic structure fields, bump pairs, Hopf twist,
//!   product fields).
//! - [`autcheck`]: residual-based verification of invariance claims and
//!   equivariant polynomial field spaces.
//! - [`flows`]: adaptive flow integration, trajectory closure classes,
//!   gauge straightening, truncated commutant nullspaces.

pub mod autcheck;
pub mod constructions;
pub mod dsl;
pub mod error;
pub mod flows;
pub mod lie;
pub mod linalg;

pub use error::{Error, Result};
