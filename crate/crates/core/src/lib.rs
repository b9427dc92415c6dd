//! Exact n-point functions of Gromov-Witten invariants of the projective line.
//!
//! Four independent routes to the same numbers: the Okounkov-Pandharipande
//! stationary recursion, closed-form expansions, the Dubrovin-Yang matrix
//! resolvent, and Virasoro constraints in correlator and residue form; plus
//! Eynard-Orantin topological recursion on the curve x = z + q/z.

pub mod algebra;
pub mod closed_forms;
pub mod dy;
pub mod eo;
pub mod error;
pub mod report;
pub mod residue;
pub mod stationary;
pub mod store;
pub mod suites;
pub mod virasoro;

pub use error::{Error, Result};
