//! Exact Čech–de Rham spark complexes on good orbifold atlases.
//!
//! Everything is computed over the rationals: forms have polynomial
//! coefficients, group actions are rational affine maps, and integer
//! cohomology is read off Smith normal forms. The crate is `no_std` and only
//! needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod atlas;
pub mod cochain;
mod error;
pub mod fixtures;
pub mod functorial;
pub mod homology;
pub mod indexcomb;
pub mod linalg;
pub mod morphisms;
pub mod polyform;
pub mod report;
pub mod spark;
pub mod suites;

pub use error::{Error, Result};
