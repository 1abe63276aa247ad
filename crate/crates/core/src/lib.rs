//! Infinite-dimensional hyperbolic crosses and sparse parametric Galerkin approximation.
//!
//! The crate covers factorial weights `w(s) = (|s|!/s!) b^s` over finitely
//! supported multi-indices, their `l_p` summability, the index sets
//! `E_{a,b}(T)` with exact counts and certified bounds, weighted coefficient
//! norms with the truncation projection, and a stochastic Galerkin solver
//! for affine parametric diffusion on the torus.
//!
//! Everything is `no_std` with `alloc`; IO and parallel drivers live in the
//! companion `hypercross` crate.

#![no_std]

extern crate alloc;

pub mod error;
pub mod hypercross;
pub mod math;
pub mod multiindex;
pub mod pde;
pub mod sequences;
pub mod summability;
pub mod tensorfield;

pub use error::{Error, Result};
pub use multiindex::MultiIndex;
pub use sequences::{Interval, Tail, WeightSequence};
