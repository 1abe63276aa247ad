//! File formats, parallel drivers and the command-line front end for
//! [`hypercross_core`].

pub mod cli;
pub mod drivers;
pub mod formats;

pub use hypercross_core as core;
