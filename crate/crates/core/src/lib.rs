//! Dictionary-restricted greedy descent for convex energies on weighted
//! sequence spaces, with certifiers for the smoothness and ellipticity
//! assumptions, norming constants for several dictionary families, and
//! convergence-rate fitting.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod sampling;
pub mod vectorspace;
pub mod dictionary;
pub mod energy;
pub mod greedy;

pub use error::{Error, Result};
pub use vectorspace::{Space, SpaceVector};
