//! Bonnet pairs in ℝ⁴ from isothermic surfaces in S³, and the converse
//! recovery of the isothermic surface from a given pair.
//!
//! Bivectors of ℝ⁴ live in [`exterior4`]; the light-cone model of S³ and its
//! Möbius group in [`lightcone`]; sampled surfaces in [`catalog`] over the
//! grids and discrete calculus of [`charts`]. [`bonnet`] builds the pair,
//! [`recovery`] inverts it.

pub mod bonnet;
pub mod catalog;
pub mod charts;
pub mod error;
pub mod exec;
pub mod exterior4;
pub mod lightcone;
pub mod mesh;
pub mod pipeline;
pub mod recovery;
pub mod report;
pub mod snapshot;
pub mod tolerances;

pub use error::{Error, Result};
