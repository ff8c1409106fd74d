//! Exact Picard-group invariants for moduli of parahoric Bruhat-Tits bundles.
//!
//! The crate works entirely with numerical shadows: affine Dynkin types and
//! facets at marked points, integer central charges, monodromy tuples in
//! subgroups of `S3`, and exact ranks of the conformal-block base cases that
//! certify descent of line bundles.

pub mod covers;
pub mod descent;
pub mod dynkin;
pub mod error;
pub mod factorization;
pub mod group;
pub mod picard;
pub mod verlinde;

pub use error::{Error, Result};
