//! Quasiregular maps of R^n with a prescribed maximum modulus set.
//!
//! The polynomial-type construction composes a Zorich-conjugated vertical
//! shrink `h₁` (fixing a target set T and strictly decreasing |x| off T)
//! with a quasiregular power map. The transcendental-type construction
//! replaces the power map by a two-dimensional annulus-gluing model
//! whose growth is controlled off an exceptional set of radii.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geom;
pub mod growth;
pub mod map;
pub mod sets;
pub mod shrink;
pub mod verify;
pub mod zorich;

pub use error::{Error, Result};
pub use geom::PointN;
