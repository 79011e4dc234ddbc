//! Santaló points of polytope fibers.
//!
//! For a nonnegative matrix `A` of full row rank and a right-hand side `b` in
//! the interior of `cone(A)`, the fiber `P_b = {x >= 0 : Ax = b}` is a polytope
//! of dimension `n - d`. Its Santaló point is the interior point minimizing the
//! volume of the polar dual. This crate provides
//!
//! * exact rational linear algebra ([`exact`]),
//! * fiber and facet representations of polytopes ([`polytope`]),
//! * cells of the chamber complex of `A` ([`chamber`]),
//! * adjoint polynomials and dual-volume functions ([`poly`], [`volume`]),
//! * a damped Newton solver for the Santaló point ([`santalo`]),
//! * real and complex homotopy continuation: path tracking along a cell,
//!   monodromy solving of the likelihood system, ML degrees and numerical
//!   degrees of patch varieties ([`continuation`]),
//! * named example polytopes and random polygons ([`instances`]).
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. File formats and the command-line front end live in the
//! `santalo` companion crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]
// `!(v > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod chamber;
pub mod continuation;
mod error;
pub mod exact;
pub mod instances;
pub mod numeric;
pub mod poly;
pub mod polytope;
pub mod santalo;
pub mod volume;

pub use error::{Error, Result};
pub use exact::{ExactMatrix, Rational};
