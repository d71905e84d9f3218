//! Exact-arithmetic kernel for the way-below relation (compact containment).
//!
//! Everything here is computed over exact rationals: rectilinear regions in
//! `R^d` with per-face open/closed flags, nonnegative piecewise-linear
//! functions on compact one-dimensional spaces, Cuntz-style comparison of
//! positive elements and their elementary tensors, finite posets, and the
//! ideal/open-set dictionary for function algebras.
//!
//! All values are immutable after construction and all operations are pure
//! functions of their inputs, so values can be shared freely across threads.

pub mod cuntz;
pub mod error;
pub mod ideal;
pub mod plfn;
pub mod poset;
pub mod region;
pub mod scalar;

pub use error::{Error, Result};
pub use region::{Block, Interval, Region, Space};
pub use scalar::{Rat, Scalar};
