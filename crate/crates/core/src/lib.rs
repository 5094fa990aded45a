#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

//! Numerical laboratory for marginal integrals, localization weights and
//! weighted Bergman kernels on fibered domains.

pub mod bergman;
pub mod error;
pub mod extended;
pub mod geometry;
pub mod lab;
pub mod numerics;
pub mod par;
pub mod prekopa;
pub mod weights;

pub use error::{Error, Result};
