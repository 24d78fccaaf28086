//! Exact-arithmetic Weil representations of finite quadratic modules.
//!
//! The crate constructs discriminant forms, the metaplectic Weil
//! representation attached to them, integral bases on which every
//! representation matrix has algebraic-integer entries, and the subspace of
//! invariant vectors, with all arithmetic done exactly in cyclotomic fields.

pub mod error;
pub mod exactnum;
pub mod fqm;
pub mod intbasis;
pub mod linalg;
pub mod weil;

pub use error::{Error, Result};
