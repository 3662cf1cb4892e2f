//! Computational toolkit for operators on reproducing-kernel Hilbert spaces.
//!
//! The crate models the diagonal-kernel spaces of analytic functions on the
//! unit disk (Hardy, weighted Bergman, Dirichlet) together with the finite
//! standard model `C^n`, builds concrete operators on them, and computes
//! Berezin transforms, Berezin ranges, Berezin numbers and norms, numerical
//! ranges and sectorial indices. The [`inequalities`] module evaluates a
//! registry of Berezin-number inequalities and stress-tests them with seeded
//! random operands.
//!
//! Grid sweeps and falsification trials run on rayon when the `parallel`
//! feature is enabled (the default). Every reduction is ordered by grid or
//! trial index, so results do not depend on the thread count.

pub mod berezin;
pub mod error;
pub mod inequalities;
pub mod numerics;
pub mod operators;
pub mod optimize;
pub mod par;
pub mod ranges;
pub mod rkhs;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Crate version, recorded in emitted artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
