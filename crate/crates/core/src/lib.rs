//! Lie algebra extensions built from admissible couples `(D, ω)`.

pub mod error;
pub mod exterior;
pub mod extension;
pub mod holonomy;
pub mod io;
pub mod liealg;
pub mod linalg;
pub mod ode;
pub mod paths;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use scalar::{Mode, Rational, Scalar};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/algebras.md")]
    mod algebras {}
    #[doc = include_str!("../../../book/src/couples.md")]
    mod couples {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/paths.md")]
    mod paths {}
    #[doc = include_str!("../../../book/src/holonomy.md")]
    mod holonomy {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
