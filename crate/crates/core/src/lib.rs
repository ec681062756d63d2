//! Hyperbolic and Kobayashi geometry on planar domains.
//!
//! Exact distances and metrics on the disk, punctured disk and annuli;
//! two-sided bounds on `ℂ∖{0,1}` and other punctured regions through
//! validated chains of holomorphic discs; and numerical versions of the
//! rescaling, lattice-map, Landau, Schottky and Picard constructions.
//!
//! ```
//! use kobalt::poincare::omega_at;
//! use num_complex::Complex64;
//!
//! let d = omega_at(Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)).unwrap();
//! assert!((d - 0.5f64.atanh()).abs() < 1e-15);
//! ```

pub mod c01;
pub mod domains;
pub mod holo;
pub mod kobayashi;
pub mod poincare;
pub mod quadrature;
pub mod rescaling;
pub mod simplex;
pub mod theorems;

/// Every code block in the guide runs as a doc-test.
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/poincare.md")]
    mod poincare {}
    #[doc = include_str!("../../../book/src/model-domains.md")]
    mod model_domains {}
    #[doc = include_str!("../../../book/src/twice-punctured-plane.md")]
    mod twice_punctured_plane {}
    #[doc = include_str!("../../../book/src/kobayashi.md")]
    mod kobayashi {}
    #[doc = include_str!("../../../book/src/rescaling.md")]
    mod rescaling {}
    #[doc = include_str!("../../../book/src/theorems.md")]
    mod theorems {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
