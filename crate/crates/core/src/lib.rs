//! Constructions and solvers for self-maps with prescribed discrete fixed-point
//! sets, together with the Kobayashi-metric machinery used to certify rigidity
//! of a shell-carved ball domain.
//!
//! The crate is organized around a small set of building blocks:
//!
//! - [`poly`] / [`polymap`] — sparse multivariate complex polynomials and
//!   polynomial self-maps of ℂⁿ (evaluation, composition, differentiation).
//! - [`factory`] — polynomial automorphisms of ℂⁿ with a prescribed finite
//!   fixed-point set and an exact inverse, kept in factored form.
//! - [`solver`] — univariate root finding (Aberth–Ehrlich), multi-start Newton
//!   extraction of fixed points, retraction tests and determining-set
//!   classification.
//! - [`ball`] — Möbius involutions, the Kobayashi distance on the unit ball,
//!   Kobayashi balls, constrained nearest points on spheres, and automorphisms
//!   fixing a prescribed pair of points.
//! - [`shell`] — the unit ball minus half-space-clipped spherical shells, with
//!   line-witness search and third-fixed-point rigidity certificates.
//! - [`gallery`] — curve involutions, Blaschke products, strip reflections and
//!   annuli-product automorphisms.
//! - [`linearize`] — isotropy-group averaging (Cartan linearization) and the
//!   unit-eigenvalue direction test.
//!
//! All numeric defaults live in [`tol`]; every JSON artifact embeds the
//! tolerances that produced it so that certificates are self-describing.

pub mod ball;
pub mod cplx;
pub mod error;
pub mod factory;
pub mod gallery;
pub mod json;
pub mod linearize;
pub mod poly;
pub mod polymap;
pub mod sample;
pub mod shell;
pub mod solver;
pub mod tol;

pub use cplx::{Point, C};
pub use error::Error;
pub use factory::{PolyAutomorphism, Provenance, TargetSet};
pub use poly::MultiPoly;
pub use polymap::PolyMap;
pub use solver::{FixedPointReport, PointSet};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
