//! Exact-arithmetic classification of rank-2 holomorphic bundles on the
//! blown-up plane, presented by canonical transition matrices.
//!
//! A bundle at level `j` is a matrix `[[z^j, p], [0, z^-j]]` whose upper-right
//! perturbation `p` is supported on a finite index window. Two perturbations
//! give isomorphic bundles exactly when a gauge transformation, holomorphic in
//! both coordinate charts and invertible at the origin of the exceptional
//! chart, conjugates one into the other. This crate decides that relation with
//! verifiable certificates and studies the level-raising embedding
//! `p -> z u^2 p`.
//!
//! Layering, bottom up:
//! - [`scalar`]: exact complex rationals.
//! - [`laurent`]: polynomials in `u` and `z^+-1` over those scalars.
//! - [`linalg`]: exact nullspaces, solving, and quadratic-form polarization.
//! - [`bundles`]: windows, canonical forms, the embedding and its inverse.
//! - [`iso`]: gauge conjugation, the decision procedure, certificates.
//! - [`harness`]: campaign suites, floating-point cross-checks, reports.

pub mod bundles;
pub mod error;
pub mod harness;
pub mod iso;
pub mod laurent;
pub mod linalg;
pub mod scalar;

pub use error::Error;
