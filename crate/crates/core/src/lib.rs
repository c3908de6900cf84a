//! Exact-arithmetic toolkit for even positive definite lattices.
//!
//! The crate provides, entirely over arbitrary-precision integers and
//! rationals:
//!
//! * an exact matrix kernel (determinants, Hermite normal form, kernels,
//!   LDL^T, LLL) in [`exact_linalg`];
//! * Fincke-Pohst short-vector enumeration and enumeration under
//!   prescribed inner-product constraints in [`enumeration`];
//! * lattice values, Kneser decomposition into indecomposable orthogonal
//!   summands, Gauss reduction of binary forms, small-rank isometry
//!   testing, and a catalog (A_n, E8, the binary Golay code, the Leech
//!   lattice) with named automorphisms in [`lattice`], [`golay`] and
//!   [`catalog`];
//! * the fixed-space decomposition of a lattice under an automorphism of
//!   odd prime order, with machine checks of the projection/intersection
//!   lemmas, in [`fixpoint`];
//! * Siegel theta-series coefficient tables, representation numbers, the
//!   theta operator, and mod-p congruence reports in [`theta`];
//! * JSON wire formats shared with the command-line tool in [`json`].

// Matrix code reads better with explicit row/column indices.
#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod enumeration;
pub mod error;
pub mod exact_linalg;
pub mod fixpoint;
pub mod golay;
pub mod json;
pub mod lattice;
pub mod theta;

pub use error::{AutomorphismError, LatticeError, LinalgError, NotInImage, ThetaError};
pub use exact_linalg::{IntegerMatrix, RationalMatrix};
pub use lattice::Lattice;
