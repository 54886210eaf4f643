//! Automorphisms of the 2×2 spectral ball and numerical checks of the
//! twist automorphisms that are not generated by transposition, Möbius
//! maps and conjugation-invariant conjugations.
//!
//! The matrix and automorphism layers are generic over the real type
//! (`f32` or `f64`, see [`Real`]); the verification layer works in `f64`.

// `!(a < b)` comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod automorphism;
pub mod error;
pub mod format;
pub mod matrix;
pub mod pipeline;
pub mod poly;
pub mod scalar;
pub mod verify;

pub use automorphism::{
    lower_twist_u, lower_twist_x12_invariance, Automorphism, GeneralConjugation, LinearMap2,
    MoebiusParams,
};
pub use error::{Error, Result};
pub use matrix::{spectrum_distance, Mat2, SpectralBallPoint};
pub use poly::{EntirePoly, InvariantFunction, MonomialTable, ScalarForm, TwistFunction};
pub use scalar::{Cx, Real};

/// Double-precision complex scalar.
pub type C64 = Cx<f64>;
/// Double-precision 2×2 complex matrix.
pub type Mat2d = Mat2<f64>;
/// Single-precision 2×2 complex matrix.
pub type Mat2f = Mat2<f32>;
pub type Automorphism64 = Automorphism<f64>;
pub type EntirePoly64 = EntirePoly<f64>;
pub type MoebiusParams64 = MoebiusParams<f64>;
pub type LinearMap64 = LinearMap2<f64>;
