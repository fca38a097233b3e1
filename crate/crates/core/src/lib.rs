//! Padé-type interpolation of holomorphic functions by F-polynomials.
//!
//! An F-polynomial is a finite sum `f(z) = Σ c_j F(q_j z)` of dilations of a
//! fixed entire function `F` whose derivatives at the origin satisfy
//! `1 <= |F^(n)(0)| <= Γ`. This crate provides:
//!
//! * [`series`]: entire functions given by their derivative sequence, with
//!   truncated evaluation under a rigorous tail bound, and holomorphic test
//!   functions with known Taylor data.
//! * [`vandermonde`]: Vandermonde determinants, the closed-form inverse via
//!   elementary symmetric polynomials, generalized Vandermonde / Schur ratios.
//! * [`interpolation`]: the interpolation operator `T_{F,q}`, its error bound
//!   and the two-sided brackets on `t(q)` and `ε(q)`.
//! * [`capacity`]: Fekete point search, `V_m`, Chebyshev-constant brackets and
//!   the exponential-capacity table.
//! * [`zeros`]: argument-principle zero counting of F-polynomials.
//! * [`laplace`]: Laplace transforms of measures and the Lagrange-coefficient
//!   interpolation formula on the unit circle.
//!
//! Large products (factorials, Vandermonde determinants) are carried in log
//! scale through [`LogComplex`] so that `m` in the hundreds does not overflow.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod capacity;
pub mod error;
pub mod interpolation;
pub mod laplace;
pub mod logscale;
pub mod series;
pub mod table;
pub mod vandermonde;
pub mod zeros;

pub use capacity::{CompactSetDescriptor, FeketeArray, SetKind};
pub use error::{Error, Result};
pub use interpolation::{FPolynomial, GammaProfile};
pub use laplace::{LagrangeSystem, SpectralMeasure};
pub use logscale::LogComplex;
pub use num_complex::Complex64;
pub use series::{EntireFunction, HoloFunction};
pub use vandermonde::FrequencyTuple;
pub use zeros::ZeroCount;
