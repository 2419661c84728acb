//! Exact symbolic calculus on the free jet algebra.
//!
//! The elements of the algebra are differential polynomials: polynomials
//! with rational coefficients in the independent variables `x^μ` and the
//! jet variables `u^α_i`, where `i` is a multi-index of derivative orders.
//! On top of that algebra the crate provides
//!
//! * total derivatives, evolutionary derivations and their Lie bracket
//!   ([`jetalgebra`]),
//! * matrix differential operators in normal form together with
//!   composition, Lagrange adjoints, Fréchet derivatives and Green currents
//!   ([`diffops`]),
//! * the Euler operator, functionals modulo divergences and the
//!   `j`, `j*`, `∇`, `∇*` maps of the free jet algebra ([`variational`]),
//! * mixed forms of the variational bicomplex with `d_V` and `d_H`
//!   ([`bicomplex`]),
//! * Lie-Poisson brackets of functionals and Jacobi-identity checks for
//!   skew-adjoint operators ([`poisson`]).
//!
//! Everything is exact: equality of two expressions is structural equality
//! of their canonical forms. The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bicomplex;
pub mod diffops;
mod error;
pub mod jetalgebra;
pub mod poisson;
pub mod variational;

pub use error::Error;
pub use jetalgebra::{
    characteristic_bracket, ev_apply, Characteristic, Connection, DiffFunction, FreeConnection,
    JetVar, Monomial, MultiIndex, Rational, Signature,
};

pub type Result<T, E = Error> = core::result::Result<T, E>;
