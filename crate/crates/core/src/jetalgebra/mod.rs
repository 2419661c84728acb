//! The differential algebra `(F, D)` of differential polynomials.

mod connection;
mod evolution;
mod function;
mod multi_index;
mod signature;

pub use connection::{Connection, FreeConnection};
pub use evolution::{characteristic_bracket, ev_apply, Characteristic, DerivativeCache};
pub use function::{minus_d_sum, DiffFunction, JetVar, Monomial, Rational};
pub use multi_index::MultiIndex;
pub use signature::Signature;
