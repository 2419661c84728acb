use alloc::vec::Vec;

use super::{DiffFunction, JetVar};

/// The symbol `Γ` of a differential algebra: `[D_μ, ∂_a] = Γ^b_{μa} ∂_b`.
///
/// Only the free jet algebra ships an implementation; the trait is the
/// hook for algebras with constraints, and for test fixtures.
pub trait Connection {
    /// The nonzero `(b, Γ^b_{μa})` for fixed `μ` and `a`.
    fn commutator_terms(&self, mu: usize, a: &JetVar) -> Vec<(JetVar, DiffFunction)>;

    /// The nonzero `(a, Γ^b_{μa})` for fixed `μ` and `b`, or `None` when the
    /// column has more than `limit` entries.
    fn column(&self, mu: usize, b: &JetVar, limit: usize) -> Option<Vec<(JetVar, DiffFunction)>>;
}

/// `[D_μ, ∂_{u^α_i}] = −∂_{u^α_{i−(μ)}}`, zero when `i^μ = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FreeConnection;

impl Connection for FreeConnection {
    fn commutator_terms(&self, mu: usize, a: &JetVar) -> Vec<(JetVar, DiffFunction)> {
        match a.index.decremented(mu) {
            Some(lower) => alloc::vec![(JetVar::new(a.dep, lower), DiffFunction::integer(-1))],
            None => Vec::new(),
        }
    }

    fn column(&self, mu: usize, b: &JetVar, _limit: usize) -> Option<Vec<(JetVar, DiffFunction)>> {
        Some(alloc::vec![(b.shifted(mu), DiffFunction::integer(-1))])
    }
}
