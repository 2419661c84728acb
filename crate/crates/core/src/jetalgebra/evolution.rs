use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::{Deref, DerefMut};

use super::{DiffFunction, MultiIndex};

/// A characteristic `φ = (φ^α) ∈ E = F^A`, the generator of the evolutionary
/// derivation `ev_φ = D^iφ^α · ∂_{u^α_i}`.
///
/// A characteristic shorter than the signature's dependent set moves only
/// the first `len` dependent families; the rest are left fixed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Characteristic(pub Vec<DiffFunction>);

impl Characteristic {
    pub fn new(components: Vec<DiffFunction>) -> Self {
        Characteristic(components)
    }

    pub fn zero(len: usize) -> Self {
        Characteristic(alloc::vec![DiffFunction::zero(); len])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(DiffFunction::is_zero)
    }
}

impl Deref for Characteristic {
    type Target = [DiffFunction];

    fn deref(&self) -> &[DiffFunction] {
        &self.0
    }
}

impl DerefMut for Characteristic {
    fn deref_mut(&mut self) -> &mut [DiffFunction] {
        &mut self.0
    }
}

impl From<Vec<DiffFunction>> for Characteristic {
    fn from(v: Vec<DiffFunction>) -> Self {
        Characteristic(v)
    }
}

/// Memoized total derivatives `D^i f` of one function.
#[derive(Clone, Debug)]
pub struct DerivativeCache {
    cache: BTreeMap<MultiIndex, DiffFunction>,
}

impl DerivativeCache {
    pub fn new(f: DiffFunction) -> Self {
        let mut cache = BTreeMap::new();
        cache.insert(MultiIndex::zero(), f);
        DerivativeCache { cache }
    }

    pub fn get(&mut self, i: &MultiIndex) -> &DiffFunction {
        if !self.cache.contains_key(i) {
            let mu = i.last_direction().expect("zero index is always cached");
            let lower = i.decremented(mu).expect("positive exponent");
            let next = self.get(&lower).total_d(mu);
            self.cache.insert(i.clone(), next);
        }
        &self.cache[i]
    }
}

/// `ev_φ F = Σ_{α,i} D^iφ^α · ∂_{u^α_i} F`.
///
/// The sum runs over the finite jet support of `F`.
pub fn ev_apply(phi: &[DiffFunction], f: &DiffFunction) -> DiffFunction {
    let mut caches: Vec<Option<DerivativeCache>> = alloc::vec![None; phi.len()];
    let mut out = DiffFunction::zero();
    for v in f.jet_support() {
        if v.dep >= phi.len() || phi[v.dep].is_zero() {
            continue;
        }
        let cache = caches[v.dep].get_or_insert_with(|| DerivativeCache::new(phi[v.dep].clone()));
        let prolonged = cache.get(&v.index);
        if prolonged.is_zero() {
            continue;
        }
        out += prolonged * &f.partial_jet(&v);
    }
    out
}

/// The Lie bracket on characteristics: `ξ^α = ev_φ ψ^α − ev_ψ φ^α`, so that
/// `ev_ξ = [ev_φ, ev_ψ]`.
pub fn characteristic_bracket(phi: &Characteristic, psi: &Characteristic) -> Characteristic {
    let len = phi.len().max(psi.len());
    let zero = DiffFunction::zero();
    let comps = (0..len)
        .map(|a| {
            let p = phi.get(a).unwrap_or(&zero);
            let q = psi.get(a).unwrap_or(&zero);
            ev_apply(phi, q) - ev_apply(psi, p)
        })
        .collect();
    Characteristic(comps)
}
