//! The variational corner of the free jet algebra: the Euler operator,
//! functionals modulo divergences, and the maps `j`, `j*`, `∇`, `∇*`.
//!
//! Index conventions: a [`JetVector`] holds `φ^α_i`, a [`JetCovector`]
//! holds `f^i_α`, and a [`JetMatrix`] holds `η^α_{μi}` or `χ^{μi}_α`, keyed
//! by `(μ, u^α_i)`. All of them are finitely supported maps; absent keys
//! are zero.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::diffops::Current;
use crate::jetalgebra::{minus_d_sum, Characteristic, DerivativeCache, DiffFunction, JetVar, MultiIndex, Signature};

/// `f = (f_α) ∈ E* = F_A`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Covector(pub Vec<DiffFunction>);

impl Covector {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(DiffFunction::is_zero)
    }
}

impl Deref for Covector {
    type Target = [DiffFunction];

    fn deref(&self) -> &[DiffFunction] {
        &self.0
    }
}

impl From<Vec<DiffFunction>> for Covector {
    fn from(v: Vec<DiffFunction>) -> Self {
        Covector(v)
    }
}

/// `δ_α L = Σ_i (−D)^i ∂_{u^α_i} L`.
pub fn euler_component(l: &DiffFunction, alpha: usize) -> DiffFunction {
    let parts: BTreeMap<MultiIndex, DiffFunction> = l
        .jet_support()
        .into_iter()
        .filter(|v| v.dep == alpha)
        .map(|v| {
            let d = l.partial_jet(&v);
            (v.index, d)
        })
        .collect();
    minus_d_sum(parts)
}

/// The Euler operator with respect to every dependent id of `sig`.
pub fn euler(l: &DiffFunction, sig: &Signature) -> Covector {
    Covector((0..sig.dep_count()).map(|a| euler_component(l, a)).collect())
}

/// Whether `L ∈ Div F^M`, decided by the vanishing of every Euler component.
pub fn is_divergence(l: &DiffFunction, sig: &Signature) -> bool {
    if l.is_x_only() {
        return true;
    }
    let deps: alloc::collections::BTreeSet<usize> = l.jet_support().into_iter().map(|v| v.dep).collect();
    debug_assert!(deps.iter().all(|&a| a < sig.dep_count()));
    deps.into_iter().all(|a| euler_component(l, a).is_zero())
}

/// A class `∫L = L + Div F^M`. Representatives are not unique.
#[derive(Clone, Debug, Default)]
pub struct Functional {
    rep: DiffFunction,
}

impl Functional {
    pub fn new(rep: DiffFunction) -> Self {
        Functional { rep }
    }

    pub fn rep(&self) -> &DiffFunction {
        &self.rep
    }

    pub fn into_rep(self) -> DiffFunction {
        self.rep
    }

    /// `∫K = ∫L` iff `K − L` is a divergence.
    pub fn equals(&self, other: &Functional, sig: &Signature) -> bool {
        is_divergence(&(&self.rep - &other.rep), sig)
    }

    pub fn is_zero(&self, sig: &Signature) -> bool {
        is_divergence(&self.rep, sig)
    }
}

impl From<DiffFunction> for Functional {
    fn from(rep: DiffFunction) -> Self {
        Functional { rep }
    }
}

pub fn functional_equal(k: &Functional, l: &Functional, sig: &Signature) -> bool {
    k.equals(l, sig)
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, DiffFunction>, key: K, value: DiffFunction) {
    if value.is_zero() {
        return;
    }
    let slot = map.entry(key).or_default();
    *slot += value;
}

fn prune<K: Ord>(map: &mut BTreeMap<K, DiffFunction>) {
    map.retain(|_, v| !v.is_zero());
}

/// Anything that yields components `φ^α_i`.
pub trait JetField {
    fn component(&self, v: &JetVar) -> DiffFunction;
}

/// `φ = (φ^α_i) ∈ F^A_𝕀`, finitely supported.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct JetVector(pub BTreeMap<JetVar, DiffFunction>);

/// `f = (f^i_α) ∈ ōF^𝕀_A`, finitely supported.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct JetCovector(pub BTreeMap<JetVar, DiffFunction>);

/// Tensors indexed by `(μ, u^α_i)`: `η ∈ F^A_{M𝕀}` and `χ ∈ ōF^{M𝕀}_A`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct JetMatrix(pub BTreeMap<(usize, JetVar), DiffFunction>);

macro_rules! sparse_common {
    ($ty:ty, $key:ty) => {
        impl $ty {
            pub fn new() -> Self {
                Self(BTreeMap::new())
            }

            pub fn is_zero(&self) -> bool {
                self.0.values().all(DiffFunction::is_zero)
            }

            pub fn insert(&mut self, key: $key, value: DiffFunction) {
                accumulate(&mut self.0, key, value);
                prune(&mut self.0);
            }

            pub fn get(&self, key: &$key) -> DiffFunction {
                self.0.get(key).cloned().unwrap_or_default()
            }

            /// Component-wise difference.
            pub fn minus(&self, other: &Self) -> Self {
                let mut out = self.0.clone();
                for (k, v) in &other.0 {
                    accumulate(&mut out, k.clone(), -v);
                }
                prune(&mut out);
                Self(out)
            }
        }

        impl FromIterator<($key, DiffFunction)> for $ty {
            fn from_iter<T: IntoIterator<Item = ($key, DiffFunction)>>(iter: T) -> Self {
                let mut out = BTreeMap::new();
                for (k, v) in iter {
                    accumulate(&mut out, k, v);
                }
                prune(&mut out);
                Self(out)
            }
        }
    };
}

sparse_common!(JetVector, JetVar);
sparse_common!(JetCovector, JetVar);
sparse_common!(JetMatrix, (usize, JetVar));

impl JetField for JetVector {
    fn component(&self, v: &JetVar) -> DiffFunction {
        self.get(v)
    }
}

impl JetCovector {
    /// `⟨f, φ⟩ = f^i_α · φ^α_i`.
    pub fn pair(&self, phi: &impl JetField) -> DiffFunction {
        self.0.iter().map(|(v, f)| f * &phi.component(v)).sum()
    }

    /// `∂L = (∂_{u^α_i} L)`, the vertical gradient.
    pub fn gradient(l: &DiffFunction) -> JetCovector {
        l.jet_support().into_iter().map(|v| {
            let d = l.partial_jet(&v);
            (v, d)
        }).collect()
    }
}

impl JetMatrix {
    /// `⟨χ, η⟩ = χ^{μi}_α · η^α_{μi}`.
    pub fn pair(&self, eta: &JetMatrix) -> DiffFunction {
        self.0.iter().map(|(k, c)| c * &eta.get(k)).sum()
    }
}

/// The prolongation `jφ = (D^iφ^α)`, materialized on demand.
#[derive(Clone, Debug)]
pub struct Prolongation {
    phi: Characteristic,
}

impl Prolongation {
    pub fn characteristic(&self) -> &Characteristic {
        &self.phi
    }

    /// The components on a caller-declared support.
    pub fn materialize<'a>(&self, support: impl IntoIterator<Item = &'a JetVar>) -> JetVector {
        let mut caches: Vec<DerivativeCache> = self.phi.iter().map(|p| DerivativeCache::new(p.clone())).collect();
        let count = caches.len();
        support
            .into_iter()
            .filter(|v| v.dep < count)
            .map(|v| (v.clone(), caches[v.dep].get(&v.index).clone()))
            .collect()
    }

    /// The components `u^α_i` with `|i| ≤ order`, for every `α` of `φ`.
    pub fn up_to_order(&self, m: usize, order: u32) -> JetVector {
        let support: Vec<JetVar> = (0..self.phi.len())
            .flat_map(|a| (0..=order).flat_map(move |n| MultiIndex::of_order(m, n)).map(move |i| JetVar::new(a, i)))
            .collect();
        self.materialize(&support)
    }
}

impl JetField for Prolongation {
    fn component(&self, v: &JetVar) -> DiffFunction {
        self.phi.get(v.dep).map(|p| p.total_derivative(&v.index)).unwrap_or_default()
    }
}

/// `j: E → F^A_𝕀`, `φ^α_i = D^iφ^α`.
pub fn j_prolong(phi: &Characteristic) -> Prolongation {
    Prolongation { phi: phi.clone() }
}

/// `η^α_{μi} = D_μφ^α_i − φ^α_{i+(μ)}` on the whole (finite) support of `η`.
pub fn nabla(phi: &JetVector, m: usize) -> JetMatrix {
    let mut targets: alloc::collections::BTreeSet<(usize, JetVar)> = alloc::collections::BTreeSet::new();
    for v in phi.0.keys() {
        for mu in 0..m {
            targets.insert((mu, v.clone()));
            if let Some(lower) = v.index.decremented(mu) {
                targets.insert((mu, JetVar::new(v.dep, lower)));
            }
        }
    }
    nabla_at(phi, targets)
}

/// `η^α_{μi}` at the requested `(μ, u^α_i)` only.
pub fn nabla_at(field: &impl JetField, targets: impl IntoIterator<Item = (usize, JetVar)>) -> JetMatrix {
    targets
        .into_iter()
        .map(|(mu, v)| {
            let eta = field.component(&v).total_d(mu) - field.component(&v.shifted(mu));
            ((mu, v), eta)
        })
        .collect()
}

/// The Lagrange dual of [`nabla`]:
/// `f^i_α = −D_μχ^{μi}_α − χ^{μ,i−(μ)}_α`.
pub fn nabla_star(chi: &JetMatrix) -> JetCovector {
    let mut out = BTreeMap::new();
    for ((mu, v), c) in &chi.0 {
        accumulate(&mut out, v.clone(), -c.total_d(*mu));
        accumulate(&mut out, v.shifted(*mu), -c);
    }
    prune(&mut out);
    JetCovector(out)
}

/// The current of the Green formula for `∇`: `ψ^μ = χ^{μi}_α·φ^α_i`.
pub fn nabla_green_current(chi: &JetMatrix, phi: &impl JetField, m: usize) -> Current {
    let span = chi.0.keys().map(|(mu, _)| mu + 1).max().unwrap_or(0);
    let mut psi = Current::zero(m.max(span));
    for ((mu, v), c) in &chi.0 {
        psi.0[*mu] += c * &phi.component(v);
    }
    psi
}

/// `j*: ōF^𝕀_A → E*`, `f_α = Σ_i (−D)^i f^i_α`; `n` is the number of dependent ids.
pub fn j_star(f: &JetCovector, n: usize) -> Covector {
    let mut by_dep: Vec<BTreeMap<MultiIndex, DiffFunction>> = alloc::vec![BTreeMap::new(); n];
    for (v, c) in &f.0 {
        if v.dep < n {
            accumulate(&mut by_dep[v.dep], v.index.clone(), c.clone());
        }
    }
    Covector(by_dep.into_iter().map(minus_d_sum).collect())
}

/// Splits `f = g + ∇*χ` with `g^i_α = δ^i_0 (j* f)_α`.
///
/// Each component `f^l_α` is walked down to `l = 0` one step at a time,
/// always lowering the largest direction: `h` at `l` equals `−D_μh` at
/// `l − (μ)` modulo `∇*` of the entry `χ^{μ,l−(μ)}_α = −h`.
pub fn split_covector(f: &JetCovector, n: usize) -> (JetCovector, JetMatrix) {
    let base = j_star(f, n);
    let g: JetCovector = base.0.into_iter().enumerate().map(|(a, c)| (JetVar::base(a), c)).collect();
    let mut chi = BTreeMap::new();
    for (v, c) in &f.0 {
        let mut h = c.clone();
        let mut index = v.index.clone();
        while let Some(mu) = index.last_direction() {
            index = index.decremented(mu).expect("positive exponent");
            accumulate(&mut chi, (mu, JetVar::new(v.dep, index.clone())), -&h);
            h = -h.total_d(mu);
        }
    }
    prune(&mut chi);
    (g, JetMatrix(chi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(i: u32) -> DiffFunction {
        DiffFunction::u(0, &[i])
    }

    fn half() -> crate::Rational {
        crate::Rational::new(1.into(), 2.into())
    }

    fn v(i: u32) -> JetVar {
        JetVar::new(0, MultiIndex::from_exponents(&[i]))
    }

    #[test]
    fn euler_examples() {
        let sig = Signature::scalar();
        assert_eq!(euler(&u(0).pow(2).scale(&half()), &sig).0, alloc::vec![u(0)]);
        assert!(euler(&(&u(0) * &u(1)), &sig).is_zero());
        assert_eq!(euler(&u(1).pow(2).scale(&half()), &sig).0, alloc::vec![-u(2)]);
    }

    #[test]
    fn divergence_examples() {
        let sig = Signature::scalar();
        assert!(is_divergence(&(&u(0) * &u(1)), &sig));
        assert!(!is_divergence(&u(0).pow(2), &sig));
        assert!(is_divergence(&(&(&DiffFunction::x(0) * &u(1)) + &u(0)), &sig));
        assert!(is_divergence(&DiffFunction::integer(5), &sig));
    }

    #[test]
    fn functional_equality_examples() {
        let sig = Signature::scalar();
        let zero = Functional::new(DiffFunction::zero());
        assert!(Functional::new(&u(0) * &u(1)).equals(&zero, &sig));
        assert!(Functional::new(u(1).pow(2)).equals(&Functional::new(-(&u(0) * &u(2))), &sig));
        assert!(!Functional::new(u(0).pow(2)).equals(&zero, &sig));
    }

    #[test]
    fn nabla_examples() {
        let phi = Characteristic(alloc::vec![u(0)]);
        let p = j_prolong(&phi);
        let targets: Vec<(usize, JetVar)> = (0..4).map(|i| (0, v(i))).collect();
        assert!(nabla_at(&p, targets).is_zero());

        let single: JetVector = [(v(0), u(0))].into_iter().collect();
        let eta = nabla(&single, 1);
        assert_eq!(eta.get(&(0, v(0))), u(1));
        assert!(eta.0.len() == 1);
        assert!(nabla(&JetVector::new(), 1).is_zero());
    }

    #[test]
    fn nabla_star_examples() {
        assert!(nabla_star(&JetMatrix::new()).is_zero());
        let k = &u(0) * &u(1);
        let chi: JetMatrix = [((0, v(0)), k.clone())].into_iter().collect();
        let f = nabla_star(&chi);
        assert_eq!(f.get(&v(0)), -k.total_d(0));
        assert_eq!(f.get(&v(1)), -k);
    }

    #[test]
    fn prolongation_examples() {
        let p = j_prolong(&Characteristic(alloc::vec![u(0)]));
        assert_eq!(p.component(&v(2)), u(2));
        assert!(j_prolong(&Characteristic::zero(1)).up_to_order(1, 3).is_zero());
        let sq = j_prolong(&Characteristic(alloc::vec![u(0).pow(2)]));
        assert_eq!(sq.component(&v(1)), (&u(0) * &u(1)).scale_int(2));
    }

    #[test]
    fn j_star_examples() {
        let f0: JetCovector = [(v(0), u(0))].into_iter().collect();
        assert_eq!(j_star(&f0, 1).0, alloc::vec![u(0)]);
        let f1: JetCovector = [(v(1), u(0))].into_iter().collect();
        assert_eq!(j_star(&f1, 1).0, alloc::vec![-u(1)]);
    }

    #[test]
    fn split_examples() {
        let f0: JetCovector = [(v(0), u(3))].into_iter().collect();
        let (g, chi) = split_covector(&f0, 1);
        assert_eq!(g, f0);
        assert!(chi.is_zero());

        let f1: JetCovector = [(v(1), u(0))].into_iter().collect();
        let (g, chi) = split_covector(&f1, 1);
        assert_eq!(g.get(&v(0)), -u(1));
        assert_eq!(chi.get(&(0, v(0))), -u(0));
        assert_eq!(f1.minus(&g), nabla_star(&chi));

        let (g, chi) = split_covector(&JetCovector::new(), 1);
        assert!(g.is_zero() && chi.is_zero());
    }
}
