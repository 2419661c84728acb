//! Mixed forms `Ω^{pq}` of the variational bicomplex in the adapted basis
//! `δu^α_i ∧ ⋯ ∧ dx^μ ∧ ⋯`, with the differentials `d_V` and `d_H`.
//!
//! A wedge monomial is stored with all `δu` factors first, each group
//! strictly increasing; the sign of the reordering goes into the
//! coefficient. Forms evaluate on derivations with the `1/r!`
//! normalization that matches the `1/(q+1)` Cartan formula.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::jetalgebra::{Connection, DiffFunction, FreeConnection, JetVar};
use crate::{Error, Result};

/// Largest vertical degree accepted by the constructors.
pub const MAX_VERTICAL_DEGREE: usize = 3;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
enum Factor {
    Vertical(JetVar),
    Horizontal(usize),
}

/// `δu^{a_1} ∧ ⋯ ∧ δu^{a_p} ∧ dx^{μ_1} ∧ ⋯ ∧ dx^{μ_q}`, both lists strictly increasing.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Default)]
pub struct WedgeBasis {
    vertical: Vec<JetVar>,
    horizontal: Vec<usize>,
}

impl WedgeBasis {
    pub fn vertical(&self) -> &[JetVar] {
        &self.vertical
    }

    pub fn horizontal(&self) -> &[usize] {
        &self.horizontal
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.vertical.len(), self.horizontal.len())
    }

    fn factors(&self) -> impl Iterator<Item = Factor> + '_ {
        self.vertical
            .iter()
            .cloned()
            .map(Factor::Vertical)
            .chain(self.horizontal.iter().map(|&mu| Factor::Horizontal(mu)))
    }

    /// Sorts an ordered factor list; `None` when a factor repeats.
    fn normalize(mut factors: Vec<Factor>) -> Option<(bool, WedgeBasis)> {
        let mut odd = false;
        // Insertion sort, counting transpositions.
        for k in 1..factors.len() {
            let mut j = k;
            while j > 0 && factors[j - 1] > factors[j] {
                factors.swap(j - 1, j);
                odd = !odd;
                j -= 1;
            }
        }
        if factors.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        let mut basis = WedgeBasis::default();
        for f in factors {
            match f {
                Factor::Vertical(v) => basis.vertical.push(v),
                Factor::Horizontal(mu) => basis.horizontal.push(mu),
            }
        }
        Some((odd, basis))
    }
}

/// A sum of `coefficient · basis` of uniform bidegree.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MixedForm {
    terms: BTreeMap<WedgeBasis, DiffFunction>,
}

impl MixedForm {
    pub fn zero() -> Self {
        MixedForm::default()
    }

    /// A `(0, 0)` form.
    pub fn function(f: DiffFunction) -> Self {
        let mut out = MixedForm::zero();
        out.add_basis(WedgeBasis::default(), f);
        out
    }

    /// `δu^α_i`.
    pub fn delta_u(v: JetVar) -> Self {
        MixedForm::monomial(DiffFunction::one(), [v], []).expect("degree 1")
    }

    /// `dx^μ`.
    pub fn dx(mu: usize) -> Self {
        MixedForm::monomial(DiffFunction::one(), [], [mu]).expect("degree 1")
    }

    /// `c · δu^{a_1} ∧ ⋯ ∧ dx^{μ_1} ∧ ⋯` with the factors in the given order.
    pub fn monomial(
        c: DiffFunction,
        vertical: impl IntoIterator<Item = JetVar>,
        horizontal: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let factors: Vec<Factor> = vertical
            .into_iter()
            .map(Factor::Vertical)
            .chain(horizontal.into_iter().map(Factor::Horizontal))
            .collect();
        let p = factors.iter().filter(|f| matches!(f, Factor::Vertical(_))).count();
        if p > MAX_VERTICAL_DEGREE {
            return Err(Error::DegreeCap { degree: p, cap: MAX_VERTICAL_DEGREE });
        }
        let mut out = MixedForm::zero();
        out.add_factors(factors, c);
        Ok(out)
    }

    /// `ϑ̄ = dx^1 ∧ ⋯ ∧ dx^m`.
    pub fn volume(m: usize) -> Self {
        MixedForm::monomial(DiffFunction::one(), [], 0..m).expect("horizontal only")
    }

    /// `ϑ̄_μ = (−1)^μ dx^1 ∧ ⋯ (dx^μ omitted) ⋯ ∧ dx^m`, `μ` counted from zero,
    /// so that `dx^μ ∧ ϑ̄_ν = δ^μ_ν ϑ̄`.
    pub fn volume_without(m: usize, mu: usize) -> Self {
        let sign = if mu.is_multiple_of(2) { 1 } else { -1 };
        MixedForm::monomial(DiffFunction::integer(sign), [], (0..m).filter(|&k| k != mu)).expect("horizontal only")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(p, q)`; `None` for the zero form.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        self.terms.keys().next().map(WedgeBasis::bidegree)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WedgeBasis, &DiffFunction)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, basis: &WedgeBasis) -> DiffFunction {
        self.terms.get(basis).cloned().unwrap_or_default()
    }

    /// The coefficient of the monomial with the given (already sorted or not) factors.
    pub fn coefficient_of(&self, vertical: &[JetVar], horizontal: &[usize]) -> DiffFunction {
        let factors = vertical
            .iter()
            .cloned()
            .map(Factor::Vertical)
            .chain(horizontal.iter().map(|&mu| Factor::Horizontal(mu)))
            .collect();
        match WedgeBasis::normalize(factors) {
            Some((odd, basis)) => {
                let c = self.coefficient(&basis);
                if odd {
                    -c
                } else {
                    c
                }
            }
            None => DiffFunction::zero(),
        }
    }

    fn add_basis(&mut self, basis: WedgeBasis, c: DiffFunction) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(basis.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&basis);
        }
    }

    fn add_factors(&mut self, factors: Vec<Factor>, c: DiffFunction) {
        if let Some((odd, basis)) = WedgeBasis::normalize(factors) {
            self.add_basis(basis, if odd { -c } else { c });
        }
    }

    pub fn checked_add(&self, other: &MixedForm) -> Result<MixedForm> {
        if let (Some(l), Some(r)) = (self.bidegree(), other.bidegree()) {
            if l != r {
                return Err(Error::BidegreeMismatch { left: l, right: r });
            }
        }
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_basis(b.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MixedForm) -> Result<MixedForm> {
        self.checked_add(&other.scale(&DiffFunction::integer(-1)))
    }

    /// Multiplies every coefficient by `f`.
    pub fn scale(&self, f: &DiffFunction) -> MixedForm {
        let mut out = MixedForm::zero();
        for (b, c) in &self.terms {
            out.add_basis(b.clone(), c * f);
        }
        out
    }

    /// The graded-commutative exterior product.
    pub fn wedge(&self, other: &MixedForm) -> MixedForm {
        let mut out = MixedForm::zero();
        for (ba, ca) in &self.terms {
            for (bb, cb) in &other.terms {
                let factors = ba.factors().chain(bb.factors()).collect();
                out.add_factors(factors, ca * cb);
            }
        }
        out
    }

    /// `d_V`: `d_V L = ∂_a L·δu^a`, `d_V δu^a = 0`, `d_V dx^μ = 0`.
    pub fn d_v(&self) -> MixedForm {
        let mut out = MixedForm::zero();
        for (b, c) in &self.terms {
            for v in c.jet_support() {
                let d = c.partial_jet(&v);
                let factors = core::iter::once(Factor::Vertical(v)).chain(b.factors()).collect();
                out.add_factors(factors, d);
            }
        }
        out
    }

    /// `d_H` on the free jet algebra with `m` independent variables.
    pub fn d_h(&self, m: usize) -> MixedForm {
        self.d_h_with(m, &FreeConnection)
    }

    /// `d_H L = D_μL·dx^μ`, `d_H δu^a = Γ^a_{μb}·δu^b ∧ dx^μ`, `d_H dx^μ = 0`.
    pub fn d_h_with(&self, m: usize, gamma: &impl Connection) -> MixedForm {
        let mut out = MixedForm::zero();
        for (b, c) in &self.terms {
            for mu in 0..m {
                let factors = core::iter::once(Factor::Horizontal(mu)).chain(b.factors()).collect();
                out.add_factors(factors, c.total_d(mu));
            }
            let factors: Vec<Factor> = b.factors().collect();
            for (k, a) in b.vertical.iter().enumerate() {
                // Graded Leibniz: the k-th factor is odd, preceded by k odd factors.
                let sign = if k % 2 == 0 { 1 } else { -1 };
                for mu in 0..m {
                    let Some(column) = gamma.column(mu, a, usize::MAX) else { continue };
                    for (target, g) in column {
                        let mut replaced: Vec<Factor> = Vec::with_capacity(factors.len() + 1);
                        replaced.extend_from_slice(&factors[..k]);
                        replaced.push(Factor::Vertical(target));
                        replaced.push(Factor::Horizontal(mu));
                        replaced.extend_from_slice(&factors[k + 1..]);
                        out.add_factors(replaced, (&g * c).scale_int(sign));
                    }
                }
            }
        }
        out
    }

    /// `ω(X_1, …, X_r)` with `r = p + q`: each basis monomial evaluates to
    /// the determinant of its factors on the fields, divided by `r!`.
    pub fn eval(&self, fields: &[Derivation]) -> Result<DiffFunction> {
        let Some((p, q)) = self.bidegree() else {
            return Ok(DiffFunction::zero());
        };
        if fields.len() != p + q {
            return Err(Error::Arity { expected: p + q, found: fields.len() });
        }
        let r = fields.len();
        let perms = permutations(r);
        let factorial: i64 = (1..=r as i64).product();
        let mut out = DiffFunction::zero();
        for (b, c) in &self.terms {
            let rows: Vec<Vec<DiffFunction>> = b
                .factors()
                .map(|f| fields.iter().map(|x| x.pair_with(&f)).collect())
                .collect();
            let mut det = DiffFunction::zero();
            for (perm, odd) in &perms {
                let mut prod = DiffFunction::one();
                for (k, &s) in perm.iter().enumerate() {
                    prod = &prod * &rows[k][s];
                    if prod.is_zero() {
                        break;
                    }
                }
                if *odd {
                    det -= prod;
                } else {
                    det += prod;
                }
            }
            out += &det * c;
        }
        Ok(out.scale(&crate::Rational::new(1.into(), factorial.into())))
    }
}

fn permutations(r: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = alloc::vec![(Vec::new(), false)];
    for n in 0..r {
        let mut next = Vec::new();
        for (perm, odd) in &out {
            for pos in 0..=n {
                let mut p: Vec<usize> = perm.clone();
                p.insert(pos, n);
                // Inserting n at `pos` passes over n - pos larger-indexed slots.
                let flips = (n - pos) % 2 == 1;
                next.push((p, *odd ^ flips));
            }
        }
        out = next;
    }
    out
}

/// A finitely supported derivation `X = X^a ∂_a + c^μ D_μ`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Derivation {
    pub vertical: BTreeMap<JetVar, DiffFunction>,
    pub horizontal: Vec<DiffFunction>,
}

impl Derivation {
    pub fn vertical(parts: impl IntoIterator<Item = (JetVar, DiffFunction)>) -> Self {
        let mut vertical = BTreeMap::new();
        for (v, c) in parts {
            if !c.is_zero() {
                vertical.insert(v, c);
            }
        }
        Derivation { vertical, horizontal: Vec::new() }
    }

    /// `D_μ`.
    pub fn total(mu: usize, m: usize) -> Self {
        let mut horizontal = alloc::vec![DiffFunction::zero(); m];
        horizontal[mu] = DiffFunction::one();
        Derivation { vertical: BTreeMap::new(), horizontal }
    }

    fn pair_with(&self, f: &Factor) -> DiffFunction {
        match f {
            Factor::Vertical(v) => self.vertical.get(v).cloned().unwrap_or_default(),
            Factor::Horizontal(mu) => self.horizontal.get(*mu).cloned().unwrap_or_default(),
        }
    }

    /// `X f`.
    pub fn apply(&self, f: &DiffFunction) -> DiffFunction {
        let mut out = DiffFunction::zero();
        for (v, c) in &self.vertical {
            out += c * &f.partial_jet(v);
        }
        for (mu, c) in self.horizontal.iter().enumerate() {
            if !c.is_zero() {
                out += c * &f.total_d(mu);
            }
        }
        out
    }

    /// `[X, Y]`, expanded in the basis `{∂_a, D_μ}` through `Γ`.
    pub fn bracket(&self, other: &Derivation, gamma: &impl Connection) -> Derivation {
        let mut vertical: BTreeMap<JetVar, DiffFunction> = BTreeMap::new();
        let mut add = |v: JetVar, c: DiffFunction| {
            if !c.is_zero() {
                *vertical.entry(v).or_default() += c;
            }
        };
        for (v, c) in &other.vertical {
            add(v.clone(), self.apply(c));
        }
        for (v, c) in &self.vertical {
            add(v.clone(), -other.apply(c));
        }
        // c^μ Y^b [D_μ, ∂_b] − e^ν X^a [D_ν, ∂_a]
        for (mu, c) in self.horizontal.iter().enumerate() {
            for (b, y) in &other.vertical {
                for (target, g) in gamma.commutator_terms(mu, b) {
                    add(target, &(c * y) * &g);
                }
            }
        }
        for (nu, e) in other.horizontal.iter().enumerate() {
            for (a, x) in &self.vertical {
                for (target, g) in gamma.commutator_terms(nu, a) {
                    add(target, -(&(e * x) * &g));
                }
            }
        }
        vertical.retain(|_, c| !c.is_zero());
        let m = self.horizontal.len().max(other.horizontal.len());
        let zero = DiffFunction::zero();
        let horizontal = (0..m)
            .map(|mu| {
                let e = other.horizontal.get(mu).unwrap_or(&zero);
                let c = self.horizontal.get(mu).unwrap_or(&zero);
                self.apply(e) - other.apply(c)
            })
            .collect();
        Derivation { vertical, horizontal }
    }
}
