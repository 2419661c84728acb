//! Matrix differential operators `P(D) = P_i·D^i ∈ F^A_B[D]`.
//!
//! Operators are kept in normal form: coefficients to the left of the `D`
//! powers, one term per multi-index per entry, and no zero coefficients or
//! empty entries. Composition and adjoints re-normalize immediately, so
//! operator identities such as `Λ* = −Λ` are structural comparisons.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Deref, Neg, Sub};

use num_rational::BigRational;

use crate::jetalgebra::{ev_apply, DerivativeCache, DiffFunction, MultiIndex, Signature};
use crate::{Error, Result};

/// `Σ_i c_i·D^i` for one matrix entry.
pub type ScalarOperator = BTreeMap<MultiIndex, DiffFunction>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DiffOperator {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), ScalarOperator>,
}

/// A current `ψ = (ψ^μ) ∈ F^M`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Current(pub Vec<DiffFunction>);

impl Current {
    pub fn zero(m: usize) -> Self {
        Current(alloc::vec![DiffFunction::zero(); m])
    }

    /// `Div ψ = D_μ ψ^μ`.
    pub fn divergence(&self) -> DiffFunction {
        self.0.iter().enumerate().map(|(mu, p)| p.total_d(mu)).sum()
    }
}

impl Deref for Current {
    type Target = [DiffFunction];

    fn deref(&self) -> &[DiffFunction] {
        &self.0
    }
}

fn add_into(entry: &mut ScalarOperator, i: MultiIndex, c: DiffFunction) {
    if c.is_zero() {
        return;
    }
    match entry.entry(i) {
        alloc::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        alloc::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn rational_of(n: num_bigint::BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// `p ∘ q` by `D^i ∘ f = Σ_{k≤i} binom(i,k) (D^k f)·D^{i−k}`.
fn compose_scalar(p: &ScalarOperator, q: &ScalarOperator) -> ScalarOperator {
    let mut out = ScalarOperator::new();
    let mut caches: Vec<DerivativeCache> = q.values().map(|c| DerivativeCache::new(c.clone())).collect();
    for (i, pi) in p {
        let lower = i.lower_set();
        for ((j, _), cache) in q.iter().zip(caches.iter_mut()) {
            for k in &lower {
                let dk = cache.get(k);
                if dk.is_zero() {
                    continue;
                }
                let coeff = (pi * dk).scale(&rational_of(i.binomial(k)));
                let rest = i.checked_sub(k).expect("k ≤ i");
                add_into(&mut out, &rest + j, coeff);
            }
        }
    }
    out
}

/// `Σ_i (−D)^i ∘ p_i`, normal-ordered.
fn adjoint_scalar(p: &ScalarOperator) -> ScalarOperator {
    let mut out = ScalarOperator::new();
    for (i, pi) in p {
        let sign: i64 = if i.order() % 2 == 0 { 1 } else { -1 };
        let mut cache = DerivativeCache::new(pi.clone());
        for k in i.lower_set() {
            let dk = cache.get(&k);
            if dk.is_zero() {
                continue;
            }
            let coeff = dk.scale(&rational_of(i.binomial(&k) * sign));
            add_into(&mut out, i.checked_sub(&k).expect("k ≤ i"), coeff);
        }
    }
    out
}

impl DiffOperator {
    pub fn zero(rows: usize, cols: usize) -> Self {
        DiffOperator { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        DiffOperator::diagonal(n, &DiffOperator::scalar_entry(MultiIndex::zero(), DiffFunction::one()))
    }

    /// The same scalar operator on every diagonal slot.
    pub fn diagonal(n: usize, entry: &ScalarOperator) -> Self {
        let mut out = DiffOperator::zero(n, n);
        for a in 0..n {
            out.set_entry(a, a, entry.clone());
        }
        out
    }

    fn scalar_entry(i: MultiIndex, c: DiffFunction) -> ScalarOperator {
        let mut e = ScalarOperator::new();
        add_into(&mut e, i, c);
        e
    }

    /// The 1×1 operator `c·D^i`.
    pub fn monomial(c: DiffFunction, i: MultiIndex) -> Self {
        let mut out = DiffOperator::zero(1, 1);
        out.set_entry(0, 0, DiffOperator::scalar_entry(i, c));
        out
    }

    /// The 1×1 operator `D_μ`.
    pub fn total_d(mu: usize) -> Self {
        DiffOperator::monomial(DiffFunction::one(), MultiIndex::unit(mu))
    }

    /// The 1×1 multiplication operator by `f`.
    pub fn multiplication(f: DiffFunction) -> Self {
        DiffOperator::monomial(f, MultiIndex::zero())
    }

    /// Builds an operator from `(row, col, i, coefficient)` terms; repeated
    /// positions are summed.
    pub fn from_terms(
        rows: usize,
        cols: usize,
        terms: impl IntoIterator<Item = (usize, usize, MultiIndex, DiffFunction)>,
    ) -> Result<Self> {
        let mut out = DiffOperator::zero(rows, cols);
        for (a, b, i, c) in terms {
            if a >= rows {
                return Err(Error::DimensionMismatch { expected: rows, found: a + 1 });
            }
            if b >= cols {
                return Err(Error::DimensionMismatch { expected: cols, found: b + 1 });
            }
            let entry = out.entries.entry((a, b)).or_default();
            add_into(entry, i, c);
        }
        out.entries.retain(|_, e| !e.is_empty());
        Ok(out)
    }

    /// Replaces entry `(a, b)`; an empty operator clears it.
    pub fn set_entry(&mut self, a: usize, b: usize, mut entry: ScalarOperator) {
        assert!(a < self.rows && b < self.cols, "entry ({a}, {b}) outside {}x{}", self.rows, self.cols);
        entry.retain(|_, c| !c.is_zero());
        if entry.is_empty() {
            self.entries.remove(&(a, b));
        } else {
            self.entries.insert((a, b), entry);
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, a: usize, b: usize) -> Option<&ScalarOperator> {
        self.entries.get(&(a, b))
    }

    /// Nonempty entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &ScalarOperator)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    /// All `(a, b, i, P^{ab}_i)` terms.
    pub fn coefficients(&self) -> impl Iterator<Item = (usize, usize, &MultiIndex, &DiffFunction)> {
        self.entries
            .iter()
            .flat_map(|(&(a, b), e)| e.iter().map(move |(i, c)| (a, b, i, c)))
    }

    /// Largest `|i|` present; `None` for the zero operator.
    pub fn order(&self) -> Option<u32> {
        self.coefficients().map(|(_, _, i, _)| i.order()).max()
    }

    fn map_coefficients(&self, mut f: impl FnMut(&DiffFunction) -> DiffFunction) -> Self {
        let mut out = DiffOperator::zero(self.rows, self.cols);
        for (&(a, b), e) in &self.entries {
            let mapped: ScalarOperator = e.iter().map(|(i, c)| (i.clone(), f(c))).collect();
            out.set_entry(a, b, mapped);
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        self.map_coefficients(|f| f.scale(c))
    }

    /// `P ∘ Q`, normal-ordered.
    pub fn compose(&self, other: &DiffOperator) -> Result<DiffOperator> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = DiffOperator::zero(self.rows, other.cols);
        for (&(a, b), p) in &self.entries {
            for c in 0..other.cols {
                let Some(q) = other.entries.get(&(b, c)) else { continue };
                let prod = compose_scalar(p, q);
                let slot = out.entries.entry((a, c)).or_default();
                for (i, coeff) in prod {
                    add_into(slot, i, coeff);
                }
            }
        }
        out.entries.retain(|_, e| !e.is_empty());
        Ok(out)
    }

    /// The Lagrange adjoint: `(P*)^{ba} = (−D)^i ∘ P^{ab}_i`, normal-ordered.
    pub fn adjoint(&self) -> DiffOperator {
        let mut out = DiffOperator::zero(self.cols, self.rows);
        for (&(a, b), p) in &self.entries {
            out.set_entry(b, a, adjoint_scalar(p));
        }
        out
    }

    /// `Λ* + Λ = 0` in normal form.
    pub fn is_skew_adjoint(&self) -> bool {
        self.is_square() && (&self.adjoint() + self).is_zero()
    }

    /// `(P g)^a = P^{ab}_i · D^i g_b`.
    pub fn apply(&self, g: &[DiffFunction]) -> Result<Vec<DiffFunction>> {
        if g.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: g.len() });
        }
        let mut caches: Vec<Option<DerivativeCache>> = alloc::vec![None; self.cols];
        let mut out = alloc::vec![DiffFunction::zero(); self.rows];
        for (&(a, b), p) in &self.entries {
            if g[b].is_zero() {
                continue;
            }
            let cache = caches[b].get_or_insert_with(|| DerivativeCache::new(g[b].clone()));
            for (i, c) in p {
                out[a] += c * cache.get(i);
            }
        }
        Ok(out)
    }

    /// The Fréchet derivative of `L` as a `1 × n` row operator:
    /// `L_* φ = Σ_{α,i} (∂_{u^α_i} L)·D^i φ^α`.
    pub fn frechet(l: &DiffFunction, n: usize) -> DiffOperator {
        let mut out = DiffOperator::zero(1, n);
        for v in l.jet_support() {
            if v.dep >= n {
                continue;
            }
            let d = l.partial_jet(&v);
            let slot = out.entries.entry((0, v.dep)).or_default();
            add_into(slot, v.index.clone(), d);
        }
        out.entries.retain(|_, e| !e.is_empty());
        out
    }

    /// `[ev_φ, P]`: `ev_φ` applied to every coefficient.
    pub fn ev_on_operator(&self, phi: &[DiffFunction]) -> DiffOperator {
        self.map_coefficients(|c| ev_apply(phi, c))
    }

    /// A current `ψ` with `⟨f, P g⟩ − ⟨P* f, g⟩ = Div ψ`.
    ///
    /// Built by integrating each term `K·D^i h` by parts, peeling the
    /// largest direction first: `K·D_μ h' = D_μ(K·h') − (D_μK)·h'`.
    pub fn green_current(&self, f: &[DiffFunction], g: &[DiffFunction], m: usize) -> Result<Current> {
        if f.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: f.len() });
        }
        if g.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: g.len() });
        }
        let span = self.coefficients().map(|(_, _, i, _)| i.span()).max().unwrap_or(0);
        let mut psi = Current::zero(m.max(span));
        let mut caches: Vec<Option<DerivativeCache>> = alloc::vec![None; self.cols];
        for (&(a, b), p) in &self.entries {
            if f[a].is_zero() || g[b].is_zero() {
                continue;
            }
            let cache = caches[b].get_or_insert_with(|| DerivativeCache::new(g[b].clone()));
            for (i, c) in p {
                let mut k = &f[a] * c;
                let mut rest = i.clone();
                while let Some(mu) = rest.last_direction() {
                    rest = rest.decremented(mu).expect("positive exponent");
                    psi.0[mu] += &k * cache.get(&rest);
                    k = -k.total_d(mu);
                }
            }
        }
        Ok(psi)
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        OperatorDisplay { op: self, sig }
    }
}

/// `⟨f, g⟩ = Σ f_a · g^a`.
pub fn pairing(f: &[DiffFunction], g: &[DiffFunction]) -> DiffFunction {
    f.iter().zip(g).map(|(a, b)| a * b).sum()
}

impl Add for &DiffOperator {
    type Output = DiffOperator;

    fn add(self, rhs: &DiffOperator) -> DiffOperator {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "operator shapes differ");
        let mut out = self.clone();
        for (&k, e) in &rhs.entries {
            let slot = out.entries.entry(k).or_default();
            for (i, c) in e {
                add_into(slot, i.clone(), c.clone());
            }
        }
        out.entries.retain(|_, e| !e.is_empty());
        out
    }
}

impl Neg for &DiffOperator {
    type Output = DiffOperator;

    fn neg(self) -> DiffOperator {
        self.map_coefficients(|c| -c)
    }
}

impl Sub for &DiffOperator {
    type Output = DiffOperator;

    fn sub(self, rhs: &DiffOperator) -> DiffOperator {
        self + &(-rhs)
    }
}

struct OperatorDisplay<'a> {
    op: &'a DiffOperator,
    sig: &'a Signature,
}

fn render_entry(entry: &ScalarOperator, sig: &Signature) -> String {
    use alloc::string::ToString;
    if entry.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (i, c)) in entry.iter().rev().enumerate() {
        let mut coeff = c.display(sig).to_string();
        let mut negative = false;
        if c.len() == 1 && coeff.starts_with('-') {
            negative = true;
            coeff.remove(0);
        } else if c.len() > 1 {
            coeff = alloc::format!("({coeff})");
        }
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mut parts: Vec<String> = Vec::new();
        if i.is_zero() || coeff != "1" {
            parts.push(coeff);
        }
        for (mu, e) in i.iter() {
            let base = if sig.m() == 1 { "D".into() } else { alloc::format!("D{}", mu + 1) };
            parts.push(if e == 1 { base } else { alloc::format!("{base}^{e}") });
        }
        out.push_str(&parts.join("*"));
    }
    out
}

impl fmt::Display for OperatorDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let empty = ScalarOperator::new();
        if self.op.rows == 1 && self.op.cols == 1 {
            return f.write_str(&render_entry(self.op.entry(0, 0).unwrap_or(&empty), self.sig));
        }
        f.write_str("[")?;
        for a in 0..self.op.rows {
            if a > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for b in 0..self.op.cols {
                if b > 0 {
                    f.write_str(", ")?;
                }
                f.write_str(&render_entry(self.op.entry(a, b).unwrap_or(&empty), self.sig))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}
