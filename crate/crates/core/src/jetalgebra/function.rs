use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{MultiIndex, Signature};

pub type Rational = BigRational;

/// The jet variable `u^α_i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct JetVar {
    pub dep: usize,
    pub index: MultiIndex,
}

impl JetVar {
    pub fn new(dep: usize, index: MultiIndex) -> Self {
        JetVar { dep, index }
    }

    /// `u^α = u^α_0`.
    pub fn base(dep: usize) -> Self {
        JetVar { dep, index: MultiIndex::zero() }
    }

    /// `u^α_{i+(μ)}`.
    pub fn shifted(&self, mu: usize) -> Self {
        JetVar { dep: self.dep, index: self.index.incremented(mu) }
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        JetVarDisplay { var: self, sig }
    }
}

struct JetVarDisplay<'a> {
    var: &'a JetVar,
    sig: &'a Signature,
}

impl fmt::Display for JetVarDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sig.dependent().get(self.var.dep) {
            Some(name) => f.write_str(name)?,
            None => write!(f, "u#{}", self.var.dep)?,
        }
        if self.var.index.is_zero() {
            return Ok(());
        }
        f.write_str("[")?;
        for (k, e) in self.var.index.to_dense(self.sig.m()).iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}

/// A power product `x^e · Π (u^α_i)^p`.
///
/// Monomials compare by total degree, then by the `x` exponents, then by
/// the jet factors (ordered by dependent id and graded multi-index).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial {
    degree: u32,
    x: MultiIndex,
    jets: Vec<(JetVar, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn new(x: MultiIndex, jets: impl IntoIterator<Item = (JetVar, u32)>) -> Self {
        let mut map: BTreeMap<JetVar, u32> = BTreeMap::new();
        for (v, p) in jets {
            if p > 0 {
                *map.entry(v).or_insert(0) += p;
            }
        }
        let jets: Vec<(JetVar, u32)> = map.into_iter().collect();
        let degree = x.order() + jets.iter().map(|(_, p)| p).sum::<u32>();
        Monomial { degree, x, jets }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn x_exponents(&self) -> &MultiIndex {
        &self.x
    }

    pub fn jets(&self) -> &[(JetVar, u32)] {
        &self.jets
    }

    pub fn power_of(&self, v: &JetVar) -> u32 {
        match self.jets.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(pos) => self.jets[pos].1,
            Err(_) => 0,
        }
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut jets = Vec::with_capacity(self.jets.len() + other.jets.len());
        let (mut a, mut b) = (self.jets.iter().peekable(), other.jets.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => jets.push(a.next().unwrap().clone()),
                (None, Some(_)) => jets.push(b.next().unwrap().clone()),
                (Some((va, pa)), Some((vb, pb))) => match va.cmp(vb) {
                    core::cmp::Ordering::Less => jets.push(a.next().unwrap().clone()),
                    core::cmp::Ordering::Greater => jets.push(b.next().unwrap().clone()),
                    core::cmp::Ordering::Equal => {
                        jets.push((va.clone(), pa + pb));
                        a.next();
                        b.next();
                    }
                },
            }
        }
        Monomial { degree: self.degree + other.degree, x: &self.x + &other.x, jets }
    }

    /// Lowers the power of the `k`-th jet factor by one.
    fn without_one(&self, k: usize) -> Monomial {
        let mut jets = self.jets.clone();
        if jets[k].1 == 1 {
            jets.remove(k);
        } else {
            jets[k].1 -= 1;
        }
        Monomial { degree: self.degree - 1, x: self.x.clone(), jets }
    }

    fn times_jet(&self, v: &JetVar) -> Monomial {
        self.mul(&Monomial { degree: 1, x: MultiIndex::zero(), jets: alloc::vec![(v.clone(), 1)] })
    }
}

/// A differential polynomial: an element of the computable subalgebra of
/// `F` over exact rationals.
///
/// Terms are kept in a map ordered by [`Monomial`], with no zero
/// coefficients, so the representation is canonical and `==` decides
/// algebraic equality.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct DiffFunction {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffFunction {
    pub fn zero() -> Self {
        DiffFunction::default()
    }

    pub fn one() -> Self {
        DiffFunction::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        DiffFunction::term(c, Monomial::one())
    }

    pub fn integer(n: i64) -> Self {
        DiffFunction::constant(Rational::from_integer(BigInt::from(n)))
    }

    /// `p/q` as a constant. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        DiffFunction::constant(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn term(c: Rational, monomial: Monomial) -> Self {
        let mut out = DiffFunction::zero();
        out.add_term(monomial, c);
        out
    }

    /// The independent variable `x^μ`.
    pub fn x(mu: usize) -> Self {
        DiffFunction::term(Rational::one(), Monomial::new(MultiIndex::unit(mu), []))
    }

    pub fn jet(v: JetVar) -> Self {
        DiffFunction::term(Rational::one(), Monomial::new(MultiIndex::zero(), [(v, 1)]))
    }

    /// `u^α_i` for the dense exponent vector `i`.
    pub fn u(dep: usize, index: &[u32]) -> Self {
        DiffFunction::jet(JetVar::new(dep, MultiIndex::from_exponents(index)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the function is a constant (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree == 0)
    }

    /// Number of terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Adds `c · monomial` in place.
    pub fn add_term(&mut self, monomial: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
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

    pub fn scale(&self, c: &Rational) -> DiffFunction {
        if c.is_zero() {
            return DiffFunction::zero();
        }
        DiffFunction { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn scale_int(&self, n: i64) -> DiffFunction {
        self.scale(&Rational::from_integer(BigInt::from(n)))
    }

    pub fn pow(&self, n: u32) -> DiffFunction {
        let mut acc = DiffFunction::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// The jet variables this function depends on.
    pub fn jet_support(&self) -> BTreeSet<JetVar> {
        self.terms.keys().flat_map(|m| m.jets.iter().map(|(v, _)| v.clone())).collect()
    }

    /// True when no jet variable occurs, i.e. the function depends on `x` only.
    pub fn is_x_only(&self) -> bool {
        self.terms.keys().all(|m| m.jets.is_empty())
    }

    /// Largest `|i|` among the jet variables present.
    pub fn jet_order(&self) -> Option<u32> {
        self.terms.keys().flat_map(|m| m.jets.iter().map(|(v, _)| v.index.order())).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree).max()
    }

    /// Formal `∂/∂x^μ`, every jet variable held fixed.
    pub fn partial_x(&self, mu: usize) -> DiffFunction {
        let mut out = DiffFunction::zero();
        for (m, c) in &self.terms {
            let e = m.x.get(mu);
            if e == 0 {
                continue;
            }
            let lowered = Monomial {
                degree: m.degree - 1,
                x: m.x.decremented(mu).expect("positive exponent"),
                jets: m.jets.clone(),
            };
            out.add_term(lowered, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Formal `∂/∂u^α_i`.
    pub fn partial_jet(&self, v: &JetVar) -> DiffFunction {
        let mut out = DiffFunction::zero();
        for (m, c) in &self.terms {
            if let Ok(k) = m.jets.binary_search_by(|(w, _)| w.cmp(v)) {
                let p = m.jets[k].1;
                out.add_term(m.without_one(k), c * Rational::from_integer(BigInt::from(p)));
            }
        }
        out
    }

    /// The total derivative `D_μ = ∂_{x^μ} + u^α_{i+(μ)} ∂_{u^α_i}`.
    pub fn total_d(&self, mu: usize) -> DiffFunction {
        let mut out = self.partial_x(mu);
        for (m, c) in &self.terms {
            for (k, (v, p)) in m.jets.iter().enumerate() {
                let next = m.without_one(k).times_jet(&v.shifted(mu));
                out.add_term(next, c * Rational::from_integer(BigInt::from(*p)));
            }
        }
        out
    }

    /// `D^i = D_1^{i^1} ⋯ D_m^{i^m}`.
    pub fn total_derivative(&self, i: &MultiIndex) -> DiffFunction {
        let mut out = self.clone();
        for (mu, e) in i.iter() {
            for _ in 0..e {
                out = out.total_d(mu);
            }
        }
        out
    }

    /// `(-D)^i`.
    pub fn minus_total_derivative(&self, i: &MultiIndex) -> DiffFunction {
        let d = self.total_derivative(i);
        if i.order() % 2 == 1 {
            -d
        } else {
            d
        }
    }

    /// Renders in the canonical concrete syntax (bracketed jet subscripts).
    pub fn display<'a>(&'a self, sig: &'a Signature) -> impl fmt::Display + 'a {
        FunctionDisplay { f: self, sig }
    }
}

/// `Σ_i (-D)^i c_i`, evaluated Horner-style one direction at a time.
pub fn minus_d_sum(mut parts: BTreeMap<MultiIndex, DiffFunction>) -> DiffFunction {
    parts.retain(|_, c| !c.is_zero());
    loop {
        let Some(mu) = parts.keys().filter_map(MultiIndex::last_direction).max() else {
            return parts.remove(&MultiIndex::zero()).unwrap_or_default();
        };
        // Group by the index with direction `mu` removed and run Horner in `mu`.
        let mut groups: BTreeMap<MultiIndex, BTreeMap<u32, DiffFunction>> = BTreeMap::new();
        for (i, c) in parts {
            let e = i.get(mu);
            let rest = MultiIndex::from_exponents(&{
                let mut d = i.to_dense(mu + 1);
                d[mu] = 0;
                d
            });
            groups.entry(rest).or_default().insert(e, c);
        }
        parts = BTreeMap::new();
        for (rest, by_power) in groups {
            let top = *by_power.keys().next_back().expect("nonempty group");
            let mut acc = DiffFunction::zero();
            for e in (0..=top).rev() {
                acc = -acc.total_d(mu);
                if let Some(c) = by_power.get(&e) {
                    acc += c;
                }
            }
            parts.insert(rest, acc);
        }
        parts.retain(|_, c| !c.is_zero());
    }
}

struct FunctionDisplay<'a> {
    f: &'a DiffFunction,
    sig: &'a Signature,
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for FunctionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.f.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let mut first = true;
            if m.degree == 0 || !abs.is_one() {
                write_rational(f, &abs)?;
                first = false;
            }
            for (mu, e) in m.x.iter() {
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                match self.sig.independent().get(mu) {
                    Some(name) => f.write_str(name)?,
                    None => write!(f, "x#{mu}")?,
                }
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
            for (v, p) in &m.jets {
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                write!(f, "{}", v.display(self.sig))?;
                if *p > 1 {
                    write!(f, "^{p}")?;
                }
            }
        }
        Ok(())
    }
}

impl From<Rational> for DiffFunction {
    fn from(c: Rational) -> Self {
        DiffFunction::constant(c)
    }
}

impl From<JetVar> for DiffFunction {
    fn from(v: JetVar) -> Self {
        DiffFunction::jet(v)
    }
}

impl AddAssign<&DiffFunction> for DiffFunction {
    fn add_assign(&mut self, rhs: &DiffFunction) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign for DiffFunction {
    fn add_assign(&mut self, rhs: DiffFunction) {
        if self.terms.len() < rhs.terms.len() {
            let lhs = core::mem::replace(self, rhs);
            *self += &lhs;
        } else {
            for (m, c) in rhs.terms {
                self.add_term(m, c);
            }
        }
    }
}

impl SubAssign<&DiffFunction> for DiffFunction {
    fn sub_assign(&mut self, rhs: &DiffFunction) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl SubAssign for DiffFunction {
    fn sub_assign(&mut self, rhs: DiffFunction) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl Neg for DiffFunction {
    type Output = DiffFunction;

    fn neg(mut self) -> DiffFunction {
        for c in self.terms.values_mut() {
            *c = -core::mem::take(c);
        }
        self
    }
}

impl Neg for &DiffFunction {
    type Output = DiffFunction;

    fn neg(self) -> DiffFunction {
        -self.clone()
    }
}

impl Add for &DiffFunction {
    type Output = DiffFunction;

    fn add(self, rhs: &DiffFunction) -> DiffFunction {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for DiffFunction {
    type Output = DiffFunction;

    fn add(mut self, rhs: DiffFunction) -> DiffFunction {
        self += rhs;
        self
    }
}

impl Sub for &DiffFunction {
    type Output = DiffFunction;

    fn sub(self, rhs: &DiffFunction) -> DiffFunction {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for DiffFunction {
    type Output = DiffFunction;

    fn sub(mut self, rhs: DiffFunction) -> DiffFunction {
        self -= rhs;
        self
    }
}

impl Mul for &DiffFunction {
    type Output = DiffFunction;

    fn mul(self, rhs: &DiffFunction) -> DiffFunction {
        let mut out = DiffFunction::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for DiffFunction {
    type Output = DiffFunction;

    fn mul(self, rhs: DiffFunction) -> DiffFunction {
        &self * &rhs
    }
}

impl core::iter::Sum for DiffFunction {
    fn sum<I: Iterator<Item = DiffFunction>>(iter: I) -> Self {
        iter.fold(DiffFunction::zero(), |acc, f| acc + f)
    }
}
