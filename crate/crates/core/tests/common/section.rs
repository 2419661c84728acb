//! Substitution of polynomial sections `u^α = s^α(x)`: a ring map into
//! `ℚ[x]` that turns `D_μ` into `∂/∂x^μ`.

use std::collections::BTreeMap;

use jetcalc_core::diffops::DiffOperator;
use jetcalc_core::{DiffFunction, MultiIndex, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(pub BTreeMap<Vec<u32>, Rational>);

impl Poly {
    pub fn constant(m: usize, c: Rational) -> Poly {
        let mut p = Poly::default();
        p.add(vec![0; m], c);
        p
    }

    fn add(&mut self, e: Vec<u32>, c: Rational) {
        let slot = self.0.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&e);
        }
    }

    pub fn plus(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.0 {
            out.add(e.clone(), c.clone());
        }
        out
    }

    pub fn times(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ea, ca) in &self.0 {
            for (eb, cb) in &other.0 {
                out.add(ea.iter().zip(eb).map(|(a, b)| a + b).collect(), ca * cb);
            }
        }
        out
    }

    pub fn diff(&self, mu: usize) -> Poly {
        let mut out = Poly::default();
        for (e, c) in &self.0 {
            if e[mu] > 0 {
                let mut f = e.clone();
                f[mu] -= 1;
                out.add(f, c * Rational::from_integer(e[mu].into()));
            }
        }
        out
    }

    pub fn diff_multi(&self, i: &MultiIndex) -> Poly {
        let mut out = self.clone();
        for (mu, k) in i.iter() {
            for _ in 0..k {
                out = out.diff(mu);
            }
        }
        out
    }
}

pub fn poly(m: usize) -> BoxedStrategy<Poly> {
    prop::collection::vec((prop::collection::vec(0u32..=3, m), -3i64..=3), 1..=4)
        .prop_map(move |terms| {
            let mut p = Poly::default();
            for (e, c) in terms {
                p.add(e, Rational::from_integer(c.into()));
            }
            p
        })
        .boxed()
}

pub fn section(m: usize, deps: usize) -> BoxedStrategy<Vec<Poly>> {
    prop::collection::vec(poly(m), deps).boxed()
}

pub fn substitute(f: &DiffFunction, sec: &[Poly], m: usize) -> Poly {
    let mut out = Poly::default();
    for (mono, c) in f.terms() {
        let mut t = Poly::constant(m, c.clone());
        let x = mono.x_exponents().to_dense(m);
        t = t.times(&Poly(BTreeMap::from([(x, Rational::one())])));
        for (v, p) in mono.jets() {
            let s = sec[v.dep].diff_multi(&v.index);
            for _ in 0..*p {
                t = t.times(&s);
            }
        }
        out = out.plus(&t);
    }
    out
}

/// `P` acting on polynomial inputs after substituting the section into its coefficients.
pub fn apply_on_section(p: &DiffOperator, h: &[Poly], sec: &[Poly], m: usize) -> Vec<Poly> {
    let mut out = vec![Poly::default(); p.rows()];
    for (a, b, i, c) in p.coefficients() {
        out[a] = out[a].plus(&substitute(c, sec, m).times(&h[b].diff_multi(i)));
    }
    out
}
