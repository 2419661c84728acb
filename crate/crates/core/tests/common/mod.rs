#![allow(dead_code)]

pub mod section;

use jetcalc_core::diffops::DiffOperator;
use jetcalc_core::{DiffFunction, JetVar, Monomial, MultiIndex, Rational};
use proptest::prelude::*;

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub m: usize,
    pub deps: usize,
    pub degree: usize,
    pub order: u32,
    pub terms: usize,
}

impl Shape {
    pub const fn new(m: usize, deps: usize) -> Self {
        Shape { m, deps, degree: 3, order: 3, terms: 4 }
    }

    pub const fn small(m: usize, deps: usize) -> Self {
        Shape { m, deps, degree: 2, order: 2, terms: 3 }
    }
}

pub fn multi_index(m: usize, max_order: u32) -> BoxedStrategy<MultiIndex> {
    prop::collection::vec(0..=max_order, m)
        .prop_map(move |mut e| {
            // Clip to the order budget from the left.
            let mut budget = max_order;
            for x in e.iter_mut() {
                *x = (*x).min(budget);
                budget -= *x;
            }
            MultiIndex::from_exponents(&e)
        })
        .boxed()
}

pub fn jet_var(s: Shape) -> BoxedStrategy<JetVar> {
    (0..s.deps, multi_index(s.m, s.order)).prop_map(|(a, i)| JetVar::new(a, i)).boxed()
}

pub fn rational() -> BoxedStrategy<Rational> {
    (prop_oneof![-4i64..=-1, 1i64..=4], 1i64..=3).prop_map(|(p, q)| Rational::new(p.into(), q.into())).boxed()
}

pub fn monomial(s: Shape) -> BoxedStrategy<Monomial> {
    (multi_index(s.m, 1), prop::collection::vec(jet_var(s), 0..=s.degree))
        .prop_map(|(x, jets)| Monomial::new(x, jets.into_iter().map(|v| (v, 1))))
        .boxed()
}

pub fn function(s: Shape) -> BoxedStrategy<DiffFunction> {
    prop::collection::vec((rational(), monomial(s)), 0..=s.terms)
        .prop_map(|terms| terms.into_iter().map(|(c, m)| DiffFunction::term(c, m)).sum())
        .boxed()
}

/// Functions without explicit `x` dependence.
pub fn autonomous(s: Shape) -> BoxedStrategy<DiffFunction> {
    prop::collection::vec((rational(), prop::collection::vec(jet_var(s), 0..=s.degree)), 0..=s.terms)
        .prop_map(|terms| {
            terms
                .into_iter()
                .map(|(c, jets)| DiffFunction::term(c, Monomial::new(MultiIndex::zero(), jets.into_iter().map(|v| (v, 1)))))
                .sum()
        })
        .boxed()
}

pub fn tuple(s: Shape, n: usize) -> BoxedStrategy<Vec<DiffFunction>> {
    prop::collection::vec(function(s), n).boxed()
}

pub fn operator(s: Shape, rows: usize, cols: usize, order: u32) -> BoxedStrategy<DiffOperator> {
    let coeff = Shape { degree: s.degree.min(2), terms: 2, ..s };
    prop::collection::vec((0..rows, 0..cols, multi_index(s.m, order), function(coeff)), 0..=4)
        .prop_map(move |t| DiffOperator::from_terms(rows, cols, t).expect("indices in range"))
        .boxed()
}

/// `P − P*`, always skew-adjoint.
pub fn skew_operator(s: Shape, n: usize, order: u32) -> BoxedStrategy<DiffOperator> {
    operator(s, n, n, order).prop_map(|p| &p - &p.adjoint()).boxed()
}

pub fn d(f: &DiffFunction, mu: usize) -> DiffFunction {
    f.total_d(mu)
}
