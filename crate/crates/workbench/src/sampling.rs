//! Seeded random objects for validation runs and the acceptance suite.

use jetcalc_core::bicomplex::{Derivation, MixedForm};
use jetcalc_core::diffops::{Current, DiffOperator};
use jetcalc_core::variational::{JetCovector, JetMatrix};
use jetcalc_core::{DiffFunction, JetVar, Monomial, MultiIndex, Rational, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Size limits for random functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    /// Jet factors per monomial.
    pub degree: u32,
    pub order: u32,
    pub terms: usize,
    /// Allow explicit `x` factors.
    pub explicit_x: bool,
}

impl Shape {
    pub const fn new(degree: u32, order: u32, terms: usize) -> Self {
        Shape { degree, order, terms, explicit_x: true }
    }

    pub const fn autonomous(self) -> Self {
        Shape { explicit_x: false, ..self }
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
    m: usize,
    deps: usize,
}

impl Sampler {
    pub fn new(seed: u64, m: usize, deps: usize) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), m, deps }
    }

    pub fn for_signature(seed: u64, sig: &Signature) -> Self {
        Sampler::new(seed, sig.m(), sig.base_dep_count())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn deps(&self) -> usize {
        self.deps
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn rational(&mut self) -> Rational {
        let p: i64 = self.rng.random_range(1..=4) * if self.rng.random_bool(0.5) { 1 } else { -1 };
        let q: i64 = self.rng.random_range(1..=3);
        Rational::new(p.into(), q.into())
    }

    /// A multi-index of order at most `max_order`, spread over random directions.
    pub fn multi_index(&mut self, max_order: u32) -> MultiIndex {
        let n = self.rng.random_range(0..=max_order);
        let mut exps = vec![0u32; self.m];
        for _ in 0..n {
            exps[self.rng.random_range(0..self.m)] += 1;
        }
        MultiIndex::from_exponents(&exps)
    }

    pub fn jet_var(&mut self, max_order: u32) -> JetVar {
        let dep = self.below(self.deps);
        JetVar::new(dep, self.multi_index(max_order))
    }

    pub fn monomial(&mut self, s: Shape) -> Monomial {
        let x = if s.explicit_x && self.rng.random_bool(0.25) { self.multi_index(1) } else { MultiIndex::zero() };
        let k = self.rng.random_range(0..=s.degree);
        let jets: Vec<(JetVar, u32)> = (0..k).map(|_| (self.jet_var(s.order), 1)).collect();
        Monomial::new(x, jets)
    }

    pub fn function(&mut self, s: Shape) -> DiffFunction {
        let n = self.rng.random_range(1..=s.terms.max(1));
        (0..n).map(|_| DiffFunction::term(self.rational(), self.monomial(s))).sum()
    }

    /// A function with at least one jet factor in every monomial.
    pub fn nonconstant_function(&mut self, s: Shape) -> DiffFunction {
        loop {
            let f = self.function(s);
            if f.terms().all(|(m, _)| !m.jets().is_empty()) && !f.is_zero() {
                return f;
            }
        }
    }

    pub fn tuple(&mut self, n: usize, s: Shape) -> Vec<DiffFunction> {
        (0..n).map(|_| self.function(s)).collect()
    }

    pub fn current(&mut self, s: Shape) -> Current {
        Current(self.tuple(self.m, s))
    }

    pub fn operator(&mut self, rows: usize, cols: usize, order: u32, coeff: Shape) -> DiffOperator {
        let n = self.rng.random_range(1..=4);
        let terms: Vec<_> = (0..n)
            .map(|_| (self.below(rows), self.below(cols), self.multi_index(order), self.function(coeff)))
            .collect();
        DiffOperator::from_terms(rows, cols, terms).expect("indices in range")
    }

    /// A nonzero `P − P*` with `P` of order `≤ order`.
    pub fn skew_operator(&mut self, n: usize, order: u32, coeff: Shape) -> DiffOperator {
        loop {
            let p = self.operator(n, n, order, coeff);
            let skew = &p - &p.adjoint();
            if !skew.is_zero() {
                return skew;
            }
        }
    }

    pub fn covector(&mut self, entries: usize, s: Shape) -> JetCovector {
        (0..entries).map(|_| (self.jet_var(s.order), self.function(s))).collect()
    }

    pub fn matrix(&mut self, entries: usize, s: Shape) -> JetMatrix {
        (0..entries).map(|_| ((self.below(self.m), self.jet_var(s.order)), self.function(s))).collect()
    }

    /// A sum of `terms` monomials of bidegree `(p, q)`; `q` is clipped to `m`.
    pub fn form(&mut self, p: usize, q: usize, terms: usize, s: Shape) -> MixedForm {
        let q = q.min(self.m);
        let mut out = MixedForm::zero();
        for _ in 0..terms {
            let vertical: Vec<JetVar> = (0..p).map(|_| self.jet_var(s.order)).collect();
            let mut horizontal: Vec<usize> = (0..self.m).collect();
            for k in (1..horizontal.len()).rev() {
                let j = self.rng.random_range(0..=k);
                horizontal.swap(k, j);
            }
            horizontal.truncate(q);
            let t = MixedForm::monomial(self.function(s), vertical, horizontal).expect("p within the cap");
            out = out.checked_add(&t).expect("same bidegree");
        }
        out
    }

    pub fn derivation(&mut self, s: Shape) -> Derivation {
        let k = self.rng.random_range(0..=2);
        let vertical: Vec<(JetVar, DiffFunction)> = (0..k).map(|_| (self.jet_var(s.order), self.function(s))).collect();
        let horizontal_shape = Shape { degree: s.degree.min(1), ..s };
        let horizontal = (0..self.m)
            .map(|_| if self.rng.random_bool(0.5) { self.function(horizontal_shape) } else { DiffFunction::zero() })
            .collect();
        Derivation { horizontal, ..Derivation::vertical(vertical) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_runs_repeat() {
        let s = Shape::new(3, 3, 4);
        let a: Vec<_> = {
            let mut r = Sampler::new(9, 2, 2);
            (0..20).map(|_| r.function(s)).collect()
        };
        let b: Vec<_> = {
            let mut r = Sampler::new(9, 2, 2);
            (0..20).map(|_| r.function(s)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn limits_are_respected() {
        let mut r = Sampler::new(1, 2, 1);
        for _ in 0..100 {
            let f = r.function(Shape::new(2, 3, 3).autonomous());
            assert!(f.jet_order().unwrap_or(0) <= 3);
            assert!(f.terms().all(|(m, _)| m.jets().len() <= 2 && m.x_exponents().is_zero()));
        }
        let op = r.skew_operator(1, 3, Shape::new(1, 2, 2));
        assert!(op.is_skew_adjoint() && !op.is_zero());
    }
}
