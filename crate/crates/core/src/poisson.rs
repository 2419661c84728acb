//! Lie-Poisson brackets `{∫K, ∫L} = ∫⟨δK, ΛδL⟩` for a skew-adjoint matrix
//! differential operator `Λ`, and three ways to test the Jacobi identity:
//!
//! * directly from the definition,
//! * through the commutator form `∫⟨δK, [ev_{φ(L)}, Λ]δM⟩ + c.p.` with
//!   `φ(R) = ΛδR`,
//! * universally, replacing `δK, δL, δM` by three formal covector
//!   families `θ¹, θ², θ³`.
//!
//! A vanishing universal residual proves the operator Hamiltonian. A
//! nonvanishing one is only reported as non-Hamiltonian when a concrete
//! violating triple is found.

use alloc::vec::Vec;

use crate::diffops::{pairing, DiffOperator};
use crate::jetalgebra::{ev_apply, Characteristic, DiffFunction, JetVar, Monomial, MultiIndex, Signature};
use crate::variational::{euler_component, is_divergence, Covector, Functional};
use crate::{Error, Result};

pub fn is_skew_adjoint(op: &DiffOperator) -> bool {
    op.is_skew_adjoint()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JacobiMethod {
    Direct,
    Commutator,
    Universal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// The residual is a divergence.
    Zero,
    Nonzero,
}

#[derive(Clone, Debug)]
pub struct JacobiReport {
    pub method: JacobiMethod,
    /// `(K, L, M)`; `None` for the universal check.
    pub triple: Option<[DiffFunction; 3]>,
    pub residual: DiffFunction,
    pub verdict: Verdict,
    pub witness: Option<[DiffFunction; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HamiltonianVerdict {
    Hamiltonian,
    NotHamiltonian { witness: [DiffFunction; 3] },
    Inconclusive,
}

/// A signature together with a skew-adjoint `Λ: E* → E`.
#[derive(Clone, Debug)]
pub struct PoissonSetup {
    sig: Signature,
    lambda: DiffOperator,
}

impl PoissonSetup {
    pub fn new(sig: Signature, lambda: DiffOperator) -> Result<Self> {
        if !lambda.is_square() {
            return Err(Error::NotSquare { rows: lambda.rows(), cols: lambda.cols() });
        }
        if lambda.rows() != sig.base_dep_count() {
            return Err(Error::DimensionMismatch { expected: sig.base_dep_count(), found: lambda.rows() });
        }
        if !lambda.is_skew_adjoint() {
            return Err(Error::NotSkewAdjoint);
        }
        Ok(PoissonSetup { sig, lambda })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn lambda(&self) -> &DiffOperator {
        &self.lambda
    }

    /// `δR` over the declared dependent variables.
    pub fn delta(&self, r: &DiffFunction) -> Covector {
        Covector((0..self.sig.base_dep_count()).map(|a| euler_component(r, a)).collect())
    }

    /// `φ(R) = ΛδR`.
    pub fn phi(&self, r: &DiffFunction) -> Characteristic {
        self.apply_lambda(&self.delta(r))
    }

    fn apply_lambda(&self, f: &[DiffFunction]) -> Characteristic {
        Characteristic(self.lambda.apply(f).expect("square operator matches |A|"))
    }

    /// The representative `⟨δK, ΛδL⟩` of `{∫K, ∫L}`.
    pub fn bracket_rep(&self, k: &DiffFunction, l: &DiffFunction) -> DiffFunction {
        pairing(&self.delta(k), &self.phi(l))
    }

    pub fn bracket(&self, k: &Functional, l: &Functional) -> Functional {
        Functional::new(self.bracket_rep(k.rep(), l.rep()))
    }

    fn report(&self, method: JacobiMethod, triple: [DiffFunction; 3], residual: DiffFunction) -> JacobiReport {
        let verdict = if is_divergence(&residual, &self.sig) { Verdict::Zero } else { Verdict::Nonzero };
        JacobiReport { method, triple: Some(triple), residual, verdict, witness: None }
    }

    /// `{∫K,{∫L,∫M}} + c.p.`, using `⟨δL, ΛδM⟩` as the inner representative.
    pub fn jacobi_direct(&self, k: &DiffFunction, l: &DiffFunction, m: &DiffFunction) -> JacobiReport {
        let residual = self.bracket_rep(k, &self.bracket_rep(l, m))
            + self.bracket_rep(l, &self.bracket_rep(m, k))
            + self.bracket_rep(m, &self.bracket_rep(k, l));
        self.report(JacobiMethod::Direct, [k.clone(), l.clone(), m.clone()], residual)
    }

    /// `⟨δK, [ev_{φ(L)}, Λ] δM⟩ + c.p.`
    pub fn jacobi_commutator(&self, k: &DiffFunction, l: &DiffFunction, m: &DiffFunction) -> JacobiReport {
        let deltas = [self.delta(k), self.delta(l), self.delta(m)];
        let phis: Vec<Characteristic> = deltas.iter().map(|d| self.apply_lambda(d)).collect();
        let residual = (0..3)
            .map(|c| {
                let (a, b, e) = (c, (c + 1) % 3, (c + 2) % 3);
                self.commutator_term(&deltas[a], &phis[b], &deltas[e])
            })
            .sum();
        self.report(JacobiMethod::Commutator, [k.clone(), l.clone(), m.clone()], residual)
    }

    /// `⟨f, [ev_φ, Λ] h⟩`.
    fn commutator_term(&self, f: &[DiffFunction], phi: &[DiffFunction], h: &[DiffFunction]) -> DiffFunction {
        let commutator = self.lambda.ev_on_operator(phi);
        if commutator.is_zero() {
            return DiffFunction::zero();
        }
        pairing(f, &commutator.apply(h).expect("square operator"))
    }

    /// `⟨ev_{φ(K)}δL, φ(M)⟩ − ⟨ev_{φ(M)}δL, φ(K)⟩`, a divergence for every triple.
    pub fn exchange_residual(&self, k: &DiffFunction, l: &DiffFunction, m: &DiffFunction) -> DiffFunction {
        let dl = self.delta(l);
        let (pk, pm) = (self.phi(k), self.phi(m));
        let moved = |phi: &Characteristic| -> Vec<DiffFunction> { dl.iter().map(|c| ev_apply(phi, c)).collect() };
        pairing(&moved(&pk), &pm) - pairing(&moved(&pm), &pk)
    }

    /// The sufficient criterion: every coefficient of `Λ` depends on `x`
    /// only, so `[ev_φ, Λ] = 0` for every `φ`. `false` means inconclusive.
    pub fn hamiltonian_sufficient(&self) -> bool {
        self.lambda.coefficients().all(|(_, _, _, c)| c.is_x_only())
    }

    /// The universal residual `Σ_cyc ⟨θ¹, [ev_{Λθ²}, Λ] θ³⟩` over formal covectors.
    pub fn universal_residual(&self) -> (Signature, DiffFunction) {
        let base = self.sig.base_dep_count();
        let root = Signature::new(self.sig.independent().iter().cloned(), self.sig.dependent()[..base].iter().cloned())
            .expect("sub-signature of a valid signature");
        let ext = root.with_formal_families(3);
        let theta: Vec<Vec<DiffFunction>> = (0..3)
            .map(|k| (0..base).map(|a| DiffFunction::jet(JetVar::base(ext.formal_id(k, a)))).collect())
            .collect();
        let phis: Vec<Characteristic> = theta.iter().map(|t| self.apply_lambda(t)).collect();
        let residual = (0..3)
            .map(|c| {
                let (a, b, e) = (c, (c + 1) % 3, (c + 2) % 3);
                self.commutator_term(&theta[a], &phis[b], &theta[e])
            })
            .sum();
        (ext, residual)
    }

    /// The universal Jacobi check with the default witness basis.
    pub fn hamiltonian_universal(&self) -> JacobiReport {
        let basis = default_basis(&self.sig, 3, 2);
        self.hamiltonian_universal_with(&basis)
    }

    /// The universal Jacobi check; on failure, searches `basis` for a witness.
    pub fn hamiltonian_universal_with(&self, basis: &[DiffFunction]) -> JacobiReport {
        let (ext, residual) = self.universal_residual();
        let verdict = if is_divergence(&residual, &ext) { Verdict::Zero } else { Verdict::Nonzero };
        let witness = match verdict {
            Verdict::Zero => None,
            Verdict::Nonzero => self.find_witness(basis),
        };
        JacobiReport { method: JacobiMethod::Universal, triple: None, residual, verdict, witness }
    }

    /// The first triple `i < j < k` of `basis` whose commutator-form Jacobi
    /// residual is not a divergence.
    pub fn find_witness(&self, basis: &[DiffFunction]) -> Option<[DiffFunction; 3]> {
        let n = basis.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let report = self.jacobi_commutator(&basis[i], &basis[j], &basis[k]);
                    if report.verdict == Verdict::Nonzero {
                        return Some([basis[i].clone(), basis[j].clone(), basis[k].clone()]);
                    }
                }
            }
        }
        None
    }

    /// The sufficient criterion first, then the universal check, then a witness search.
    pub fn classify(&self, basis: &[DiffFunction]) -> HamiltonianVerdict {
        if self.hamiltonian_sufficient() {
            return HamiltonianVerdict::Hamiltonian;
        }
        let report = self.hamiltonian_universal_with(basis);
        match (report.verdict, report.witness) {
            (Verdict::Zero, _) => HamiltonianVerdict::Hamiltonian,
            (Verdict::Nonzero, Some(witness)) => HamiltonianVerdict::NotHamiltonian { witness },
            (Verdict::Nonzero, None) => HamiltonianVerdict::Inconclusive,
        }
    }
}

/// Monomials of degree `1..=max_degree` in the jets `u^α_i`, `|i| ≤ max_order`,
/// of the declared dependent variables. Divergences are skipped since their
/// functionals vanish. Enumerated in canonical monomial order.
pub fn default_basis(sig: &Signature, max_degree: u32, max_order: u32) -> Vec<DiffFunction> {
    let vars: Vec<JetVar> = (0..sig.base_dep_count())
        .flat_map(|a| {
            (0..=max_order).flat_map(move |n| MultiIndex::of_order(sig.m(), n)).map(move |i| JetVar::new(a, i))
        })
        .collect();
    let mut monomials: Vec<Monomial> = Vec::new();
    let mut frontier: Vec<(usize, Vec<(JetVar, u32)>)> = alloc::vec![(0, Vec::new())];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for (start, factors) in &frontier {
            for (k, v) in vars.iter().enumerate().skip(*start) {
                let mut f = factors.clone();
                f.push((v.clone(), 1));
                monomials.push(Monomial::new(MultiIndex::zero(), f.clone()));
                next.push((k, f));
            }
        }
        frontier = next;
    }
    monomials.sort();
    monomials.dedup();
    monomials
        .into_iter()
        .map(|m| DiffFunction::term(crate::Rational::from_integer(1.into()), m))
        .filter(|f| !is_divergence(f, sig))
        .collect()
}
