//! The full Hamiltonian assessment of one operator: sufficient criterion,
//! universal check, and a witness search when the latter fails.

use jetcalc_core::poisson::{default_basis, HamiltonianVerdict, PoissonSetup, Verdict};
use jetcalc_core::DiffFunction;

use crate::sampling::{Sampler, Shape};

#[derive(Clone, Debug)]
pub struct Assessment {
    pub sufficient: bool,
    pub universal: Verdict,
    pub universal_residual: DiffFunction,
    pub witness: Option<[DiffFunction; 3]>,
    pub verdict: HamiltonianVerdict,
}

pub fn verdict_name(v: &HamiltonianVerdict) -> &'static str {
    match v {
        HamiltonianVerdict::Hamiltonian => "hamiltonian",
        HamiltonianVerdict::NotHamiltonian { .. } => "not-hamiltonian",
        HamiltonianVerdict::Inconclusive => "inconclusive",
    }
}

pub fn jacobi_verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Zero => "zero",
        Verdict::Nonzero => "nonzero",
    }
}

/// Runs both the sufficient criterion and the universal check, and searches
/// `default_basis(max_degree, max_order)` for a witness if the latter fails.
pub fn assess(setup: &PoissonSetup, max_degree: u32, max_order: u32, search: bool) -> Assessment {
    let sufficient = setup.hamiltonian_sufficient();
    let basis = if search { default_basis(setup.signature(), max_degree, max_order) } else { Vec::new() };
    let report = setup.hamiltonian_universal_with(&basis);
    let verdict = match (report.verdict, &report.witness) {
        (Verdict::Zero, _) => HamiltonianVerdict::Hamiltonian,
        (Verdict::Nonzero, Some(w)) => HamiltonianVerdict::NotHamiltonian { witness: w.clone() },
        (Verdict::Nonzero, None) => HamiltonianVerdict::Inconclusive,
    };
    debug_assert!(!sufficient || report.verdict == Verdict::Zero);
    Assessment { sufficient, universal: report.verdict, universal_residual: report.residual, witness: report.witness, verdict }
}

/// `jacobi_direct` on `count` seeded random triples; returns the number of
/// nonzero residuals.
pub fn corroborate(setup: &PoissonSetup, count: usize, seed: u64) -> usize {
    let mut sampler = Sampler::for_signature(seed, setup.signature());
    let shape = Shape::new(3, 2, 2).autonomous();
    (0..count)
        .filter(|_| {
            let [k, l, m] = [(); 3].map(|_| sampler.nonconstant_function(shape));
            setup.jacobi_direct(&k, &l, &m).verdict == Verdict::Nonzero
        })
        .count()
}
