//! Sampled checks of the five structural assumptions on a setup.

use jetcalc_core::variational::{euler, j_prolong, nabla_at, JetField};
use jetcalc_core::{ev_apply, Characteristic, Connection, DiffFunction, FreeConnection, JetVar, Signature};
use serde::Serialize;

use crate::sampling::{Sampler, Shape};

/// Columns of `Γ` longer than this count as infinite.
pub const COLUMN_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Facet {
    pub name: &'static str,
    pub passed: bool,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssumptionCheck {
    pub assumption: u8,
    pub passed: bool,
    pub facets: Vec<Facet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub seed: u64,
    pub samples: usize,
    pub assumptions: Vec<AssumptionCheck>,
}

impl Validation {
    pub fn passed(&self) -> bool {
        self.assumptions.iter().all(|a| a.passed)
    }
}

pub fn validate_setup(sig: &Signature, seed: u64, samples: usize) -> Validation {
    validate_with(sig, &FreeConnection, seed, samples)
}

struct Run<'a, G> {
    sig: &'a Signature,
    gamma: &'a G,
    sampler: Sampler,
    samples: usize,
}

impl<G: Connection> Run<'_, G> {
    fn facet(&mut self, name: &'static str, mut check: impl FnMut(&mut Self) -> Result<(), String>) -> Facet {
        for _ in 0..self.samples {
            if let Err(failure) = check(self) {
                return Facet { name, passed: false, samples: self.samples, failure: Some(failure) };
            }
        }
        Facet { name, passed: true, samples: self.samples, failure: None }
    }

    fn shape(&self) -> Shape {
        Shape::new(3, 3, 3)
    }

    fn show(&self, f: &DiffFunction) -> String {
        f.display(self.sig).to_string()
    }

    fn assumption_1(&mut self) -> Vec<Facet> {
        let column_finite = self.facet("gamma_column_finite", |r| {
            let b = r.sampler.jet_var(3);
            for mu in 0..r.sig.m() {
                if r.gamma.column(mu, &b, COLUMN_LIMIT).is_none() {
                    return Err(format!("column of {} in direction {mu} exceeds {COLUMN_LIMIT} entries", b.display(r.sig)));
                }
            }
            Ok(())
        });
        // [D_μ, ∂_a] f = Γ^b_{μa} ∂_b f on sampled f.
        let relation = self.facet("gamma_matches_commutator", |r| {
            let f = r.sampler.function(r.shape());
            let a = r.sampler.jet_var(3);
            for mu in 0..r.sig.m() {
                let lhs = f.partial_jet(&a).total_d(mu) - f.total_d(mu).partial_jet(&a);
                let rhs: DiffFunction = r.gamma.commutator_terms(mu, &a).iter().map(|(b, g)| g * &f.partial_jet(b)).sum();
                if lhs != rhs {
                    return Err(format!("[D_{mu}, ∂_{}] fails on {}", a.display(r.sig), r.show(&f)));
                }
            }
            Ok(())
        });
        vec![column_finite, relation]
    }

    fn assumption_2(&mut self) -> Vec<Facet> {
        let finite = self.facet("finite_jet_support", |r| {
            let f = r.sampler.function(r.shape());
            let order = f.jet_order().unwrap_or(0);
            for mu in 0..r.sig.m() {
                let d = f.total_d(mu);
                if d.jet_order().is_some_and(|o| o > order + 1) {
                    return Err(format!("D_{mu} raised the order of {} by more than one", r.show(&f)));
                }
            }
            Ok(())
        });
        let commuting = self.facet("total_derivatives_commute", |r| {
            let f = r.sampler.function(r.shape());
            for mu in 0..r.sig.m() {
                for nu in mu + 1..r.sig.m() {
                    if f.total_d(mu).total_d(nu) != f.total_d(nu).total_d(mu) {
                        return Err(format!("[D_{mu}, D_{nu}] ≠ 0 on {}", r.show(&f)));
                    }
                }
            }
            Ok(())
        });
        vec![finite, commuting]
    }

    fn assumption_3(&mut self) -> Vec<Facet> {
        vec![self.facet("euler_kills_divergences", |r| {
            let psi = r.sampler.current(r.shape());
            let div = psi.divergence();
            if euler(&div, r.sig).is_zero() {
                Ok(())
            } else {
                Err(format!("δ(Div ψ) ≠ 0 for Div ψ = {}", r.show(&div)))
            }
        })]
    }

    fn assumption_4(&mut self) -> Vec<Facet> {
        let small = Shape::new(2, 2, 2);
        let n = self.sig.base_dep_count();
        let nabla_j = self.facet("nabla_after_j_vanishes", |r| {
            let phi = Characteristic(r.sampler.tuple(n, small));
            let targets: Vec<(usize, JetVar)> = (0..4).map(|_| (r.sampler.below(r.sig.m()), r.sampler.jet_var(3))).collect();
            let eta = nabla_at(&j_prolong(&phi), targets);
            if eta.is_zero() {
                Ok(())
            } else {
                Err("∇ jφ ≠ 0".to_string())
            }
        });
        // ev_φ (jψ)_i = (j ev_φ ψ)_i
        let ev_j = self.facet("evolution_commutes_with_j", |r| {
            let phi = r.sampler.tuple(n, small);
            let psi = Characteristic(r.sampler.tuple(n, small));
            let moved = Characteristic(psi.iter().map(|c| ev_apply(&phi, c)).collect());
            let v = r.sampler.jet_var(2);
            let lhs = ev_apply(&phi, &j_prolong(&psi).component(&v));
            if lhs == j_prolong(&moved).component(&v) {
                Ok(())
            } else {
                Err(format!("[ev_φ, j] ≠ 0 at {}", v.display(r.sig)))
            }
        });
        vec![nabla_j, ev_j]
    }
}

/// Runs every facet against an arbitrary `Γ`; only [`FreeConnection`] is
/// meaningful outside tests.
pub fn validate_with(sig: &Signature, gamma: &impl Connection, seed: u64, samples: usize) -> Validation {
    let mut run = Run { sig, gamma, sampler: Sampler::for_signature(seed, sig), samples };
    let groups = [run.assumption_1(), run.assumption_2(), run.assumption_3(), run.assumption_4()];
    let mut assumptions: Vec<AssumptionCheck> = groups
        .into_iter()
        .enumerate()
        .map(|(k, facets)| AssumptionCheck {
            assumption: k as u8 + 1,
            passed: facets.iter().all(|f| f.passed),
            facets,
            note: None,
        })
        .collect();
    assumptions.push(AssumptionCheck {
        assumption: 5,
        passed: true,
        facets: Vec::new(),
        note: Some("imposes no additional restriction on the free jet algebra"),
    });
    Validation { seed, samples, assumptions }
}
