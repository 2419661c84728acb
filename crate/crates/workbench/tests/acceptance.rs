//! Acceptance suite. Run with `cargo test -p jetcalc --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

#[allow(dead_code)]
#[path = "../../core/tests/common/section.rs"]
mod section;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use jetcalc::corpus::{entries, run_entry};
use jetcalc::parse::ParseErrorKind;
use jetcalc::sampling::{Sampler, Shape};
use jetcalc::validate::validate_setup;
use jetcalc::{parse_expression, parse_operator};
use jetcalc_core::bicomplex::{Derivation, MixedForm};
use jetcalc_core::diffops::{pairing, DiffOperator};
use jetcalc_core::poisson::{PoissonSetup, Verdict};
use jetcalc_core::variational::{euler, is_divergence, j_star, nabla_star, split_covector, JetCovector};
use jetcalc_core::{ev_apply, DiffFunction, FreeConnection, JetVar, Rational, Signature};
use section::{apply_on_section, substitute, Poly};

const SUITE_LIMIT: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn signature(m: usize, deps: usize) -> Signature {
    Signature::new(["x", "y"][..m].iter().copied(), ["u", "v"][..deps].iter().copied()).unwrap()
}

/// Cycles through `(m, deps)` in `{1,2}²`.
fn layout(k: usize) -> (usize, usize) {
    [(1, 1), (1, 2), (2, 1), (2, 2)][k % 4]
}

fn random_section(r: &mut Sampler) -> Vec<Poly> {
    let m = r.m();
    (0..r.deps())
        .map(|_| {
            let mut p = BTreeMap::new();
            for _ in 0..3 {
                let e: Vec<u32> = (0..m).map(|_| r.below(3) as u32).collect();
                let c = Rational::from_integer((r.below(7) as i64 - 3).into());
                *p.entry(e).or_insert_with(|| Rational::from_integer(0.into())) += c;
            }
            p.retain(|_, c| *c != Rational::from_integer(0.into()));
            Poly(p)
        })
        .collect()
}

fn algebra_laws() -> Outcome {
    const CASES: usize = 500;
    for k in 0..CASES {
        let (m, deps) = layout(k);
        let mut r = Sampler::new(1_000 + k as u64, m, deps);
        let s = Shape::new(3, 3, 3);
        let f = r.function(s);
        let phi = r.tuple(deps, Shape::new(2, 2, 2));
        let v = r.jet_var(3);
        let (mu, nu) = (r.below(m), r.below(m));
        ensure(f.total_d(mu).total_d(nu) == f.total_d(nu).total_d(mu), || format!("case {k}: D_μD_ν ≠ D_νD_μ"))?;
        ensure(ev_apply(&phi, &f.total_d(mu)) == ev_apply(&phi, &f).total_d(mu), || format!("case {k}: [D, ev] ≠ 0"))?;
        let lhs = f.partial_jet(&v).total_d(mu) - f.total_d(mu).partial_jet(&v);
        let rhs = match v.index.decremented(mu) {
            Some(lower) => -f.partial_jet(&JetVar::new(v.dep, lower)),
            None => DiffFunction::zero(),
        };
        ensure(lhs == rhs, || format!("case {k}: Γ relation"))?;
        // D_μ becomes ∂/∂x^μ once a polynomial section is substituted.
        let sec = random_section(&mut r);
        ensure(substitute(&f.total_d(mu), &sec, m) == substitute(&f, &sec, m).diff(mu), || format!("case {k}: section oracle"))?;
    }
    Ok(format!("{CASES} cases"))
}

fn operator_laws() -> Outcome {
    const CASES: usize = 300;
    for k in 0..CASES {
        let (m, deps) = layout(k);
        let mut r = Sampler::new(2_000 + k as u64, m, deps);
        let s = Shape::new(2, 2, 2);
        let p = r.operator(deps, deps, 3, s);
        let q = r.operator(deps, deps, 2, s);
        ensure(p.adjoint().adjoint() == p, || format!("case {k}: P** ≠ P"))?;
        let pq = p.compose(&q).unwrap();
        ensure(pq.adjoint() == q.adjoint().compose(&p.adjoint()).unwrap(), || format!("case {k}: (PQ)* ≠ Q*P*"))?;
        let g = r.tuple(deps, s);
        ensure(pq.apply(&g).unwrap() == p.apply(&q.apply(&g).unwrap()).unwrap(), || format!("case {k}: PQ g ≠ P(Qg)"))?;
        let sec = random_section(&mut r);
        let h = random_section(&mut r);
        let nested = apply_on_section(&p, &apply_on_section(&q, &h, &sec, m), &sec, m);
        ensure(apply_on_section(&pq, &h, &sec, m) == nested, || format!("case {k}: composition on sections"))?;
    }
    Ok(format!("{CASES} cases"))
}

fn green_formula() -> Outcome {
    const CASES: usize = 300;
    for k in 0..CASES {
        let (m, deps) = layout(k);
        let rows = 1 + k % 2;
        let mut r = Sampler::new(3_000 + k as u64, m, deps);
        let s = Shape::new(2, 2, 3);
        let p = r.operator(rows, deps, 3, s);
        let f = r.tuple(rows, s);
        let g = r.tuple(deps, s);
        let psi = p.green_current(&f, &g, m).unwrap();
        let residual = pairing(&f, &p.apply(&g).unwrap()) - pairing(&p.adjoint().apply(&f).unwrap(), &g) - psi.divergence();
        ensure(residual.is_zero(), || format!("case {k}: residual has {} terms", residual.len()))?;
    }
    Ok(format!("{CASES} cases"))
}

fn variational_suite() -> Outcome {
    const DIV: usize = 300;
    const FRECHET: usize = 300;
    const SPLITS: usize = 200;
    for k in 0..DIV {
        let (m, deps) = layout(k);
        let mut r = Sampler::new(4_000 + k as u64, m, deps);
        let psi = r.current(Shape::new(3, 3, 3));
        ensure(euler(&psi.divergence(), &signature(m, deps)).is_zero(), || format!("divergence case {k}"))?;
    }
    for k in 0..FRECHET {
        let (m, deps) = layout(k);
        let sig = signature(m, deps);
        let mut r = Sampler::new(5_000 + k as u64, m, deps);
        let l = r.function(Shape::new(3, 3, 3));
        let phi = r.tuple(deps, Shape::new(2, 2, 2));
        let delta = euler(&l, &sig);
        let residual = ev_apply(&phi, &l) - pairing(&delta, &phi);
        ensure(is_divergence(&residual, &sig), || format!("Fréchet case {k}: residual is not a divergence"))?;
        // Exact current from Green's formula for the Fréchet derivative.
        let frechet = DiffOperator::frechet(&l, deps);
        let adj = frechet.adjoint();
        ensure(adj.apply(&[DiffFunction::one()]).unwrap() == delta.0, || format!("Fréchet case {k}: ℓ*(1) ≠ δL"))?;
        let psi = frechet.green_current(&[DiffFunction::one()], &phi, m).unwrap();
        ensure((residual - psi.divergence()).is_zero(), || format!("Fréchet case {k}: current mismatch"))?;
    }
    for k in 0..SPLITS {
        let (m, deps) = layout(k);
        let mut r = Sampler::new(6_000 + k as u64, m, deps);
        let n = 1 + r.below(4);
        let f = r.covector(n, Shape::new(2, 3, 2));
        let (g, chi) = split_covector(&f, deps);
        ensure(f.minus(&g) == nabla_star(&chi), || format!("split case {k}: f − g ≠ ∇*χ"))?;
        ensure(g.0.keys().all(|v| v.index.is_zero()), || format!("split case {k}: g not on base jets"))?;
        ensure(j_star(&g, deps) == j_star(&f, deps), || format!("split case {k}: j* changed"))?;
    }
    Ok(format!("{DIV} divergences, {FRECHET} Euler–Fréchet, {SPLITS} splits"))
}

fn sum(a: &MixedForm, b: &MixedForm) -> MixedForm {
    a.checked_add(b).unwrap()
}

fn delta_wedge_volume(m: usize, cov: &JetCovector) -> MixedForm {
    cov.0
        .iter()
        .fold(MixedForm::zero(), |acc, (v, c)| sum(&acc, &MixedForm::delta_u(v.clone()).wedge(&MixedForm::volume(m)).scale(c)))
}

/// Invariant formula for `dω(X_0,…,X_q)` with the `1/(q+1)` normalisation.
#[allow(clippy::needless_range_loop)]
fn cartan(omega: &MixedForm, fields: &[Derivation]) -> DiffFunction {
    let q = fields.len() - 1;
    let without = |skip: &[usize]| -> Vec<Derivation> {
        fields.iter().enumerate().filter(|(k, _)| !skip.contains(k)).map(|(_, x)| x.clone()).collect()
    };
    let sign = |k: usize| if k.is_multiple_of(2) { 1 } else { -1 };
    let mut out = DiffFunction::zero();
    for i in 0..=q {
        out += fields[i].apply(&omega.eval(&without(&[i])).unwrap()).scale_int(sign(i));
        for j in i + 1..=q {
            let mut args = vec![fields[i].bracket(&fields[j], &FreeConnection)];
            args.extend(without(&[i, j]));
            out += omega.eval(&args).unwrap().scale_int(sign(i + j));
        }
    }
    out.scale(&Rational::new(1.into(), (q as i64 + 1).into()))
}

fn bicomplex_suite() -> Outcome {
    const FORMS: usize = 200;
    const CORNERS: usize = 100;
    const CARTAN: usize = 60;
    let s = Shape::new(1, 2, 2);
    for k in 0..FORMS {
        let (m, deps) = layout(k);
        let mut r = Sampler::new(7_000 + k as u64, m, deps);
        let (p, q) = (k % 3, r.below(m + 1));
        let terms = 1 + r.below(3);
        let w = r.form(p, q, terms, s);
        ensure(w.d_v().d_v().is_zero(), || format!("form {k}: d_v² ≠ 0"))?;
        ensure(w.d_h(m).d_h(m).is_zero(), || format!("form {k}: d_h² ≠ 0"))?;
        ensure(sum(&w.d_v().d_h(m), &w.d_h(m).d_v()).is_zero(), || format!("form {k}: d_v d_h + d_h d_v ≠ 0"))?;
    }
    for k in 0..CORNERS {
        let (m, deps) = layout(k);
        let mut r = Sampler::new(8_000 + k as u64, m, deps);
        match k % 3 {
            0 => {
                let psi = r.current(s);
                let omega = (0..m).fold(MixedForm::zero(), |acc, mu| sum(&acc, &MixedForm::volume_without(m, mu).scale(&psi[mu])));
                let expected = MixedForm::volume(m).scale(&psi.divergence());
                ensure(omega.d_h(m) == expected, || format!("corner {k}: Div"))?;
            }
            1 => {
                let n = 1 + r.below(4);
                let chi = r.matrix(n, s);
                let omega = chi.0.iter().fold(MixedForm::zero(), |acc, ((mu, v), c)| {
                    sum(&acc, &MixedForm::delta_u(v.clone()).wedge(&MixedForm::volume_without(m, *mu)).scale(c))
                });
                ensure(omega.d_h(m) == delta_wedge_volume(m, &nabla_star(&chi)), || format!("corner {k}: ∇*"))?;
            }
            _ => {
                let l = r.function(Shape::new(3, 3, 3));
                let omega = MixedForm::volume(m).scale(&l);
                ensure(omega.d_v() == delta_wedge_volume(m, &JetCovector::gradient(&l)), || format!("corner {k}: ∂"))?;
            }
        }
    }
    for k in 0..CARTAN {
        let (m, deps) = layout(k);
        let mut r = Sampler::new(9_000 + k as u64, m, deps);
        let degree = 1 + k % 2;
        let p = degree - r.below(degree.min(m) + 1);
        let terms = 1 + r.below(2);
        let w = r.form(p, degree - p, terms, s);
        let fields: Vec<_> = (0..=degree).map(|_| r.derivation(s)).collect();
        let d = w.d_v().eval(&fields).unwrap() + w.d_h(m).eval(&fields).unwrap();
        ensure(d == cartan(&w, &fields), || format!("Cartan case {k} (q = {degree})"))?;
    }
    Ok(format!("{FORMS} forms, {CORNERS} corners, {CARTAN} Cartan checks at q ∈ {{1,2}}"))
}

fn jacobi_via_commutators() -> Outcome {
    const OPERATORS: usize = 10;
    const TRIPLES: usize = 10;
    let mut nonzero_operators = 0;
    let mut nonzero_triples = 0;
    for k in 0..OPERATORS {
        // Scalar operators of order three, plus a few 2×2 ones.
        let deps = if k < 7 { 1 } else { 2 };
        let sig = signature(1, deps);
        let mut r = Sampler::new(10_000 + k as u64, 1, deps);
        let lambda = r.skew_operator(deps, 3, Shape::new(2, 2, 2).autonomous());
        ensure(lambda.order().unwrap_or(0) <= 3, || format!("Λ_{k} has order above 3"))?;
        let setup = PoissonSetup::new(sig.clone(), lambda).map_err(|e| format!("Λ_{k}: {e}"))?;
        let mut seen_nonzero = false;
        for t in 0..TRIPLES {
            let [a, b, c] = [(); 3].map(|_| loop {
                let f = r.nonconstant_function(Shape::new(3, 2, 2).autonomous());
                if !is_divergence(&f, &sig) {
                    break f;
                }
            });
            let direct = setup.jacobi_direct(&a, &b, &c);
            let mt = setup.jacobi_commutator(&a, &b, &c);
            ensure(is_divergence(&(&direct.residual - &mt.residual), &sig), || format!("Λ_{k} triple {t}: residuals differ"))?;
            ensure(direct.verdict == mt.verdict, || format!("Λ_{k} triple {t}: verdicts differ"))?;
            ensure(is_divergence(&setup.exchange_residual(&a, &b, &c), &sig), || format!("Λ_{k} triple {t}: exchange residual"))?;
            if direct.verdict == Verdict::Nonzero {
                seen_nonzero = true;
                nonzero_triples += 1;
            }
        }
        nonzero_operators += seen_nonzero as usize;
    }
    ensure(nonzero_operators > 0, || "no non-Hamiltonian operator among the samples".into())?;
    Ok(format!(
        "{} triples over {OPERATORS} operators; {nonzero_operators} operators non-Hamiltonian, {nonzero_triples} nonzero triples",
        OPERATORS * TRIPLES
    ))
}

fn corpus_verdicts() -> Outcome {
    let mut lines = Vec::new();
    for e in entries().map_err(|e| e.to_string())? {
        let start = Instant::now();
        let o = run_entry(&e).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ensure(took < Duration::from_secs(30), || format!("{} took {took:?}", e.name))?;
        ensure(o.matches, || format!("{}: found {:?}, locked {:?}", e.name, o.found, e.locked))?;
        ensure(o.skew_adjoint, || format!("{} is not skew-adjoint", e.name))?;
        match e.name.as_str() {
            "translation" => ensure(o.found.sufficient && o.found.universal == "zero", || "D: both paths".into())?,
            "kdv-second" => ensure(
                o.found.verdict == "hamiltonian" && o.corroborated == 20 && o.corroboration_failures == 0,
                || "KdV: universal check with 20 corroborating triples".into(),
            )?,
            "jet-coefficient" => {
                let setup = jetcalc::corpus::setup(&e.setup).map_err(|e| e.to_string())?;
                let sig = setup.signature.clone();
                let p = PoissonSetup::new(sig.clone(), setup.operators[&e.operator].clone()).unwrap();
                let w = o.witness.as_ref().ok_or("no witness")?;
                let w: Vec<DiffFunction> = w.iter().map(|t| parse_expression(t, &sig).unwrap()).collect();
                let residual = p.jacobi_direct(&w[0], &w[1], &w[2]).residual;
                ensure(o.found.universal == "nonzero", || "u_x D: universal check should fail".into())?;
                ensure(!is_divergence(&residual, &sig), || "u_x D: witness residual is a divergence".into())?;
            }
            _ => {}
        }
        lines.push(format!("{}={}", e.name, o.found.verdict));
    }
    Ok(lines.join(", "))
}

const MALFORMED: &[(&str, ParseErrorKind)] = &[
    ("", ParseErrorKind::UnexpectedEnd),
    ("u +", ParseErrorKind::UnexpectedEnd),
    ("u + $", ParseErrorKind::Lexical),
    ("u # v", ParseErrorKind::Lexical),
    ("w^2", ParseErrorKind::UnknownIdentifier),
    ("u_", ParseErrorKind::MalformedJet),
    ("u_q", ParseErrorKind::MalformedJet),
    ("u[1]", ParseErrorKind::MalformedJet),
    ("u[1,2,3]", ParseErrorKind::MalformedJet),
    ("u[1,", ParseErrorKind::MalformedJet),
    ("u^", ParseErrorKind::BadExponent),
    ("u^y", ParseErrorKind::BadExponent),
    ("u^-2", ParseErrorKind::BadExponent),
    ("u^123456789012", ParseErrorKind::BadExponent),
    ("3/0", ParseErrorKind::BadNumber),
    ("(u + v", ParseErrorKind::UnexpectedEnd),
    ("u + v)", ParseErrorKind::UnexpectedToken),
    ("u v", ParseErrorKind::UnexpectedToken),
    ("u * / v", ParseErrorKind::UnexpectedToken),
    ("u*D1", ParseErrorKind::OperatorInExpression),
    ("D", ParseErrorKind::UnknownIdentifier),
    ("*u", ParseErrorKind::UnexpectedToken),
];

fn parser_suite() -> Outcome {
    const ROUND_TRIPS: usize = 1000;
    for k in 0..ROUND_TRIPS {
        let (m, deps) = layout(k);
        let sig = signature(m, deps);
        let mut r = Sampler::new(11_000 + k as u64, m, deps);
        let f = r.function(Shape::new(4, 3, 5));
        let printed = f.display(&sig).to_string();
        let parsed = parse_expression(&printed, &sig).map_err(|e| format!("{printed}: {e}"))?;
        ensure(parsed == f && parsed.display(&sig).to_string() == printed, || format!("round trip of {printed}"))?;
    }
    let sig = signature(2, 2);
    for (text, kind) in MALFORMED {
        let e = parse_expression(text, &sig).err().ok_or_else(|| format!("{text:?} parsed"))?;
        ensure(e.kind == *kind && e.position <= text.len(), || format!("{text:?}: {e}"))?;
    }
    let e = parse_operator("[[0, D1], [D1]]", &sig).err().ok_or("ragged matrix parsed")?;
    ensure(e.kind == ParseErrorKind::Dimension, || format!("ragged matrix: {e}"))?;
    Ok(format!("{ROUND_TRIPS} round trips, {} malformed fixtures", MALFORMED.len() + 1))
}

fn validation() -> Outcome {
    let mut facets = 0;
    for sig in [signature(1, 1), signature(2, 1), signature(2, 2)] {
        let v = validate_setup(&sig, 0, 50);
        for a in &v.assumptions {
            ensure(a.passed, || format!("m = {}: assumption {} failed", sig.m(), a.assumption))?;
            facets += a.facets.len();
        }
        ensure(v.assumptions.len() == 5, || "expected five assumptions".into())?;
    }
    Ok(format!("m ∈ {{1,2}}, {facets} facets passed"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("algebra laws", algebra_laws),
        ("operator laws", operator_laws),
        ("Green's formula", green_formula),
        ("variational suite", variational_suite),
        ("bicomplex", bicomplex_suite),
        ("Jacobi identity via commutators", jacobi_via_commutators),
        ("corpus verdicts", corpus_verdicts),
        ("parser", parser_suite),
        ("setup validation", validation),
    ];
    let results: Vec<(Outcome, Duration)> = criteria
        .par_iter()
        .map(|(_, run)| {
            let start = Instant::now();
            let out = run();
            (out, start.elapsed())
        })
        .collect();
    let mut failed = Vec::new();
    for (n, ((name, _), (out, took))) in criteria.iter().zip(results).enumerate() {
        let out = out.and_then(|d| if took < SUITE_LIMIT { Ok(d) } else { Err(format!("exceeded {SUITE_LIMIT:?}")) });
        match out {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} ({:.1}s)", n + 1, took.as_secs_f64()),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why} ({:.1}s)", n + 1, took.as_secs_f64());
                failed.push(n + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn malformed_fixtures_are_numerous() {
    assert!(MALFORMED.len() >= 20);
}
