mod common;

use common::{function, jet_var, tuple, Shape};
use jetcalc_core::diffops::{pairing, Current, DiffOperator};
use jetcalc_core::variational::{
    euler, is_divergence, j_prolong, j_star, nabla_at, nabla_green_current, nabla_star, split_covector,
    JetCovector, JetMatrix,
};
use jetcalc_core::{ev_apply, Characteristic, DiffFunction, Signature};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![Just(Shape::new(1, 1)), Just(Shape::small(1, 2)), Just(Shape::small(2, 1)), Just(Shape::small(2, 2))]
}

fn signature(s: Shape) -> Signature {
    Signature::new(["x", "y"][..s.m].iter().copied(), ["u", "v"][..s.deps].iter().copied()).unwrap()
}

fn covector(s: Shape) -> BoxedStrategy<JetCovector> {
    prop::collection::vec((jet_var(s), function(Shape::small(s.m, s.deps))), 0..=4)
        .prop_map(|t| t.into_iter().collect())
        .boxed()
}

fn matrix(s: Shape) -> BoxedStrategy<JetMatrix> {
    prop::collection::vec(((0..s.m, jet_var(s)), function(Shape::small(s.m, s.deps))), 0..=4)
        .prop_map(|t| t.into_iter().collect())
        .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn euler_kills_divergences((s, psi) in shape().prop_flat_map(|s| (Just(s), tuple(s, s.m)))) {
        let div = Current(psi).divergence();
        prop_assert!(euler(&div, &signature(s)).is_zero());
        prop_assert!(is_divergence(&div, &signature(s)));
    }

    #[test]
    fn euler_frechet_adjunction(
        (s, l, phi) in shape().prop_flat_map(|s| (Just(s), function(s), tuple(Shape::small(s.m, s.deps), s.deps))),
    ) {
        let sig = signature(s);
        let frechet = DiffOperator::frechet(&l, s.deps);
        prop_assert_eq!(&frechet.apply(&phi).unwrap()[0], &ev_apply(&phi, &l));
        // ℓ*_L(1) = δL exactly
        let delta = euler(&l, &sig);
        prop_assert_eq!(&frechet.adjoint().apply(&[DiffFunction::one()]).unwrap(), &delta.0);
        let residual = ev_apply(&phi, &l) - pairing(&delta, &phi);
        prop_assert!(is_divergence(&residual, &sig));
    }

    #[test]
    fn evolution_preserves_divergences(
        (s, psi, phi) in shape().prop_flat_map(|s| {
            let t = Shape::small(s.m, s.deps);
            (Just(s), tuple(t, s.m), tuple(t, s.deps))
        }),
    ) {
        let moved = ev_apply(&phi, &Current(psi).divergence());
        prop_assert!(is_divergence(&moved, &signature(s)));
    }

    #[test]
    fn splitting_is_exact((s, f) in shape().prop_flat_map(|s| (Just(s), covector(s)))) {
        let (g, chi) = split_covector(&f, s.deps);
        prop_assert_eq!(f.minus(&g), nabla_star(&chi));
        prop_assert!(g.0.keys().all(|v| v.index.is_zero()));
        prop_assert_eq!(j_star(&g, s.deps), j_star(&f, s.deps));
    }

    #[test]
    fn j_star_kills_nabla_star((s, chi) in shape().prop_flat_map(|s| (Just(s), matrix(s)))) {
        prop_assert!(j_star(&nabla_star(&chi), s.deps).is_zero());
    }

    #[test]
    fn nabla_kills_prolongations(
        (phi, targets) in shape().prop_flat_map(|s| {
            (tuple(Shape::small(s.m, s.deps), s.deps), prop::collection::vec((0..s.m, jet_var(s)), 1..=6))
        }),
    ) {
        let eta = nabla_at(&j_prolong(&Characteristic(phi)), targets);
        prop_assert!(eta.is_zero());
    }

    #[test]
    fn nabla_green_formula(
        (s, chi, phi) in shape().prop_flat_map(|s| {
            (Just(s), matrix(s), tuple(Shape::small(s.m, s.deps), s.deps))
        }),
    ) {
        let field = j_prolong(&Characteristic(phi));
        let eta = nabla_at(&field, chi.0.keys().cloned());
        let adjoint = nabla_star(&chi);
        let residual = chi.pair(&eta) - adjoint.pair(&field) - nabla_green_current(&chi, &field, s.m).divergence();
        prop_assert!(residual.is_zero());
    }

    #[test]
    fn j_star_is_dual_to_j(
        (s, f, phi) in shape().prop_flat_map(|s| (Just(s), covector(s), tuple(Shape::small(s.m, s.deps), s.deps))),
    ) {
        let lhs = f.pair(&j_prolong(&Characteristic(phi.clone())));
        let rhs = pairing(&j_star(&f, s.deps), &phi);
        prop_assert!(is_divergence(&(lhs - rhs), &signature(s)));
    }
}

#[test]
fn gradient_pairs_with_prolongation_to_evolution() {
    let l = &DiffFunction::u(0, &[0]) * &DiffFunction::u(0, &[2]).pow(2);
    let phi = Characteristic(vec![&DiffFunction::u(0, &[1]) * &DiffFunction::x(0)]);
    assert_eq!(JetCovector::gradient(&l).pair(&j_prolong(&phi)), ev_apply(&phi, &l));
}
