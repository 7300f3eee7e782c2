use pdrazin_core::generators::{
    achievable_indices, gen_commuting_pair, gen_lambda_pair, gen_orthogonal_family,
    gen_orthogonal_pair, gen_with_index, RandomSpec,
};
use pdrazin_core::identities::lambda::lambda_residual;
use pdrazin_core::{drazin_index, AlgebraContext, Complex64, ContextKind, Tolerances};
use proptest::prelude::*;

const KINDS: [ContextKind; 4] = [
    ContextKind::FullMatrix,
    ContextKind::UpperTriangular,
    ContextKind::TruncatedPolynomial,
    ContextKind::DirectSum,
];

const LAMBDAS: [(f64, f64); 5] = [(2.0, 0.0), (0.5, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.3, 0.4)];

#[test]
fn prescribed_index_is_hit_exactly() {
    let tol = Tolerances::default();
    for kind in &KINDS[..3] {
        for n in 2..=8 {
            let ctx = AlgebraContext::of_kind(*kind, n).unwrap();
            for target in achievable_indices(&ctx) {
                for seed in 0..1000u64 {
                    let spec = RandomSpec::new(seed, ctx.clone()).with_index(target);
                    let a = gen_with_index(&spec).unwrap();
                    assert_eq!(drazin_index(&a, &tol), target, "{ctx} seed {seed}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn same_spec_same_instance(k in 0..4usize, n in 2..=8usize, seed in any::<u64>(), l in 0..5usize) {
        let ctx = AlgebraContext::of_kind(KINDS[k], n).unwrap();
        let spec = RandomSpec::new(seed, ctx).with_lambda(Complex64::new(LAMBDAS[l].0, LAMBDAS[l].1));
        let (a1, b1) = gen_commuting_pair(&spec).unwrap();
        let (a2, b2) = gen_commuting_pair(&spec).unwrap();
        prop_assert_eq!(a1.matrix(), a2.matrix());
        prop_assert_eq!(b1.matrix(), b2.matrix());
        let p1 = gen_lambda_pair(&spec).unwrap();
        let p2 = gen_lambda_pair(&spec).unwrap();
        prop_assert_eq!(p1.a.matrix(), p2.a.matrix());
        prop_assert_eq!(p1.b.matrix(), p2.b.matrix());
    }

    #[test]
    fn generated_pairs_satisfy_their_hypotheses(k in 0..4usize, n in 2..=8usize, seed in any::<u64>(), l in 0..5usize) {
        let tol = Tolerances::default();
        let ctx = AlgebraContext::of_kind(KINDS[k], n).unwrap();
        let lambda = Complex64::new(LAMBDAS[l].0, LAMBDAS[l].1);
        let spec = RandomSpec::new(seed, ctx).with_lambda(lambda);
        let (a, b) = gen_commuting_pair(&spec).unwrap();
        prop_assert!(a.commutation_residual(&b) <= tol.res);
        let (p, q) = gen_orthogonal_pair(&spec).unwrap();
        prop_assert_eq!((&p * &q).norm(), 0.0);
        prop_assert_eq!((&q * &p).norm(), 0.0);
        let fam = gen_orthogonal_family(&spec, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    prop_assert_eq!((&fam[i] * &fam[j]).norm(), 0.0);
                }
            }
        }
        let pair = gen_lambda_pair(&spec).unwrap();
        prop_assert!(lambda_residual(&pair.a, &pair.b, lambda) <= tol.res);
    }
}

#[test]
fn lambda_two_shift_block() {
    let (a, b) = pdrazin_core::generators::weighted_shift_pair(Complex64::new(2.0, 0.0), 2);
    assert_eq!(a[(0, 0)], Complex64::new(2.0, 0.0));
    assert_eq!(a[(1, 1)], Complex64::new(1.0, 0.0));
    assert_eq!(b[(0, 1)], Complex64::new(1.0, 0.0));
    let ab = &a * &b;
    let ba = &b * &a;
    assert_eq!(ab, ba * Complex64::new(2.0, 0.0));
}

#[test]
fn missing_lambda_is_rejected() {
    let spec = RandomSpec::new(0, AlgebraContext::full(3).unwrap());
    assert!(gen_lambda_pair(&spec).is_err());
    let zero = spec.with_lambda(Complex64::new(0.0, 0.0));
    assert!(gen_lambda_pair(&zero).is_err());
}
