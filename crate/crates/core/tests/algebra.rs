use std::sync::Arc;

use nalgebra::DMatrix;
use pdrazin_core::{AlgebraContext, AlgebraElement, Complex64, ContextKind, Tolerances};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [ContextKind; 4] = [
    ContextKind::FullMatrix,
    ContextKind::UpperTriangular,
    ContextKind::TruncatedPolynomial,
    ContextKind::DirectSum,
];

fn context() -> impl Strategy<Value = AlgebraContext> {
    (0..4usize, 2..=6usize).prop_map(|(k, n)| AlgebraContext::of_kind(KINDS[k], n).unwrap())
}

fn random_element(ctx: &Arc<AlgebraContext>, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let n = ctx.rep_dim();
    let m = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    AlgebraElement::new(ctx.clone(), ctx.project_pattern(&m)).unwrap()
}

/// Random element whose radical distance is exactly zero.
fn radical_element(ctx: &Arc<AlgebraContext>, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let x = random_element(ctx, rng);
    let r = ctx.project_radical(x.matrix());
    AlgebraElement::new(ctx.clone(), r).unwrap()
}

fn rel(x: &AlgebraElement, y: &AlgebraElement) -> f64 {
    (x - y).norm() / x.norm().max(y.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_laws_hold(ctx in context(), seed in any::<u64>()) {
        let ctx = Arc::new(ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_element(&ctx, &mut rng);
        let y = random_element(&ctx, &mut rng);
        let z = random_element(&ctx, &mut rng);
        let one = x.one();
        prop_assert!(rel(&(&one * &x), &x) <= 1e-12);
        prop_assert!(rel(&(&x * &one), &x) <= 1e-12);
        prop_assert!(rel(&(&(&x * &y) * &z), &(&x * &(&y * &z))) <= 1e-12);
        prop_assert!(rel(&(&x * &(&y + &z)), &(&(&x * &y) + &(&x * &z))) <= 1e-12);
        prop_assert!(rel(&(&(&x + &y) * &z), &(&(&x * &z) + &(&y * &z))) <= 1e-12);
    }

    #[test]
    fn operations_stay_in_the_algebra(ctx in context(), seed in any::<u64>(), s in -3.0..3.0f64) {
        let tol = Tolerances::default();
        let ctx = Arc::new(ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_element(&ctx, &mut rng);
        let y = random_element(&ctx, &mut rng);
        prop_assert!((&x * &y).is_valid(tol.pattern));
        prop_assert!((&x + &y).is_valid(tol.pattern));
        prop_assert!(x.scale(Complex64::new(s, -s)).is_valid(tol.pattern));
    }

    #[test]
    fn radical_is_a_two_sided_ideal(ctx in context(), seed in any::<u64>()) {
        let tol = Tolerances::default();
        let ctx = Arc::new(ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = radical_element(&ctx, &mut rng);
        prop_assert_eq!(a.radical_distance(), 0.0);
        let b = random_element(&ctx, &mut rng);
        prop_assert!((&a * &b).in_radical(tol.rad));
        prop_assert!((&b * &a).in_radical(tol.rad));
    }

    #[test]
    fn powers_of_radical_sums_stay_in_radical(ctx in context(), seed in any::<u64>()) {
        let tol = Tolerances::default();
        let ctx = Arc::new(ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = radical_element(&ctx, &mut rng);
        let b = radical_element(&ctx, &mut rng);
        let s = &a + &b;
        for k in 1..=ctx.rep_dim() {
            prop_assert!(s.pow(k).in_radical(tol.rad), "k = {}", k);
        }
    }
}

#[test]
fn norm_is_submultiplicative() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kind in KINDS {
        let ctx = Arc::new(AlgebraContext::of_kind(kind, 5).unwrap());
        for _ in 0..1000 {
            let x = random_element(&ctx, &mut rng);
            let y = random_element(&ctx, &mut rng);
            assert!((&x * &y).norm() <= x.norm() * y.norm() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn truncated_polynomial_square_of_one_plus_x() {
    let ctx = Arc::new(AlgebraContext::polynomial(3).unwrap());
    let one = Complex64::new(1.0, 0.0);
    let p = AlgebraElement::polynomial(ctx, &[one, one, Complex64::default()]).unwrap();
    let sq = (&p * &p).coefficients().unwrap();
    assert_eq!(sq, vec![one, Complex64::new(2.0, 0.0), one]);
}

#[test]
fn scalar_context_is_allowed() {
    let ctx = Arc::new(AlgebraContext::full(1).unwrap());
    let x = AlgebraElement::scalar(ctx, Complex64::new(4.0, 0.0));
    assert_eq!(x.norm(), 4.0);
    assert_eq!(x.radical_distance(), 4.0);
}
