use std::sync::Arc;

use nalgebra::DMatrix;
use pdrazin_core::generators::{achievable_indices, gen_with_index, RandomSpec};
use pdrazin_core::linalg::{c, kronecker, real_matrix};
use pdrazin_core::{
    check_pdrazin_axioms, drazin_index, drazin_inverse, drazin_power_formula, is_quasinilpotent,
    pdrazin, AlgebraContext, AlgebraElement, ComplexMatrix, ContextKind, Tolerances,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [ContextKind; 4] = [
    ContextKind::FullMatrix,
    ContextKind::UpperTriangular,
    ContextKind::TruncatedPolynomial,
    ContextKind::DirectSum,
];

fn vec_of(m: &ComplexMatrix) -> ComplexMatrix {
    let (r, cols) = m.shape();
    DMatrix::from_iterator(r * cols, 1, m.iter().copied())
}

/// Drazin inverse from a linear system: `X = a^l Y` with
/// `a^(2l+1) Y = a^l` and `a^(l+1) Y = a^l Y a`, solved by least squares.
fn linear_system_drazin(a: &ComplexMatrix, l: usize) -> ComplexMatrix {
    let n = a.nrows();
    let id = ComplexMatrix::identity(n, n);
    let mut al = id.clone();
    for _ in 0..l {
        al = &al * a;
    }
    let al1 = &al * a;
    let a2l1 = &al1 * &al;
    let k1 = kronecker(&id, &a2l1);
    let k2 = kronecker(&id, &al1) - kronecker(&a.transpose(), &al);
    let mut sys = ComplexMatrix::zeros(2 * n * n, n * n);
    sys.view_mut((0, 0), (n * n, n * n)).copy_from(&k1);
    sys.view_mut((n * n, 0), (n * n, n * n)).copy_from(&k2);
    let mut rhs = ComplexMatrix::zeros(2 * n * n, 1);
    rhs.view_mut((0, 0), (n * n, 1)).copy_from(&vec_of(&al));
    let y = sys.svd(true, true).solve(&rhs, 1e-10).unwrap();
    let y = DMatrix::from_iterator(n, n, y.iter().copied());
    al * y
}

fn element(ctx: AlgebraContext, rows: &[&[f64]]) -> AlgebraElement {
    AlgebraElement::new(Arc::new(ctx), real_matrix(rows)).unwrap()
}

fn rel(x: &AlgebraElement, y: &AlgebraElement) -> f64 {
    (x - y).norm() / y.norm().max(1.0)
}

fn generated(kind: ContextKind, n: usize, seed: u64, index: usize) -> Option<AlgebraElement> {
    let ctx = AlgebraContext::of_kind(kind, n).unwrap();
    if !achievable_indices(&ctx).contains(&index) {
        return None;
    }
    Some(gen_with_index(&RandomSpec::new(seed, ctx).with_index(index)).unwrap())
}

#[test]
fn frozen_index_one_example_matches_linear_system() {
    let a = element(
        AlgebraContext::full(2).unwrap(),
        &[&[2.0, 1.0], &[0.0, 0.0]],
    );
    let expected = real_matrix(&[&[0.5, 0.25], &[0.0, 0.0]]);
    let independent = linear_system_drazin(a.matrix(), 1);
    assert!((&independent - &expected).norm() < 1e-12);
    let r = drazin_inverse(&a, &Tolerances::default()).unwrap();
    assert_eq!(r.drazin_index, 1);
    assert!((r.inverse.matrix() - &expected).norm() < 1e-14);
}

#[test]
fn oracle_agrees_with_linear_system_on_generated_elements() {
    let tol = Tolerances::default();
    for kind in KINDS {
        for n in 2..=5 {
            for seed in 0..20u64 {
                let Some(a) = generated(kind, n, seed, seed as usize % (n + 1)) else {
                    continue;
                };
                let r = drazin_inverse(&a, &tol).unwrap();
                let x = linear_system_drazin(a.matrix(), r.drazin_index);
                let d = (r.inverse.matrix() - &x).norm() / r.inverse.norm().max(1.0);
                assert!(d <= 1e-6, "{kind:?} n={n} seed={seed}: {d:e}");
            }
        }
    }
}

#[test]
fn oracle_agrees_with_power_formula_on_well_conditioned_elements() {
    let tol = Tolerances::default();
    for seed in 0..50u64 {
        let a = generated(ContextKind::FullMatrix, 4, seed, seed as usize % 3).unwrap();
        let r = drazin_inverse(&a, &tol).unwrap();
        assert!(rel(&drazin_power_formula(&a, &tol), &r.inverse) <= 1e-6);
    }
}

#[test]
fn golden_jordan_block_radical_index_depends_on_context() {
    let tol = Tolerances::default();
    let j = [[0.0, 1.0], [0.0, 0.0]];
    let rows: [&[f64]; 2] = [&j[0], &j[1]];
    let full = pdrazin(&element(AlgebraContext::full(2).unwrap(), &rows), &tol).unwrap();
    let upper = pdrazin(&element(AlgebraContext::upper(2).unwrap(), &rows), &tol).unwrap();
    assert_eq!((full.drazin_index, full.radical_index), (2, 2));
    assert_eq!((upper.drazin_index, upper.radical_index), (2, 1));
}

#[test]
fn perturbed_inverse_fails_the_axioms() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..100u64 {
        let a = generated(ContextKind::FullMatrix, 4, seed, seed as usize % 5).unwrap();
        let r = pdrazin(&a, &tol).unwrap();
        let ctx = a.context_arc().clone();
        let e = DMatrix::from_fn(4, 4, |_, _| c(rng.random_range(-1.0..1.0), 0.0));
        let e = &e * c(1e-4 / e.norm(), 0.0);
        let b = AlgebraElement::new(ctx, r.inverse.matrix() + e).unwrap();
        let k = r.radical_index;
        assert!(check_pdrazin_axioms(&a, &r.inverse, k, &tol).pass);
        assert!(!check_pdrazin_axioms(&a, &b, k, &tol).pass, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn oracle_output_satisfies_axioms(k in 0..4usize, n in 2..=8usize, seed in any::<u64>(), t in 0..=8usize) {
        let tol = Tolerances::default();
        let Some(a) = generated(KINDS[k], n, seed, t.min(n)) else { return Ok(()) };
        let r = pdrazin(&a, &tol).unwrap();
        let report = check_pdrazin_axioms(&a, &r.inverse, r.radical_index, &tol);
        prop_assert!(report.pass, "{:?}", report.axiom_residuals);
        prop_assert_eq!(r.drazin_index, t.min(n));
        if r.drazin_index >= 1 {
            prop_assert!(r.radical_index <= r.drazin_index);
        }
    }

    #[test]
    fn spectral_idempotent_properties(k in 0..4usize, n in 2..=8usize, seed in any::<u64>(), t in 0..=8usize) {
        let tol = Tolerances::default();
        let Some(a) = generated(KINDS[k], n, seed, t.min(n)) else { return Ok(()) };
        let r = pdrazin(&a, &tol).unwrap();
        let p = &r.spectral_idempotent;
        prop_assert!(rel(&(p * p), p) <= tol.res);
        prop_assert!((&(p * &a) * &r.inverse).norm() <= tol.res);
        prop_assert!(is_quasinilpotent(&(&a * p), &tol).quasinilpotent);
        let invertible = r.drazin_index == 0;
        prop_assert_eq!(invertible, p.norm() <= tol.res);
        prop_assert_eq!(invertible, drazin_index(&a, &tol) == 0);
    }

    #[test]
    fn power_and_iterated_inverse_laws(k in 0..4usize, n in 2..=6usize, seed in any::<u64>(), t in 0..=6usize) {
        let tol = Tolerances::default();
        let Some(a) = generated(KINDS[k], n, seed, t.min(n)) else { return Ok(()) };
        let ad = pdrazin(&a, &tol).unwrap().inverse;
        for p in 1..=5 {
            let lhs = pdrazin(&a.pow(p), &tol).unwrap().inverse;
            prop_assert!(rel(&lhs, &ad.pow(p)) <= tol.acc, "n = {}", p);
        }
        let add = pdrazin(&ad, &tol).unwrap().inverse;
        prop_assert!(rel(&add, &(&(&a * &a) * &ad)) <= tol.acc);
        prop_assert!(rel(&pdrazin(&add, &tol).unwrap().inverse, &ad) <= tol.acc);
        prop_assert!(rel(&(&ad * &add), &(&a * &ad)) <= tol.acc);
    }
}
