//! Formulas for pairs that commute up to a nonzero factor, `ab = λ ba`.

use num_complex::Complex64;

use crate::drazin::pdrazin;
use crate::element::AlgebraElement;
use crate::error::{Error, Result};
use crate::identities::{gate, same_context, HypothesisCheck};
use crate::report::VerificationReport;
use crate::series::{terminating_series_scaled, SeriesPolicy};
use crate::tolerance::{relative, Tolerances};

/// Two elements with `ab = λ ba`, `λ != 0`.
#[derive(Debug, Clone)]
pub struct LambdaPair {
    pub a: AlgebraElement,
    pub b: AlgebraElement,
    pub lambda: Complex64,
    pub hypothesis: HypothesisCheck,
}

/// `||ab - λ ba|| / max(1, ||a|| ||b||)`.
pub fn lambda_residual(a: &AlgebraElement, b: &AlgebraElement, lambda: Complex64) -> f64 {
    let ab = a * b;
    let ba = b * a;
    relative((&ab - &ba.scale(lambda)).norm(), a.norm() * b.norm())
}

impl LambdaPair {
    pub fn new(
        a: AlgebraElement,
        b: AlgebraElement,
        lambda: Complex64,
        tol: &Tolerances,
    ) -> Result<Self> {
        if lambda == Complex64::new(0.0, 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "lambda must be finite and nonzero, got {lambda}"
            )));
        }
        same_context(&a, &b)?;
        let hypothesis = gate("ab = λba", lambda_residual(&a, &b, lambda), tol)?;
        Ok(Self {
            a,
            b,
            lambda,
            hypothesis,
        })
    }
}

/// `λ^e` for a possibly negative integer exponent.
fn lambda_pow(lambda: Complex64, e: i64) -> Complex64 {
    if e >= 0 {
        lambda.powu(e as u32)
    } else {
        lambda.inv().powu((-e) as u32)
    }
}

fn tri(n: i64) -> i64 {
    n * (n + 1) / 2
}

/// `||lhs - rhs|| / max(1, ||rhs||, bound)`, where `bound` is the
/// submultiplicative bound `|coef| * prod ||factor||` of either side: a
/// product that vanishes exactly still carries rounding error of that size.
fn product_residual(lhs: &AlgebraElement, rhs: &AlgebraElement, bound: f64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(bound).max(1.0)
}

/// Power identities for `ab = λ ba` and for the pairs `(a^‡, b)`, `(a, b^‡)`.
///
/// Entries are keyed `lem3.1(k)...` and `cor3.4(k)...`; see
/// [`product_residual`] for the residual scale.
pub fn lambda_power_identities(
    pair: &LambdaPair,
    n: usize,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let (a, b, lambda) = (&pair.a, &pair.b, pair.lambda);
    let ni = n as i64;
    let ai = pdrazin(a, tol)?.inverse;
    let bi = pdrazin(b, tol)?.inverse;
    let (an, bn) = (a.pow(n), b.pow(n));
    let (ain, bin) = (ai.pow(n), bi.pow(n));
    let lp = |e: i64| lambda_pow(lambda, e);
    let nf = n as i32;
    let (na, nb, nai, nbi) = (a.norm(), b.norm(), ai.norm(), bi.norm());

    let mut report = VerificationReport::new(format!("lambda-powers(n={n})"));
    report.hypothesis(&pair.hypothesis.name, pair.hypothesis.residual, tol.reject);
    let mut check =
        |name: &str, lhs: AlgebraElement, coef: Complex64, rhs: AlgebraElement, factors: f64| {
            let bound = factors * coef.norm().max(1.0);
            report.formula(
                format!("{name}[n={n}]"),
                product_residual(&lhs, &rhs.scale(coef), bound),
                tol.acc,
            );
        };

    let ab_bound = (na * nb).powi(nf);
    check(
        "lem3.1(1) ab^n = λ^n b^n a",
        a * &bn,
        lp(ni),
        &bn * a,
        na * nb.powi(nf),
    );
    check(
        "lem3.1(1) a^n b = λ^n b a^n",
        &an * b,
        lp(ni),
        b * &an,
        na.powi(nf) * nb,
    );
    let ab = a * b;
    let ba = b * a;
    check(
        "lem3.1(2) (ab)^n = λ^(-n(n-1)/2) a^n b^n",
        ab.pow(n),
        lp(-tri(ni - 1)),
        &an * &bn,
        ab_bound,
    );
    check(
        "lem3.1(2) (ab)^n = λ^(n(n+1)/2) b^n a^n",
        ab.pow(n),
        lp(tri(ni)),
        &bn * &an,
        ab_bound,
    );
    check(
        "lem3.1(3) (ba)^n = λ^(n(n-1)/2) b^n a^n",
        ba.pow(n),
        lp(tri(ni - 1)),
        &bn * &an,
        ab_bound,
    );
    check(
        "lem3.1(3) (ba)^n = λ^(-n(n+1)/2) a^n b^n",
        ba.pow(n),
        lp(-tri(ni)),
        &an * &bn,
        ab_bound,
    );

    let aib = &ai * b;
    let aib_bound = (nai * nb).powi(nf);
    check(
        "cor3.4(1) (a^‡b)^n = λ^(n(n-1)/2) (a^‡)^n b^n",
        aib.pow(n),
        lp(tri(ni - 1)),
        &ain * &bn,
        aib_bound,
    );
    check(
        "cor3.4(1) (a^‡b)^n = λ^(-n(n+1)/2) b^n (a^‡)^n",
        aib.pow(n),
        lp(-tri(ni)),
        &bn * &ain,
        aib_bound,
    );
    let abi = a * &bi;
    let abi_bound = (na * nbi).powi(nf);
    check(
        "cor3.4(2) (ab^‡)^n = λ^(n(n-1)/2) a^n (b^‡)^n",
        abi.pow(n),
        lp(tri(ni - 1)),
        &an * &bin,
        abi_bound,
    );
    check(
        "cor3.4(2) (ab^‡)^n = λ^(-n(n+1)/2) (b^‡)^n a^n",
        abi.pow(n),
        lp(-tri(ni)),
        &bin * &an,
        abi_bound,
    );
    Ok(report.finished())
}

/// Swap relations of the spectral idempotents and inverses under `ab = λ ba`,
/// with residuals scaled as in [`lambda_power_identities`].
pub fn lambda_swap_relations(pair: &LambdaPair, tol: &Tolerances) -> Result<VerificationReport> {
    let (a, b) = (&pair.a, &pair.b);
    let inv_lambda = pair.lambda.inv();
    let ai = pdrazin(a, tol)?.inverse;
    let bi = pdrazin(b, tol)?.inverse;
    let p = a * &ai;
    let q = b * &bi;
    let (na, nb) = (a.norm(), b.norm());

    let mut report = VerificationReport::new("lambda-swap");
    report.hypothesis(&pair.hypothesis.name, pair.hypothesis.residual, tol.reject);
    let mut check =
        |name: &str, lhs: AlgebraElement, coef: Complex64, rhs: AlgebraElement, factors: f64| {
            let bound = factors * coef.norm().max(1.0);
            report.formula(
                name,
                product_residual(&lhs, &rhs.scale(coef), bound),
                tol.acc,
            );
        };
    let one = Complex64::new(1.0, 0.0);
    check(
        "lem3.2(1) aa^‡b = baa^‡",
        &p * b,
        one,
        b * &p,
        p.norm() * nb,
    );
    check(
        "lem3.2(2) bb^‡a = abb^‡",
        &q * a,
        one,
        a * &q,
        q.norm() * na,
    );
    check(
        "thm3.3(1) a^‡b = λ^-1 ba^‡",
        &ai * b,
        inv_lambda,
        b * &ai,
        ai.norm() * nb,
    );
    check(
        "thm3.3(2) ab^‡ = λ^-1 b^‡a",
        a * &bi,
        inv_lambda,
        &bi * a,
        na * bi.norm(),
    );
    Ok(report.finished())
}

/// `(ab)^‡ = b^‡ a^‡`.
pub fn product_lambda(pair: &LambdaPair, tol: &Tolerances) -> Result<AlgebraElement> {
    gate(
        &pair.hypothesis.name,
        lambda_residual(&pair.a, &pair.b, pair.lambda),
        tol,
    )?;
    let ai = pdrazin(&pair.a, tol)?.inverse;
    let bi = pdrazin(&pair.b, tol)?.inverse;
    Ok(&bi * &ai)
}

/// Intermediate quantities of the λ-difference formula.
#[derive(Debug, Clone)]
pub struct SubLambdaTrace {
    /// `w = a a^‡ (a - b) b b^‡`.
    pub w: AlgebraElement,
    pub w_inverse: AlgebraElement,
    pub series_left_terms: usize,
    pub series_right_terms: usize,
    /// `(a - b)^‡` assembled from the formula.
    pub result: AlgebraElement,
}

/// `(a - b)^‡ = w^‡ + a^‡ sum_i (b a^‡)^i b^Π - a^Π sum_i (b^‡ a)^i b^‡`.
///
/// The right series is summed with `a^Π` folded into its tail,
/// `sum_i (b^‡ a)^i (a^Π b^‡)`, which is the same element because `a^Π`
/// commutes with `b^‡` and `a`; without the fold the terms need not vanish
/// when `a` and `b` are both invertible.
pub fn sub_lambda(
    pair: &LambdaPair,
    policy: &SeriesPolicy,
    tol: &Tolerances,
) -> Result<SubLambdaTrace> {
    gate(
        &pair.hypothesis.name,
        lambda_residual(&pair.a, &pair.b, pair.lambda),
        tol,
    )?;
    let (a, b) = (&pair.a, &pair.b);
    let ra = pdrazin(a, tol)?;
    let rb = pdrazin(b, tol)?;
    let (ai, bi) = (&ra.inverse, &rb.inverse);

    let w = &(&(a * ai) * &(a - b)) * &(b * bi);
    let w_inverse = pdrazin(&w, tol)?.inverse;

    let b_scale = b.norm() * bi.norm();
    let a_scale = a.norm() * ai.norm();
    let left = terminating_series_scaled(&(b * ai), &rb.spectral_idempotent, b_scale, policy)?;
    let right_tail = &ra.spectral_idempotent * bi;
    let right =
        terminating_series_scaled(&(bi * a), &right_tail, a_scale.max(1.0) * bi.norm(), policy)?;
    let result = &(&w_inverse + &(ai * &left.sum)) - &right.sum;
    Ok(SubLambdaTrace {
        w,
        w_inverse,
        series_left_terms: left.terms,
        series_right_terms: right.terms,
        result,
    })
}

/// Finite-sum form of the λ-difference formula with `s = max(ind(a), 1)`
/// and `t = max(ind(b), 1)`:
///
/// `(a-b)^D = w^D + (1 - bb^D) sum_{i<t} λ^(i(i+1)/2) (a^D)^(i+1) b^i
///            - [sum_{i<s} λ^(i(i+1)/2) a^i (b^D)^(i+1)] (1 - aa^D)`.
pub fn sub_lambda_finite(pair: &LambdaPair, tol: &Tolerances) -> Result<AlgebraElement> {
    gate(
        &pair.hypothesis.name,
        lambda_residual(&pair.a, &pair.b, pair.lambda),
        tol,
    )?;
    let (a, b, lambda) = (&pair.a, &pair.b, pair.lambda);
    let ra = pdrazin(a, tol)?;
    let rb = pdrazin(b, tol)?;
    let (ai, bi) = (&ra.inverse, &rb.inverse);
    let s = ra.drazin_index.max(1);
    let t = rb.drazin_index.max(1);

    let w = &(&(a * ai) * &(a - b)) * &(b * bi);
    let w_inverse = pdrazin(&w, tol)?.inverse;

    let mut left = a.zero_like();
    let mut ai_pow = ai.clone();
    let mut b_pow = a.one();
    for i in 0..t {
        let coef = lambda_pow(lambda, tri(i as i64));
        left = &left + &(&ai_pow * &b_pow).scale(coef);
        ai_pow = &ai_pow * ai;
        b_pow = &b_pow * b;
    }
    let mut right = a.zero_like();
    let mut a_pow = a.one();
    let mut bi_pow = bi.clone();
    for i in 0..s {
        let coef = lambda_pow(lambda, tri(i as i64));
        right = &right + &(&a_pow * &bi_pow).scale(coef);
        a_pow = &a_pow * a;
        bi_pow = &bi_pow * bi;
    }
    Ok(&(&w_inverse + &(&rb.spectral_idempotent * &left)) - &(&right * &ra.spectral_idempotent))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::context::AlgebraContext;
    use crate::linalg::{c, real_matrix};

    fn full(rows: &[&[f64]]) -> AlgebraElement {
        let ctx = Arc::new(AlgebraContext::FullMatrix(rows.len()));
        AlgebraElement::new(ctx, real_matrix(rows)).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn shift_pair() -> LambdaPair {
        let a = full(&[&[2.0, 0.0], &[0.0, 1.0]]);
        let b = a.with_matrix(real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]]));
        LambdaPair::new(a, b, c(2.0, 0.0), &tol()).unwrap()
    }

    fn weyl_pair() -> LambdaPair {
        let a = full(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let b = a.with_matrix(real_matrix(&[&[0.0, 1.0], &[1.0, 0.0]]));
        LambdaPair::new(a, b, c(-1.0, 0.0), &tol()).unwrap()
    }

    #[test]
    fn pair_construction_checks_hypothesis() {
        let a = full(&[&[2.0, 0.0], &[0.0, 1.0]]);
        let b = a.with_matrix(real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]]));
        assert!(LambdaPair::new(a.clone(), b.clone(), c(3.0, 0.0), &tol()).is_err());
        assert!(LambdaPair::new(a, b, c(0.0, 0.0), &tol()).is_err());
    }

    #[test]
    fn power_identities_on_examples() {
        let r = lambda_power_identities(&shift_pair(), 3, &tol()).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.formula_residuals.len(), 10);
        let r = lambda_power_identities(&weyl_pair(), 2, &tol()).unwrap();
        assert!(r.pass, "{r:?}");
        let a = full(&[&[2.0, 1.0], &[0.0, 3.0]]);
        let b = a.with_matrix(real_matrix(&[&[1.0, 1.0], &[0.0, 2.0]]));
        let commuting = LambdaPair::new(a, b, c(1.0, 0.0), &tol()).unwrap();
        assert!(lambda_power_identities(&commuting, 4, &tol()).unwrap().pass);
    }

    #[test]
    fn swap_relations_on_examples() {
        assert!(lambda_swap_relations(&shift_pair(), &tol()).unwrap().pass);
        assert!(lambda_swap_relations(&weyl_pair(), &tol()).unwrap().pass);
        let a = full(&[&[2.0, 0.0], &[0.0, 1.0]]);
        let zero = LambdaPair::new(a.clone(), a.zero_like(), c(5.0, 0.0), &tol()).unwrap();
        let r = lambda_swap_relations(&zero, &tol()).unwrap();
        assert!(r.pass && r.formula_residual == 0.0);
    }

    #[test]
    fn product_examples() {
        assert!(product_lambda(&shift_pair(), &tol()).unwrap().norm() < 1e-14);
        let p = product_lambda(&weyl_pair(), &tol()).unwrap();
        assert!(p.relative_distance(&full(&[&[0.0, -1.0], &[1.0, 0.0]])) < 1e-14);
    }

    #[test]
    fn difference_examples() {
        let policy = SeriesPolicy::for_dim(2);
        let expected = full(&[&[0.5, 0.5], &[0.0, 1.0]]);
        let trace = sub_lambda(&shift_pair(), &policy, &tol()).unwrap();
        assert!(trace.result.relative_distance(&expected) < 1e-14);
        assert!(trace.w.norm() < 1e-15);
        let finite = sub_lambda_finite(&shift_pair(), &tol()).unwrap();
        assert!(finite.relative_distance(&expected) < 1e-14);

        let a = full(&[&[2.0, 1.0], &[0.0, 0.0]]);
        let b_zero = LambdaPair::new(a.clone(), a.zero_like(), c(3.0, 0.0), &tol()).unwrap();
        let ai = pdrazin(&a, &tol()).unwrap().inverse;
        assert!(
            sub_lambda(&b_zero, &policy, &tol())
                .unwrap()
                .result
                .relative_distance(&ai)
                < 1e-14
        );
        assert!(
            sub_lambda_finite(&b_zero, &tol())
                .unwrap()
                .relative_distance(&ai)
                < 1e-14
        );

        let same = LambdaPair::new(a.clone(), a.clone(), c(1.0, 0.0), &tol()).unwrap();
        assert!(sub_lambda(&same, &policy, &tol()).unwrap().result.norm() < 1e-14);
        assert!(sub_lambda_finite(&same, &tol()).unwrap().norm() < 1e-14);
    }

    #[test]
    fn difference_of_invertible_weyl_pair_terminates() {
        let pair = weyl_pair();
        let trace = sub_lambda(&pair, &SeriesPolicy::for_dim(2), &tol()).unwrap();
        let oracle = pdrazin(&(&pair.a - &pair.b), &tol()).unwrap().inverse;
        assert!(trace.result.relative_distance(&oracle) < 1e-13);
        assert_eq!(trace.series_right_terms, 0);
    }
}
