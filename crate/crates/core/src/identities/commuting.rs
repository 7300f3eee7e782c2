//! Formulas for commuting and mutually annihilating elements.

use crate::drazin::{check_pdrazin_axioms, drazin_index, pdrazin};
use crate::element::AlgebraElement;
use crate::error::{Error, Result};
use crate::identities::{
    commuting_hypothesis, gate, orthogonal_hypothesis, orthogonality_residual,
};
use crate::series::{terminating_series, terminating_series_scaled, SeriesPolicy};
use crate::tolerance::{relative, Tolerances};

/// `(ab)^‡ = a^‡ b^‡` for commuting `a`, `b`.
pub fn product_commuting(
    a: &AlgebraElement,
    b: &AlgebraElement,
    tol: &Tolerances,
) -> Result<AlgebraElement> {
    commuting_hypothesis(a, b, tol)?;
    let ai = pdrazin(a, tol)?.inverse;
    let bi = pdrazin(b, tol)?.inverse;
    Ok(&ai * &bi)
}

/// `(a + b)^‡ = a^‡ + b^‡` when `ab = ba = 0`.
pub fn add_orthogonal(
    a: &AlgebraElement,
    b: &AlgebraElement,
    tol: &Tolerances,
) -> Result<AlgebraElement> {
    orthogonal_hypothesis(a, b, tol)?;
    Ok(&pdrazin(a, tol)?.inverse + &pdrazin(b, tol)?.inverse)
}

/// `(a_1 + ... + a_n)^‡ = a_1^‡ + ... + a_n^‡` for pairwise annihilating terms.
pub fn add_orthogonal_n(elements: &[AlgebraElement], tol: &Tolerances) -> Result<AlgebraElement> {
    let first = elements
        .first()
        .ok_or_else(|| Error::InvalidElement("empty orthogonal family".into()))?;
    for (i, x) in elements.iter().enumerate() {
        for (j, y) in elements.iter().enumerate().skip(i + 1) {
            crate::identities::same_context(x, y)?;
            let name = format!("a{}a{} = a{}a{} = 0", i + 1, j + 1, j + 1, i + 1);
            gate(&name, orthogonality_residual(x, y), tol)?;
        }
    }
    elements.iter().try_fold(first.zero_like(), |acc, x| {
        Ok(&acc + &pdrazin(x, tol)?.inverse)
    })
}

/// Result of the commuting-sum formula with the length of its series.
#[derive(Debug, Clone)]
pub struct CommutingSumTrace {
    pub result: AlgebraElement,
    /// `(1 + a^‡ b)^‡` as supplied by the oracle.
    pub one_plus_inverse: AlgebraElement,
    pub series_terms: usize,
}

/// `(a + b)^‡ = (1 + a^‡ b)^‡ a^‡ + b^‡ sum_i (-b^‡ a a^Π)^i a^Π` for commuting `a`, `b`.
pub fn add_commuting(
    a: &AlgebraElement,
    b: &AlgebraElement,
    policy: &SeriesPolicy,
    tol: &Tolerances,
) -> Result<CommutingSumTrace> {
    commuting_hypothesis(a, b, tol)?;
    let ra = pdrazin(a, tol)?;
    let bi = pdrazin(b, tol)?.inverse;
    let ai = &ra.inverse;
    let a_pi = &ra.spectral_idempotent;

    let c = &a.one() + &(ai * b);
    let one_plus_inverse = pdrazin(&c, tol)?.inverse;
    let step = -(&(&bi * a) * a_pi);
    let series = terminating_series_scaled(&step, a_pi, a.norm() * ai.norm(), policy)?;
    let result = &(&one_plus_inverse * ai) + &(&bi * &series.sum);
    Ok(CommutingSumTrace {
        result,
        one_plus_inverse,
        series_terms: series.terms,
    })
}

/// `(1 + a^‡ b)^‡ = a^Π + a^2 a^‡ (a + b)^‡`, given `(a + b)^‡` as `sum_inv`.
pub fn one_plus_from_sum(
    a: &AlgebraElement,
    b: &AlgebraElement,
    sum_inv: &AlgebraElement,
    tol: &Tolerances,
) -> Result<AlgebraElement> {
    commuting_hypothesis(a, b, tol)?;
    crate::identities::same_context(a, sum_inv)?;
    let sum = a + b;
    let k = drazin_index(&sum, tol).max(1);
    let axioms = check_pdrazin_axioms(&sum, sum_inv, k, tol);
    if !axioms.pass {
        let (axiom, residual) = axioms
            .axiom_residuals
            .iter()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .map(|(k, v)| (k.clone(), *v))
            .unwrap_or_default();
        return Err(Error::Breakdown {
            axiom: format!("(a+b)^‡ {axiom}"),
            residual,
            tolerance: tol.res,
        });
    }
    let ra = pdrazin(a, tol)?;
    let a2ai = &(a * a) * &ra.inverse;
    Ok(&ra.spectral_idempotent + &(&a2ai * sum_inv))
}

/// Which structural case of the commuting-sum formula is being specialised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupCase {
    Nilpotent,
    Invertible,
    Group,
}

impl GroupCase {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupCase::Nilpotent => "nilpotent",
            GroupCase::Invertible => "invertible",
            GroupCase::Group => "group",
        }
    }

    pub const ALL: [GroupCase; 3] = [
        GroupCase::Nilpotent,
        GroupCase::Invertible,
        GroupCase::Group,
    ];
}

impl std::str::FromStr for GroupCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nilpotent" => Ok(GroupCase::Nilpotent),
            "invertible" => Ok(GroupCase::Invertible),
            "group" => Ok(GroupCase::Group),
            other => Err(Error::InvalidSpec(format!("unknown case `{other}`"))),
        }
    }
}

/// A specialisation of the commuting-sum formula, next to the closed form
/// commonly quoted for the same case.
#[derive(Debug, Clone)]
pub struct Specialization {
    /// Derived directly from the general commuting-sum formula.
    pub corrected: AlgebraElement,
    /// The quoted closed form: `b^‡`, `(1 + a^-1 b)^‡ a^-1 + b^‡ a^-1`, or
    /// `(1 + a^# b)^‡ a^# + a^Π b^‡` respectively.
    pub printed: AlgebraElement,
    pub case_residual: f64,
    pub series_terms: usize,
}

/// Residual of the structural hypothesis on `a` for `case`.
pub fn case_residual(a: &AlgebraElement, case: GroupCase, tol: &Tolerances) -> Result<f64> {
    let n = a.rep_dim() as i32;
    Ok(match case {
        GroupCase::Nilpotent => a.pow(a.rep_dim()).norm() / a.norm().max(1.0).powi(n),
        GroupCase::Invertible => {
            let r = pdrazin(a, tol)?;
            if r.drazin_index == 0 {
                0.0
            } else {
                relative(r.spectral_idempotent.norm(), 1.0)
            }
        }
        GroupCase::Group => {
            let r = pdrazin(a, tol)?;
            if r.drazin_index <= 1 {
                0.0
            } else {
                relative((a * &r.spectral_idempotent).norm(), a.norm())
            }
        }
    })
}

/// Specialised commuting-sum formula for nilpotent, invertible or group
/// invertible `a`.
pub fn specialize_2_8(
    a: &AlgebraElement,
    b: &AlgebraElement,
    case: GroupCase,
    policy: &SeriesPolicy,
    tol: &Tolerances,
) -> Result<Specialization> {
    commuting_hypothesis(a, b, tol)?;
    let case_residual = case_residual(a, case, tol)?;
    gate(&format!("a is {}", case.as_str()), case_residual, tol)?;

    let ra = pdrazin(a, tol)?;
    let bi = pdrazin(b, tol)?.inverse;
    match case {
        GroupCase::Nilpotent => {
            let step = -(&bi * a);
            let series = terminating_series(&step, &a.one(), policy)?;
            Ok(Specialization {
                corrected: &bi * &series.sum,
                printed: bi,
                case_residual,
                series_terms: series.terms,
            })
        }
        GroupCase::Invertible => {
            let a_inv = ra.inverse;
            let c = &a.one() + &(&a_inv * b);
            let base = &pdrazin(&c, tol)?.inverse * &a_inv;
            let printed = &base + &(&bi * &a_inv);
            Ok(Specialization {
                corrected: base,
                printed,
                case_residual,
                series_terms: 0,
            })
        }
        GroupCase::Group => {
            let a_sharp = ra.inverse;
            let c = &a.one() + &(&a_sharp * b);
            let base = &pdrazin(&c, tol)?.inverse * &a_sharp;
            let corrected = &base + &(&bi * &ra.spectral_idempotent);
            let printed = &base + &(&ra.spectral_idempotent * &bi);
            Ok(Specialization {
                corrected,
                printed,
                case_residual,
                series_terms: 1,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::context::AlgebraContext;
    use crate::linalg::real_matrix;

    fn full(rows: &[&[f64]]) -> AlgebraElement {
        let ctx = Arc::new(AlgebraContext::FullMatrix(rows.len()));
        AlgebraElement::new(ctx, real_matrix(rows)).unwrap()
    }

    fn with_ctx(like: &AlgebraElement, rows: &[&[f64]]) -> AlgebraElement {
        like.with_matrix(real_matrix(rows))
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn product_of_commuting_diagonals() {
        let a = full(&[&[2.0, 0.0], &[0.0, 0.0]]);
        let b = with_ctx(&a, &[&[3.0, 0.0], &[0.0, 5.0]]);
        let p = product_commuting(&a, &b, &tol()).unwrap();
        assert!(p.relative_distance(&with_ctx(&a, &[&[1.0 / 6.0, 0.0], &[0.0, 0.0]])) < 1e-14);
        let unit = product_commuting(&a.one(), &b, &tol()).unwrap();
        assert!(unit.relative_distance(&pdrazin(&b, &tol()).unwrap().inverse) < 1e-14);
    }

    #[test]
    fn square_of_inverse() {
        let a = full(&[&[2.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let p = product_commuting(&a, &a, &tol()).unwrap();
        let oracle = pdrazin(&(&a * &a), &tol()).unwrap().inverse;
        assert!(p.relative_distance(&oracle) < 1e-12);
    }

    #[test]
    fn product_rejects_noncommuting() {
        let a = full(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let b = with_ctx(&a, &[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(matches!(
            product_commuting(&a, &b, &tol()),
            Err(Error::Hypothesis { .. })
        ));
    }

    #[test]
    fn orthogonal_sum_examples() {
        let a = full(&[&[2.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let b = with_ctx(&a, &[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 3.0]]);
        let s = add_orthogonal(&a, &b, &tol()).unwrap();
        let expected = with_ctx(
            &a,
            &[&[0.5, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0 / 3.0]],
        );
        assert!(s.relative_distance(&expected) < 1e-14);
        let z = add_orthogonal(&a, &a.zero_like(), &tol()).unwrap();
        assert!(z.relative_distance(&pdrazin(&a, &tol()).unwrap().inverse) < 1e-14);
        assert_eq!(
            add_orthogonal_n(&[a.clone(), b.clone()], &tol()).unwrap(),
            s
        );
        let single = add_orthogonal_n(std::slice::from_ref(&a), &tol()).unwrap();
        assert!(single.relative_distance(&pdrazin(&a, &tol()).unwrap().inverse) < 1e-15);
    }

    #[test]
    fn orthogonal_n_names_the_offending_pair() {
        let a = full(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let b = with_ctx(&a, &[&[0.0, 0.0], &[0.0, 1.0]]);
        let c = with_ctx(&a, &[&[1.0, 0.0], &[0.0, 0.0]]);
        match add_orthogonal_n(&[a, b, c], &tol()) {
            Err(Error::Hypothesis { name, .. }) => assert!(name.starts_with("a1a3"), "{name}"),
            other => panic!("expected hypothesis error, got {other:?}"),
        }
    }

    #[test]
    fn commuting_sum_examples() {
        let policy = SeriesPolicy::for_dim(2);
        let j = full(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = add_commuting(&j, &j.one(), &policy, &tol()).unwrap();
        assert!(
            r.result
                .relative_distance(&with_ctx(&j, &[&[1.0, -1.0], &[0.0, 1.0]]))
                < 1e-14
        );
        assert_eq!(r.series_terms, 2);

        let p = with_ctx(&j, &[&[1.0, 0.0], &[0.0, 0.0]]);
        let r = add_commuting(&p, &p, &policy, &tol()).unwrap();
        assert!(
            r.result
                .relative_distance(&with_ctx(&j, &[&[0.5, 0.0], &[0.0, 0.0]]))
                < 1e-14
        );

        let b = with_ctx(&j, &[&[2.0, 1.0], &[0.0, 2.0]]);
        let r = add_commuting(&j.zero_like(), &b, &policy, &tol()).unwrap();
        assert!(
            r.result
                .relative_distance(&pdrazin(&b, &tol()).unwrap().inverse)
                < 1e-14
        );
    }

    #[test]
    fn one_plus_examples() {
        let j = full(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let one = j.one();
        let sum_inv = pdrazin(&(&j + &one), &tol()).unwrap().inverse;
        let r = one_plus_from_sum(&j, &one, &sum_inv, &tol()).unwrap();
        assert!(r.relative_distance(&one) < 1e-14);

        let zero = j.zero_like();
        let b = with_ctx(&j, &[&[1.0, 2.0], &[0.0, 0.0]]);
        let sum_inv = pdrazin(&b, &tol()).unwrap().inverse;
        assert!(
            one_plus_from_sum(&zero, &b, &sum_inv, &tol())
                .unwrap()
                .relative_distance(&one)
                < 1e-14
        );

        let a = with_ctx(&j, &[&[2.0, 1.0], &[0.0, 3.0]]);
        let sum_inv = pdrazin(&a, &tol()).unwrap().inverse;
        assert!(
            one_plus_from_sum(&a, &zero, &sum_inv, &tol())
                .unwrap()
                .relative_distance(&one)
                < 1e-13
        );
    }

    #[test]
    fn one_plus_rejects_a_wrong_sum_inverse() {
        let a = full(&[&[2.0, 0.0], &[0.0, 1.0]]);
        let b = a.zero_like();
        assert!(matches!(
            one_plus_from_sum(&a, &b, &a.one(), &tol()),
            Err(Error::Breakdown { .. })
        ));
    }

    #[test]
    fn specialisations_against_quoted_forms() {
        let policy = SeriesPolicy::for_dim(2);
        let j = full(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let s = specialize_2_8(&j, &j.one(), GroupCase::Nilpotent, &policy, &tol()).unwrap();
        assert!(
            s.corrected
                .relative_distance(&with_ctx(&j, &[&[1.0, -1.0], &[0.0, 1.0]]))
                < 1e-14
        );
        assert!(s.printed.relative_distance(&j.one()) < 1e-14);

        let one = full(&[&[1.0]]);
        let s = specialize_2_8(&one, &one, GroupCase::Invertible, &policy, &tol()).unwrap();
        assert!((s.corrected.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((s.printed.matrix()[(0, 0)].re - 1.5).abs() < 1e-15);

        let a = full(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let b = with_ctx(&a, &[&[0.0, 0.0], &[0.0, 2.0]]);
        let s = specialize_2_8(&a, &b, GroupCase::Group, &policy, &tol()).unwrap();
        let expected = with_ctx(&a, &[&[1.0, 0.0], &[0.0, 0.5]]);
        assert!(s.corrected.relative_distance(&expected) < 1e-14);
        assert!(s.printed.relative_distance(&expected) < 1e-14);
    }

    #[test]
    fn specialisation_rejects_wrong_case() {
        let policy = SeriesPolicy::for_dim(2);
        let j = full(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            specialize_2_8(&j, &j.one(), GroupCase::Group, &policy, &tol()),
            Err(Error::Hypothesis { .. })
        ));
        assert!(matches!(
            specialize_2_8(&j.one(), &j, GroupCase::Nilpotent, &policy, &tol()),
            Err(Error::Hypothesis { .. })
        ));
    }
}
