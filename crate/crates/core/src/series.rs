use serde::{Deserialize, Serialize};

use crate::element::AlgebraElement;
use crate::error::{Error, Result};

/// Truncation contract for `sum_{i >= 0} step^i * tail`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPolicy {
    pub max_terms: usize,
    pub term_tol: f64,
}

impl SeriesPolicy {
    /// `rep_dim + 1` terms, relative term tolerance `1e-14`.
    pub fn for_dim(rep_dim: usize) -> Self {
        Self {
            max_terms: rep_dim + 1,
            term_tol: 1e-14,
        }
    }

    pub fn validated(self) -> Result<Self> {
        if self.max_terms == 0 || self.term_tol.is_nan() || self.term_tol < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "series policy needs max_terms >= 1 and term_tol >= 0, got {self:?}"
            )));
        }
        Ok(self)
    }
}

/// Partial sum of a series together with the number of terms it kept.
#[derive(Debug, Clone)]
pub struct SeriesSum {
    pub sum: AlgebraElement,
    pub terms: usize,
}

/// Sums `t_i = step^i * tail` until
/// `||t_i|| <= term_tol * max(1, ||t_0||, ||step||^i ||t_0||)`.
///
/// The trailing factor is part of every term before the stopping test: `step`
/// alone need not contract (`step = a a^D`, say) while `step^i * tail` vanishes.
/// The `||step||^i` factor is the scale of the rounding error in a computed
/// `t_i`, so a term that vanishes exactly is recognised as such.
pub fn terminating_series(
    step: &AlgebraElement,
    tail: &AlgebraElement,
    policy: &SeriesPolicy,
) -> Result<SeriesSum> {
    terminating_series_scaled(step, tail, tail.norm(), policy)
}

/// As [`terminating_series`], with `||t_0||` in the rounding scale replaced
/// by `tail_scale` when larger; for a tail such as `1 - b b^D` the error is
/// of order `||b|| ||b^D||`, not `||1 - b b^D||`.
pub fn terminating_series_scaled(
    step: &AlgebraElement,
    tail: &AlgebraElement,
    tail_scale: f64,
    policy: &SeriesPolicy,
) -> Result<SeriesSum> {
    if !step.same_context(tail) {
        return Err(Error::ContextMismatch);
    }
    let step_norm = step.norm();
    let mut scale = tail.norm().max(tail_scale);
    let floor = tail.norm().max(1.0);
    let mut sum = tail.zero_like();
    let mut term = tail.clone();
    for i in 0..=policy.max_terms {
        let size = term.norm();
        if size <= policy.term_tol * floor.max(scale) {
            return Ok(SeriesSum { sum, terms: i });
        }
        if i == policy.max_terms {
            return Err(Error::SeriesDivergence {
                max_terms: policy.max_terms,
                last_norm: size,
            });
        }
        sum = &sum + &term;
        term = step * &term;
        scale *= step_norm;
    }
    unreachable!("loop returns at i == max_terms")
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::context::AlgebraContext;
    use crate::drazin::pdrazin;
    use crate::linalg::real_matrix;
    use crate::tolerance::Tolerances;

    fn full(rows: &[&[f64]]) -> AlgebraElement {
        let ctx = Arc::new(AlgebraContext::FullMatrix(rows.len()));
        AlgebraElement::new(ctx, real_matrix(rows)).unwrap()
    }

    #[test]
    fn zero_step_keeps_only_first_term() {
        let one = full(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let s = terminating_series(&one.zero_like(), &one, &SeriesPolicy::for_dim(2)).unwrap();
        assert_eq!(s.sum, one);
        assert_eq!(s.terms, 1);
    }

    #[test]
    fn nilpotent_neumann_series() {
        let j = full(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let s = terminating_series(&j, &j.one(), &SeriesPolicy::for_dim(2)).unwrap();
        assert_eq!(s.sum, full(&[&[1.0, 1.0], &[0.0, 1.0]]));
        assert_eq!(s.terms, 2);
    }

    #[test]
    fn trailing_factor_decides_termination() {
        // a = diag(1, 0) (+) J_2: step a a^D is a non-contracting idempotent.
        let a = full(&[&[2.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let r = pdrazin(&a, &Tolerances::default()).unwrap();
        let step = &a * &r.inverse;
        let s =
            terminating_series(&step, &r.spectral_idempotent, &SeriesPolicy::for_dim(3)).unwrap();
        assert!(s.sum.relative_distance(&r.spectral_idempotent) < 1e-15);
        assert_eq!(s.terms, 1);
    }

    #[test]
    fn divergent_series_is_reported() {
        let one = full(&[&[1.0]]);
        let err = terminating_series(&one, &one, &SeriesPolicy::for_dim(1)).unwrap_err();
        assert!(matches!(err, Error::SeriesDivergence { max_terms: 2, .. }));
    }

    #[test]
    fn policy_validation() {
        assert!(SeriesPolicy {
            max_terms: 0,
            term_tol: 1e-14
        }
        .validated()
        .is_err());
        assert!(SeriesPolicy {
            max_terms: 1,
            term_tol: f64::NAN
        }
        .validated()
        .is_err());
    }
}
