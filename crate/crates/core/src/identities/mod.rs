//! Constructive formulas that build an inverse from the inverses of its parts.
//!
//! Every operation checks its hypotheses first. A hypothesis residual at or
//! above `Tolerances::reject` is an error; one between `Tolerances::res` and
//! the rejection threshold is accepted but flagged as marginal.

pub mod commuting;
pub mod lambda;

pub use commuting::{
    add_commuting, add_orthogonal, add_orthogonal_n, one_plus_from_sum, product_commuting,
    specialize_2_8, CommutingSumTrace, GroupCase, Specialization,
};
pub use lambda::{
    lambda_power_identities, lambda_swap_relations, product_lambda, sub_lambda, sub_lambda_finite,
    LambdaPair, SubLambdaTrace,
};

use crate::element::AlgebraElement;
use crate::error::{Error, Result};
use crate::tolerance::{relative, Tolerances};

/// A measured hypothesis that passed the rejection gate.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub name: String,
    pub residual: f64,
    /// Above `tol.res` but below `tol.reject`.
    pub marginal: bool,
}

/// Accepts `residual` unless it reaches the rejection threshold.
pub fn gate(name: &str, residual: f64, tol: &Tolerances) -> Result<HypothesisCheck> {
    if residual.is_nan() || residual >= tol.reject {
        return Err(Error::Hypothesis {
            name: name.into(),
            residual,
            threshold: tol.reject,
        });
    }
    Ok(HypothesisCheck {
        name: name.into(),
        residual,
        marginal: residual > tol.res,
    })
}

/// `ab = ba`.
pub fn commuting_hypothesis(
    a: &AlgebraElement,
    b: &AlgebraElement,
    tol: &Tolerances,
) -> Result<HypothesisCheck> {
    same_context(a, b)?;
    gate("ab = ba", a.commutation_residual(b), tol)
}

/// `ab = ba = 0`.
pub fn orthogonal_hypothesis(
    a: &AlgebraElement,
    b: &AlgebraElement,
    tol: &Tolerances,
) -> Result<HypothesisCheck> {
    same_context(a, b)?;
    gate("ab = ba = 0", orthogonality_residual(a, b), tol)
}

pub(crate) fn orthogonality_residual(a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    let scale = a.norm() * b.norm();
    relative((a * b).norm().max((b * a).norm()), scale)
}

pub(crate) fn same_context(a: &AlgebraElement, b: &AlgebraElement) -> Result<()> {
    if a.same_context(b) {
        Ok(())
    } else {
        Err(Error::ContextMismatch)
    }
}
