//! Elements of a concrete algebra and their arithmetic.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::context::AlgebraContext;
use crate::error::{Error, Result};
use crate::linalg::{frobenius, is_finite, ComplexMatrix};
use crate::tolerance::Tolerances;

/// An element of an [`AlgebraContext`], stored as its representing matrix.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    context: Arc<AlgebraContext>,
    matrix: ComplexMatrix,
}

/// True iff `matrix` is a valid element of `ctx` within `tol_pattern`.
pub fn validate_element(ctx: &AlgebraContext, matrix: &ComplexMatrix, tol_pattern: f64) -> bool {
    let n = ctx.rep_dim();
    if matrix.shape() != (n, n) || !is_finite(matrix) {
        return false;
    }
    ctx.pattern_distance(matrix) <= tol_pattern * frobenius(matrix).max(1.0)
}

impl AlgebraElement {
    /// Validates `matrix` against the context pattern with the default tolerance.
    pub fn new(context: Arc<AlgebraContext>, matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(context, matrix, Tolerances::default().pattern)
    }

    pub fn with_tolerance(
        context: Arc<AlgebraContext>,
        matrix: ComplexMatrix,
        tol_pattern: f64,
    ) -> Result<Self> {
        let n = context.rep_dim();
        if matrix.shape() != (n, n) {
            return Err(Error::InvalidElement(format!(
                "expected {n}x{n} matrix for {context}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !is_finite(&matrix) {
            return Err(Error::InvalidElement("non-finite entry".into()));
        }
        if !validate_element(&context, &matrix, tol_pattern) {
            return Err(Error::InvalidElement(format!(
                "matrix violates the structural pattern of {context} (distance {:.3e})",
                context.pattern_distance(&matrix)
            )));
        }
        Ok(Self { context, matrix })
    }

    /// Projects `matrix` onto the context pattern without validation.
    pub(crate) fn projected(context: Arc<AlgebraContext>, matrix: &ComplexMatrix) -> Self {
        let matrix = context.project_pattern(matrix);
        Self { context, matrix }
    }

    pub fn zero(context: Arc<AlgebraContext>) -> Self {
        let n = context.rep_dim();
        Self {
            context,
            matrix: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(context: Arc<AlgebraContext>) -> Self {
        let n = context.rep_dim();
        Self {
            context,
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn scalar(context: Arc<AlgebraContext>, s: Complex64) -> Self {
        let n = context.rep_dim();
        Self {
            context,
            matrix: DMatrix::identity(n, n) * s,
        }
    }

    /// `c0 + c1 x + ... ` in a truncated polynomial context (extra
    /// coefficients beyond the truncation order are dropped).
    pub fn polynomial(context: Arc<AlgebraContext>, coeffs: &[Complex64]) -> Result<Self> {
        let AlgebraContext::TruncatedPolynomial(m) = *context else {
            return Err(Error::InvalidElement(
                "polynomial coefficients need a TruncatedPolynomial context".into(),
            ));
        };
        let matrix = DMatrix::from_fn(m, m, |i, j| {
            if j >= i {
                coeffs.get(j - i).copied().unwrap_or_default()
            } else {
                Complex64::default()
            }
        });
        Self::new(context, matrix)
    }

    /// Coefficients of a truncated polynomial element (first row of its
    /// Toeplitz representative).
    pub fn coefficients(&self) -> Option<Vec<Complex64>> {
        match *self.context {
            AlgebraContext::TruncatedPolynomial(m) => {
                Some((0..m).map(|j| self.matrix[(0, j)]).collect())
            }
            _ => None,
        }
    }

    pub fn context(&self) -> &AlgebraContext {
        &self.context
    }

    pub fn context_arc(&self) -> &Arc<AlgebraContext> {
        &self.context
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn rep_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn same_context(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.context, &other.context) || *self.context == *other.context
    }

    fn ensure_same(&self, other: &Self) -> Result<()> {
        if self.same_context(other) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// Element with the same context and a new representing matrix.
    pub(crate) fn with_matrix(&self, matrix: ComplexMatrix) -> Self {
        Self {
            context: Arc::clone(&self.context),
            matrix,
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.ensure_same(other)?;
        Ok(self.with_matrix(&self.matrix * &other.matrix))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.ensure_same(other)?;
        Ok(self.with_matrix(&self.matrix + &other.matrix))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same(other)?;
        Ok(self.with_matrix(&self.matrix - &other.matrix))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.with_matrix(&self.matrix * s)
    }

    pub fn one(&self) -> Self {
        Self::identity(Arc::clone(&self.context))
    }

    pub fn zero_like(&self) -> Self {
        Self::zero(Arc::clone(&self.context))
    }

    /// `self^k`, with `self^0 = 1`.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.with_matrix(&acc.matrix * &self.matrix);
        }
        acc
    }

    /// Frobenius norm of the representing matrix (submultiplicative).
    pub fn norm(&self) -> f64 {
        frobenius(&self.matrix)
    }

    /// Frobenius distance to the Jacobson radical of the context.
    pub fn radical_distance(&self) -> f64 {
        self.context.radical_distance(&self.matrix)
    }

    /// Radical membership: `radical_distance <= tol_rad * max(1, norm)`.
    pub fn in_radical(&self, tol_rad: f64) -> bool {
        self.radical_distance() <= tol_rad * self.norm().max(1.0)
    }

    pub fn is_valid(&self, tol_pattern: f64) -> bool {
        validate_element(&self.context, &self.matrix, tol_pattern)
    }

    /// `||self - other|| / max(1, ||other||)`.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        frobenius(&(&self.matrix - &other.matrix)) / other.norm().max(1.0)
    }

    /// Commutator residual `||ab - ba|| / max(1, ||a|| ||b||)`.
    pub fn commutation_residual(&self, other: &Self) -> f64 {
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        frobenius(&(ab - ba)) / (self.norm() * other.norm()).max(1.0)
    }
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_context(other) && self.matrix == other.matrix
    }
}

// Operator forms panic on a context mismatch; use the `checked_*` methods at
// API boundaries where the contexts are not already known to agree.
macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&AlgebraElement> for &AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: &AlgebraElement) -> AlgebraElement {
                self.$checked(rhs).expect("operands share a context")
            }
        }
        impl $tr<AlgebraElement> for AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: AlgebraElement) -> AlgebraElement {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&AlgebraElement> for AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: &AlgebraElement) -> AlgebraElement {
                (&self).$method(rhs)
            }
        }
        impl $tr<AlgebraElement> for &AlgebraElement {
            type Output = AlgebraElement;
            fn $method(self, rhs: AlgebraElement) -> AlgebraElement {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.with_matrix(-&self.matrix)
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        -&self
    }
}

impl Mul<Complex64> for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: Complex64) -> AlgebraElement {
        self.scale(rhs)
    }
}

impl Mul<Complex64> for AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: Complex64) -> AlgebraElement {
        self.scale(rhs)
    }
}
