//! Concrete finite-dimensional Banach algebras.
//!
//! Every context is realised as a subalgebra of `rep_dim x rep_dim` complex
//! matrices whose Jacobson radical is a coordinate-pattern subspace, so
//! membership tests reduce to orthogonal projections.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{frobenius, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContextKind {
    FullMatrix,
    UpperTriangular,
    TruncatedPolynomial,
    DirectSum,
}

impl ContextKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ContextKind::FullMatrix => "FullMatrix",
            ContextKind::UpperTriangular => "UpperTriangular",
            ContextKind::TruncatedPolynomial => "TruncatedPolynomial",
            ContextKind::DirectSum => "DirectSum",
        }
    }
}

impl std::str::FromStr for ContextKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fullmatrix" | "full" => Ok(ContextKind::FullMatrix),
            "uppertriangular" | "upper" => Ok(ContextKind::UpperTriangular),
            "truncatedpolynomial" | "poly" | "polynomial" => Ok(ContextKind::TruncatedPolynomial),
            "directsum" | "direct" => Ok(ContextKind::DirectSum),
            other => Err(Error::InvalidContext(format!(
                "unknown context kind `{other}`"
            ))),
        }
    }
}

/// A concrete algebra together with its Jacobson radical.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraContext {
    /// All n x n complex matrices; J = {0}.
    FullMatrix(usize),
    /// Upper-triangular n x n matrices; J = strictly upper-triangular matrices.
    UpperTriangular(usize),
    /// C[x]/(x^m) in its regular representation (upper-triangular Toeplitz
    /// matrices); J = series with zero constant term.
    TruncatedPolynomial(usize),
    /// Block-diagonal direct sum; J is the direct sum of the summand radicals.
    DirectSum(Vec<AlgebraContext>),
}

impl AlgebraContext {
    pub fn full(n: usize) -> Result<Self> {
        Self::FullMatrix(n).validated()
    }

    pub fn upper(n: usize) -> Result<Self> {
        Self::UpperTriangular(n).validated()
    }

    pub fn polynomial(m: usize) -> Result<Self> {
        Self::TruncatedPolynomial(m).validated()
    }

    pub fn direct_sum(summands: Vec<AlgebraContext>) -> Result<Self> {
        Self::DirectSum(summands).validated()
    }

    /// Context of the given kind and representation size. A direct sum is
    /// split as `FullMatrix(ceil(n/2)) + TruncatedPolynomial(floor(n/2))`.
    pub fn of_kind(kind: ContextKind, n: usize) -> Result<Self> {
        match kind {
            ContextKind::FullMatrix => Self::full(n),
            ContextKind::UpperTriangular => Self::upper(n),
            ContextKind::TruncatedPolynomial => Self::polynomial(n),
            ContextKind::DirectSum => {
                if n < 2 {
                    return Err(Error::InvalidContext(
                        "direct sum needs representation size >= 2".into(),
                    ));
                }
                Self::direct_sum(vec![
                    AlgebraContext::FullMatrix(n - n / 2),
                    AlgebraContext::TruncatedPolynomial(n / 2),
                ])
            }
        }
    }

    /// Checks the structural invariants of the descriptor.
    pub fn validated(self) -> Result<Self> {
        self.check()?;
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        match self {
            AlgebraContext::FullMatrix(0)
            | AlgebraContext::UpperTriangular(0)
            | AlgebraContext::TruncatedPolynomial(0) => {
                Err(Error::InvalidContext("dimension must be positive".into()))
            }
            AlgebraContext::DirectSum(s) if s.is_empty() => {
                Err(Error::InvalidContext("direct sum of zero summands".into()))
            }
            AlgebraContext::DirectSum(s) => s.iter().try_for_each(|c| c.check()),
            _ => Ok(()),
        }
    }

    pub fn kind(&self) -> ContextKind {
        match self {
            AlgebraContext::FullMatrix(_) => ContextKind::FullMatrix,
            AlgebraContext::UpperTriangular(_) => ContextKind::UpperTriangular,
            AlgebraContext::TruncatedPolynomial(_) => ContextKind::TruncatedPolynomial,
            AlgebraContext::DirectSum(_) => ContextKind::DirectSum,
        }
    }

    /// Size of the square-matrix representation.
    pub fn rep_dim(&self) -> usize {
        match self {
            AlgebraContext::FullMatrix(n)
            | AlgebraContext::UpperTriangular(n)
            | AlgebraContext::TruncatedPolynomial(n) => *n,
            AlgebraContext::DirectSum(s) => s.iter().map(|c| c.rep_dim()).sum(),
        }
    }

    /// `(offset, summand)` pairs of a direct sum; a single entry otherwise.
    pub fn blocks(&self) -> Vec<(usize, &AlgebraContext)> {
        match self {
            AlgebraContext::DirectSum(s) => {
                let mut off = 0;
                s.iter()
                    .map(|c| {
                        let here = off;
                        off += c.rep_dim();
                        (here, c)
                    })
                    .collect()
            }
            other => vec![(0, other)],
        }
    }

    /// Whether the algebra is commutative.
    pub fn is_commutative(&self) -> bool {
        match self {
            AlgebraContext::FullMatrix(n) | AlgebraContext::UpperTriangular(n) => *n == 1,
            AlgebraContext::TruncatedPolynomial(_) => true,
            AlgebraContext::DirectSum(s) => s.iter().all(|c| c.is_commutative()),
        }
    }

    /// Orthogonal projection of an arbitrary `rep_dim` matrix onto the
    /// subspace of valid elements.
    pub fn project_pattern(&self, m: &ComplexMatrix) -> ComplexMatrix {
        match self {
            AlgebraContext::FullMatrix(_) => m.clone(),
            AlgebraContext::UpperTriangular(n) => upper_part(m, *n, 0),
            AlgebraContext::TruncatedPolynomial(n) => toeplitz_average(m, *n, 0),
            AlgebraContext::DirectSum(_) => self.map_blocks(m, |c, b| c.project_pattern(b)),
        }
    }

    /// Orthogonal projection onto the radical subspace J.
    pub fn project_radical(&self, m: &ComplexMatrix) -> ComplexMatrix {
        match self {
            AlgebraContext::FullMatrix(n) => DMatrix::zeros(*n, *n),
            AlgebraContext::UpperTriangular(n) => upper_part(m, *n, 1),
            AlgebraContext::TruncatedPolynomial(n) => toeplitz_average(m, *n, 1),
            AlgebraContext::DirectSum(_) => self.map_blocks(m, |c, b| c.project_radical(b)),
        }
    }

    /// Frobenius distance from `m` to the valid-element subspace.
    pub fn pattern_distance(&self, m: &ComplexMatrix) -> f64 {
        frobenius(&(m - self.project_pattern(m)))
    }

    /// Frobenius distance from `m` to the radical subspace.
    pub fn radical_distance(&self, m: &ComplexMatrix) -> f64 {
        frobenius(&(m - self.project_radical(m)))
    }

    fn map_blocks<F>(&self, m: &ComplexMatrix, f: F) -> ComplexMatrix
    where
        F: Fn(&AlgebraContext, &ComplexMatrix) -> ComplexMatrix,
    {
        let n = self.rep_dim();
        let mut out = DMatrix::zeros(n, n);
        for (off, c) in self.blocks() {
            let d = c.rep_dim();
            let block = m.view((off, off), (d, d)).clone_owned();
            out.view_mut((off, off), (d, d)).copy_from(&f(c, &block));
        }
        out
    }
}

impl fmt::Display for AlgebraContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraContext::FullMatrix(n) => write!(f, "FullMatrix({n})"),
            AlgebraContext::UpperTriangular(n) => write!(f, "UpperTriangular({n})"),
            AlgebraContext::TruncatedPolynomial(n) => write!(f, "TruncatedPolynomial({n})"),
            AlgebraContext::DirectSum(s) => {
                write!(f, "DirectSum(")?;
                for (i, c) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Keeps entries with `j >= i + shift`.
fn upper_part(m: &ComplexMatrix, n: usize, shift: usize) -> ComplexMatrix {
    DMatrix::from_fn(n, n, |i, j| {
        if j >= i + shift {
            m[(i, j)]
        } else {
            Default::default()
        }
    })
}

/// Upper-triangular Toeplitz matrix whose k-th superdiagonal (k >= `from`)
/// is the mean of the corresponding superdiagonal of `m`.
fn toeplitz_average(m: &ComplexMatrix, n: usize, from: usize) -> ComplexMatrix {
    let coeffs: Vec<_> = (0..n)
        .map(|k| {
            if k < from {
                return Default::default();
            }
            let s: num_complex::Complex64 = (0..n - k).map(|i| m[(i, i + k)]).sum();
            s / (n - k) as f64
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| {
        if j >= i {
            coeffs[j - i]
        } else {
            Default::default()
        }
    })
}
