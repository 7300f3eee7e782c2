//! Oracle for Drazin, group and pseudo-Drazin inverses.
//!
//! With `l = ind(a)`, orthonormal bases `Q` of `R(a^l)` and `W` of `R((a^l)^*)`
//! are built one factor of `a` at a time, and the inverse is
//! `Q (W^* a Q)^(-1) W^*`. The result is checked against the defining axioms
//! on every call. [`drazin_power_formula`] gives the classical
//! `a^l (a^(2l+1))^+ a^l` for comparison.

use crate::element::AlgebraElement;
use crate::error::{Error, Result};
use crate::linalg::{c, pinv_truncated, range_basis, rank_above, spectral_norm, ComplexMatrix};
use crate::report::VerificationReport;
use crate::tolerance::{relative, Tolerances};

/// Output of the oracle for a single element `a`.
#[derive(Debug, Clone)]
pub struct PDrazinResult {
    /// The (pseudo) Drazin inverse of `a`.
    pub inverse: AlgebraElement,
    /// Smallest `k >= 0` with `rank(a^k) = rank(a^(k+1))`.
    pub drazin_index: usize,
    /// Smallest `k >= 1` with `a^k (1 - a a^D)` in the Jacobson radical.
    pub radical_index: usize,
    /// `1 - a a^D`.
    pub spectral_idempotent: AlgebraElement,
}

/// Rank profile of the powers of `a / ||a||_2`, from `a^0` until it stabilises.
struct PowerRanks {
    /// `a / ||a||_2`, or `a` itself when `a = 0`.
    scaled: AlgebraElement,
    scale: f64,
    index: usize,
    /// `ranks[k] = rank(a^k)` for `k = 0..=index`.
    ranks: Vec<usize>,
}

impl PowerRanks {
    fn core_rank(&self) -> usize {
        self.ranks[self.index]
    }
}

fn power_ranks(a: &AlgebraElement, tol: &Tolerances) -> PowerRanks {
    let n = a.rep_dim();
    let s = spectral_norm(a.matrix());
    if is_negligible(s, n, tol) {
        let index = 1.min(n);
        let ranks = if index == 0 { vec![0] } else { vec![n, 0] };
        return PowerRanks {
            scaled: a.clone(),
            scale: 1.0,
            index,
            ranks,
        };
    }
    let scaled = a.scale(c(1.0 / s, 0.0));
    // Powers of the scaled element have spectral norm <= 1, so an absolute
    // cutoff is a cutoff relative to ||a||^k.
    let cutoff = tol.rank_threshold(n);
    let mut power = scaled.one();
    let mut ranks = vec![n];
    for k in 0..=n {
        power = &power * &scaled;
        let r = rank_above(power.matrix(), cutoff);
        if r == ranks[k] {
            return PowerRanks {
                scaled,
                scale: s,
                index: k,
                ranks,
            };
        }
        ranks.push(r);
    }
    // rank(a^n) = rank(a^(n+1)) always holds in exact arithmetic.
    ranks.truncate(n + 1);
    PowerRanks {
        scaled,
        scale: s,
        index: n,
        ranks,
    }
}

/// Elements whose spectral norm is at most the rank threshold are treated as
/// zero; otherwise rounding noise in, say, the square of a nilpotent element
/// would be rescaled and inverted.
fn is_negligible(spectral: f64, rep_dim: usize, tol: &Tolerances) -> bool {
    spectral <= tol.rank_threshold(rep_dim)
}

/// Whether `a` is zero up to the absolute rank threshold.
pub fn is_numerically_zero(a: &AlgebraElement, tol: &Tolerances) -> bool {
    is_negligible(spectral_norm(a.matrix()), a.rep_dim(), tol)
}

/// Count of singular values of `m` above `tol * sigma_max`.
pub fn numerical_rank(m: &crate::linalg::ComplexMatrix, tol: f64) -> usize {
    crate::linalg::numerical_rank(m, tol)
}

/// Drazin index `ind(a)`; `0` iff `a` is invertible.
pub fn drazin_index(a: &AlgebraElement, tol: &Tolerances) -> usize {
    power_ranks(a, tol).index
}

/// The Drazin inverse of `a` with all derived quantities.
///
/// In a finite-dimensional algebra the pseudo-Drazin inverse coincides with
/// the Drazin inverse, so this also serves as [`pdrazin`].
pub fn drazin_inverse(a: &AlgebraElement, tol: &Tolerances) -> Result<PDrazinResult> {
    let ranks = power_ranks(a, tol);
    let l = ranks.index;
    let scaled = &ranks.scaled;

    let inv_scaled =
        core_inverse(scaled.matrix(), &ranks.ranks, l).ok_or_else(|| Error::Breakdown {
            axiom: "core invertibility".into(),
            residual: f64::INFINITY,
            tolerance: tol.res,
        })?;
    let raw = a.with_matrix(inv_scaled * c(1.0 / ranks.scale, 0.0));

    let ctx = a.context();
    if !raw.is_valid(tol.pattern) {
        return Err(Error::Breakdown {
            axiom: "context membership".into(),
            residual: ctx.pattern_distance(raw.matrix()) / raw.norm().max(1.0),
            tolerance: tol.pattern,
        });
    }
    let inverse = AlgebraElement::projected(a.context_arc().clone(), raw.matrix());

    let comm = a.commutation_residual(&inverse);
    check_breakdown("commutation", comm, tol.res)?;
    let inner = inner_inverse_residual(a, &inverse);
    check_breakdown("inner inverse", inner, tol.res)?;
    let alp = a.pow(l);
    let al1 = &alp * a;
    let nil = relative(
        (&alp - &(&al1 * &inverse)).norm(),
        al1.norm() * inverse.norm(),
    );
    check_breakdown("nilpotent remainder", nil, tol.res)?;

    let spectral_idempotent = &a.one() - &(a * &inverse);
    let radical_index = radical_index_of(a, &spectral_idempotent, l, tol)?;
    Ok(PDrazinResult {
        inverse,
        drazin_index: l,
        radical_index,
        spectral_idempotent,
    })
}

/// `Q (W^* a Q)^(-1) W^*` with `Q`, `W` spanning `R(a^l)` and `R((a^l)^*)`.
fn core_inverse(a: &ComplexMatrix, ranks: &[usize], l: usize) -> Option<ComplexMatrix> {
    let n = a.nrows();
    let r = ranks[l];
    if r == 0 {
        return Some(ComplexMatrix::zeros(n, n));
    }
    let ah = a.adjoint();
    let mut q = ComplexMatrix::identity(n, n);
    let mut w = ComplexMatrix::identity(n, n);
    for &rk in &ranks[1..=l] {
        q = range_basis(&(a * &q), rk);
        w = range_basis(&(&ah * &w), rk);
    }
    let wh = w.adjoint();
    let core = &wh * a * &q;
    let y = core.lu().solve(&wh)?;
    Some(q * y)
}

/// The classical power formula `a^l (a^(2l+1))^+ a^l`, `l = ind(a)`, with the
/// pseudoinverse truncated to the rank of `a^l`. No axiom checks are applied.
/// Its accuracy degrades like the conditioning of `a^(2l+1)`.
pub fn drazin_power_formula(a: &AlgebraElement, tol: &Tolerances) -> AlgebraElement {
    let ranks = power_ranks(a, tol);
    let scaled = &ranks.scaled;
    let al = scaled.pow(ranks.index);
    let a2l1 = &(&al * &al) * scaled;
    let middle = pinv_truncated(a2l1.matrix(), ranks.core_rank());
    let inv_scaled = al.matrix() * middle * al.matrix();
    a.with_matrix(inv_scaled * c(1.0 / ranks.scale, 0.0))
}

fn check_breakdown(axiom: &str, residual: f64, tolerance: f64) -> Result<()> {
    if residual <= tolerance {
        Ok(())
    } else {
        Err(Error::Breakdown {
            axiom: axiom.into(),
            residual,
            tolerance,
        })
    }
}

/// `||bab - b|| / max(1, ||b||^2 ||a||)`.
fn inner_inverse_residual(a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    let bab = &(b * a) * b;
    relative((&bab - b).norm(), b.norm() * b.norm() * a.norm())
}

fn radical_index_of(
    a: &AlgebraElement,
    a_pi: &AlgebraElement,
    drazin_index: usize,
    tol: &Tolerances,
) -> Result<usize> {
    let mut power = a.clone();
    let limit = drazin_index.max(1) + 1;
    for k in 1..=limit {
        if (&power * a_pi).in_radical(tol.rad) {
            return Ok(k);
        }
        power = &power * a;
    }
    let last = &a.pow(limit) * a_pi;
    Err(Error::Breakdown {
        axiom: "radical index".into(),
        residual: last.radical_distance() / last.norm().max(1.0),
        tolerance: tol.rad,
    })
}

/// The pseudo-Drazin inverse `a^‡` with its radical index.
pub fn pdrazin(a: &AlgebraElement, tol: &Tolerances) -> Result<PDrazinResult> {
    drazin_inverse(a, tol)
}

/// Group inverse `a^#`; defined only when `ind(a) <= 1`.
pub fn group_inverse(a: &AlgebraElement, tol: &Tolerances) -> Result<AlgebraElement> {
    let r = drazin_inverse(a, tol)?;
    if r.drazin_index > 1 {
        return Err(Error::NotGroupInvertible {
            index: r.drazin_index,
        });
    }
    Ok(r.inverse)
}

/// Checks `ab = ba`, `bab = b` and `a^k - a^(k+1) b ∈ J` for a candidate `b`.
pub fn check_pdrazin_axioms(
    a: &AlgebraElement,
    b: &AlgebraElement,
    k: usize,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport::new("pdrazin-axioms");
    if !a.same_context(b) {
        report.claim("same_context", false);
        return report.finished();
    }
    let k = k.max(1);
    report.axiom("commutation", a.commutation_residual(b), tol.res);
    report.axiom("inner_inverse", inner_inverse_residual(a, b), tol.res);
    let ak = a.pow(k);
    let x = &ak - &(&(&ak * a) * b);
    report.axiom("radical", x.radical_distance() / x.norm().max(1.0), tol.rad);
    report.info("k", k as f64);
    report.finished()
}

/// Quasinilpotence test together with the diagnostic sequence `||a^n||^(1/n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quasinilpotence {
    pub quasinilpotent: bool,
    pub root_norms: Vec<f64>,
}

/// In finite dimension `a` is quasinilpotent iff `a^rep_dim = 0`.
pub fn is_quasinilpotent(a: &AlgebraElement, tol: &Tolerances) -> Quasinilpotence {
    let n = a.rep_dim();
    let mut power = a.one();
    let mut root_norms = Vec::with_capacity(n);
    for j in 1..=n {
        power = &power * a;
        root_norms.push(power.norm().powf(1.0 / j as f64));
    }
    let bound = tol.res * a.norm().max(1.0).powi(n as i32);
    Quasinilpotence {
        quasinilpotent: power.norm() <= bound,
        root_norms,
    }
}
