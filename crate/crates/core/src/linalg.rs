//! Dense complex matrix helpers backed by nalgebra's SVD.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Row-major square or rectangular complex matrix carrying algebra elements.
pub type ComplexMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a matrix from row-major nested rows of real numbers.
pub fn real_matrix(rows: &[&[f64]]) -> ComplexMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, m, |i, j| c(rows[i][j], 0.0))
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Count of singular values above `tol * sigma_max`; zero for the zero matrix.
pub fn numerical_rank(m: &ComplexMatrix, tol: f64) -> usize {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}

/// Count of singular values above the absolute cutoff `threshold`.
pub fn rank_above(m: &ComplexMatrix, threshold: f64) -> usize {
    singular_values(m)
        .iter()
        .filter(|&&s| s > threshold)
        .count()
}

/// Moore-Penrose pseudoinverse of the rank-`rank` truncation of `m`.
///
/// Uses a column-pivoted QR factorisation `m P = Q R`, keeps the leading
/// `rank` rows `G` of `R P^T`, and returns `G^+ Q_r^H` with `G^+` from a
/// second QR of `G^H`. This is accurate to a few ulps, whereas the complex
/// SVD available here loses about three digits in its singular vectors.
pub fn pinv_truncated(m: &ComplexMatrix, rank: usize) -> ComplexMatrix {
    let (rows, cols) = m.shape();
    let rank = rank.min(rows).min(cols);
    if rank == 0 {
        return DMatrix::zeros(cols, rows);
    }
    let qr = m.clone().col_piv_qr();
    let q = qr.q();
    let mut g = qr.r();
    qr.p().inv_permute_columns(&mut g);
    let q_r = q.columns(0, rank).into_owned();
    let g_r = g.rows(0, rank).into_owned();
    // G^H = Q2 R2  =>  G^+ = Q2 R2^-H
    let inner = g_r.adjoint().qr();
    let q2 = inner.q();
    let r2h = inner.r().adjoint();
    let y = r2h
        .solve_lower_triangular(&q_r.adjoint())
        .unwrap_or_else(|| DMatrix::zeros(rank, rows));
    q2 * y
}

/// Orthonormal basis of the leading `rank`-dimensional column space of `m`,
/// from a column-pivoted QR factorisation.
pub fn range_basis(m: &ComplexMatrix, rank: usize) -> ComplexMatrix {
    let rank = rank.min(m.nrows()).min(m.ncols());
    let q = m.clone().col_piv_qr().q();
    q.columns(0, rank).into_owned()
}

/// Moore-Penrose pseudoinverse with singular values below `tol * sigma_max` discarded.
pub fn pinv(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    pinv_truncated(m, numerical_rank(m, tol))
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

pub fn block_diagonal(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let m: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(n, m);
    let (mut r, mut col) = (0, 0);
    for b in blocks {
        out.view_mut((r, col), b.shape()).copy_from(b);
        r += b.nrows();
        col += b.ncols();
    }
    out
}

pub fn kronecker(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    x.kronecker(y)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(numerical_rank(&DMatrix::identity(3, 3), 1e-12), 3);
        assert_eq!(numerical_rank(&DMatrix::zeros(3, 3), 1e-12), 0);
        assert_eq!(
            numerical_rank(&real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]]), 1e-12),
            1
        );
    }

    #[test]
    fn pinv_of_rank_one() {
        let m = real_matrix(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let p = pinv(&m, 1e-12);
        let expected = real_matrix(&[&[0.25, 0.25], &[0.25, 0.25]]);
        assert!(frobenius(&(p - expected)) < 1e-14);
    }

    #[test]
    fn pinv_penrose_conditions_complex() {
        let m = DMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, (i as f64) - (j as f64)));
        let p = pinv(&m, 1e-12);
        assert!(frobenius(&(&m * &p * &m - &m)) < 1e-10);
        assert!(frobenius(&(&p * &m * &p - &p)) < 1e-10);
        let mp = &m * &p;
        assert!(frobenius(&(mp.adjoint() - &mp)) < 1e-10);
    }

    #[test]
    fn block_diagonal_places_blocks() {
        let a = real_matrix(&[&[1.0]]);
        let b = real_matrix(&[&[2.0, 3.0], &[4.0, 5.0]]);
        let d = block_diagonal(&[a, b]);
        assert_eq!(d.shape(), (3, 3));
        assert_eq!(d[(1, 2)], c(3.0, 0.0));
        assert_eq!(d[(0, 1)], c(0.0, 0.0));
    }
}
