//! Small dense linear algebra for the regression kernels.
//!
//! Design matrices here have at most a handful of columns (3 for the
//! encompassing regression, `p + 1` for an AR(p) fit), so everything is
//! written directly: least squares by Householder QR, rank detection by
//! one-sided Jacobi SVD on the triangular factor, and `(X'X)^-1` from the
//! inverse of `R`. The explicit normal-equations route is deliberately NOT
//! used here; it exists only as an independent oracle in the test suites.

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DMat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> DMat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DMat::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = F::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            debug_assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        DMat { rows: r, cols: c, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> F {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut F {
        &mut self.data[i * self.cols + j]
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DMat<F>) -> DMat<F> {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = DMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a == F::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    *out.at_mut(i, j) = out.at(i, j) + a * other.at(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> DMat<F> {
        let mut out = DMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(j, i) = self.at(i, j);
            }
        }
        out
    }
}

/// Why a least-squares solve could not proceed.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LinalgError {
    /// Singular-value ratio below tolerance. Carries the observed ratio and
    /// the right singular vector of the smallest singular value, which names
    /// the (near-)dependent columns.
    RankDeficient { ratio: f64, null_vector: Vec<f64> },
    /// Fewer rows than columns.
    Underdetermined { rows: usize, cols: usize },
}

/// Output of a least-squares solve.
#[derive(Debug, Clone)]
pub(crate) struct LeastSquares<F> {
    /// Coefficient vector, length = columns of the design.
    pub coeffs: Vec<F>,
    /// `(X'X)^-1`, computed as `R^-1 R^-T` from the QR factorization.
    pub xtx_inv: DMat<F>,
}

/// Householder QR least squares with a rank check.
///
/// `rank_tol` is the smallest-to-largest singular-value ratio below which the
/// design is declared rank deficient.
pub(crate) fn lsq_solve<F: Scalar>(
    x: &DMat<F>,
    y: &[F],
    rank_tol: f64,
) -> Result<LeastSquares<F>, LinalgError> {
    let n = x.nrows();
    let k = x.ncols();
    debug_assert_eq!(y.len(), n);
    if n < k {
        return Err(LinalgError::Underdetermined { rows: n, cols: k });
    }

    // Householder reduction of [X | y] to [R | Q'y].
    let mut a = x.clone();
    let mut rhs = y.to_vec();
    for j in 0..k {
        // Column norm below the diagonal.
        let mut norm = F::zero();
        for i in j..n {
            norm = norm + a.at(i, j) * a.at(i, j);
        }
        let norm = norm.sqrt();
        if norm == F::zero() {
            continue; // exactly-zero column; the SVD check below flags it
        }
        let alpha = if a.at(j, j) >= F::zero() { -norm } else { norm };
        // v = x_j - alpha * e_j, stored in place of the column tail.
        let v0 = a.at(j, j) - alpha;
        let mut vtv = v0 * v0;
        for i in (j + 1)..n {
            vtv = vtv + a.at(i, j) * a.at(i, j);
        }
        if vtv > F::zero() {
            let two = F::from_f64_lit(2.0);
            // Apply H = I - 2 v v' / (v'v) to the remaining columns and rhs.
            for col in (j + 1)..k {
                let mut dot = v0 * a.at(j, col);
                for i in (j + 1)..n {
                    dot = dot + a.at(i, j) * a.at(i, col);
                }
                let scale = two * dot / vtv;
                *a.at_mut(j, col) = a.at(j, col) - scale * v0;
                for i in (j + 1)..n {
                    *a.at_mut(i, col) = a.at(i, col) - scale * a.at(i, j);
                }
            }
            let mut dot = v0 * rhs[j];
            for i in (j + 1)..n {
                dot = dot + a.at(i, j) * rhs[i];
            }
            let scale = two * dot / vtv;
            rhs[j] = rhs[j] - scale * v0;
            for i in (j + 1)..n {
                rhs[i] = rhs[i] - scale * a.at(i, j);
            }
        }
        *a.at_mut(j, j) = alpha;
        for i in (j + 1)..n {
            *a.at_mut(i, j) = F::zero();
        }
    }

    // Upper-triangular factor.
    let mut r = DMat::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            *r.at_mut(i, j) = a.at(i, j);
        }
    }

    // Rank check on the singular values of R (identical to those of X).
    let (sv, v) = jacobi_svd(&r);
    let smax = sv[0];
    let smin = sv[k - 1];
    let ratio = if smax > F::zero() {
        (smin / smax).to_f64().unwrap_or(0.0)
    } else {
        0.0
    };
    if !(ratio > rank_tol) {
        let null_vector = (0..k)
            .map(|i| v.at(i, k - 1).to_f64().unwrap_or(0.0))
            .collect();
        return Err(LinalgError::RankDeficient { ratio, null_vector });
    }

    // Back substitution R beta = (Q'y)[0..k].
    let mut coeffs = vec![F::zero(); k];
    for i in (0..k).rev() {
        let mut acc = rhs[i];
        for j in (i + 1)..k {
            acc = acc - r.at(i, j) * coeffs[j];
        }
        coeffs[i] = acc / r.at(i, i);
    }

    // (X'X)^-1 = R^-1 R^-T.
    let rinv = invert_upper(&r);
    let xtx_inv = rinv.matmul(&rinv.transpose());

    Ok(LeastSquares { coeffs, xtx_inv })
}

/// Invert an upper-triangular matrix by back substitution on the identity.
fn invert_upper<F: Scalar>(r: &DMat<F>) -> DMat<F> {
    let k = r.nrows();
    let mut inv = DMat::zeros(k, k);
    for col in 0..k {
        for i in (0..=col).rev() {
            let mut acc = if i == col { F::one() } else { F::zero() };
            for j in (i + 1)..=col {
                acc = acc - r.at(i, j) * inv.at(j, col);
            }
            *inv.at_mut(i, col) = acc / r.at(i, i);
        }
    }
    inv
}

/// One-sided Jacobi SVD of a small square matrix.
///
/// Returns singular values in descending order and the matching right
/// singular vectors as columns of `V`.
pub(crate) fn jacobi_svd<F: Scalar>(m: &DMat<F>) -> (Vec<F>, DMat<F>) {
    let k = m.ncols();
    debug_assert_eq!(m.nrows(), k);
    let mut b = m.clone();
    let mut v = DMat::identity(k);
    let eps = F::from_f64_lit(1e-30);

    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let mut app = F::zero();
                let mut aqq = F::zero();
                let mut apq = F::zero();
                for i in 0..k {
                    app = app + b.at(i, p) * b.at(i, p);
                    aqq = aqq + b.at(i, q) * b.at(i, q);
                    apq = apq + b.at(i, p) * b.at(i, q);
                }
                if apq.abs() <= eps + F::epsilon() * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (F::from_f64_lit(2.0) * apq);
                let t = if zeta >= F::zero() {
                    F::one() / (zeta + (F::one() + zeta * zeta).sqrt())
                } else {
                    -F::one() / (-zeta + (F::one() + zeta * zeta).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..k {
                    let bp = b.at(i, p);
                    let bq = b.at(i, q);
                    *b.at_mut(i, p) = c * bp - s * bq;
                    *b.at_mut(i, q) = s * bp + c * bq;
                    let vp = v.at(i, p);
                    let vq = v.at(i, q);
                    *v.at_mut(i, p) = c * vp - s * vq;
                    *v.at_mut(i, q) = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<(F, usize)> = (0..k)
        .map(|j| {
            let mut norm = F::zero();
            for i in 0..k {
                norm = norm + b.at(i, j) * b.at(i, j);
            }
            (norm.sqrt(), j)
        })
        .collect();
    sv.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));

    let mut v_sorted = DMat::zeros(k, k);
    for (new_col, (_, old_col)) in sv.iter().enumerate() {
        for i in 0..k {
            *v_sorted.at_mut(i, new_col) = v.at(i, *old_col);
        }
    }
    (sv.into_iter().map(|(s, _)| s).collect(), v_sorted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_exact_system() {
        // y = 1 + 2 a + 3 b on a full-rank design.
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|i| {
                let a = (i as f64).sin();
                let b = (i as f64 * 0.7).cos();
                vec![1.0, a, b]
            })
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| 1.0 + 2.0 * r[1] + 3.0 * r[2]).collect();
        let x = DMat::from_rows(&rows);
        let fit = lsq_solve(&x, &y, 1e-12).unwrap();
        assert_relative_eq!(fit.coeffs[0], 1.0, max_relative = 1e-10);
        assert_relative_eq!(fit.coeffs[1], 2.0, max_relative = 1e-10);
        assert_relative_eq!(fit.coeffs[2], 3.0, max_relative = 1e-10);
    }

    #[test]
    fn xtx_inverse_matches_direct_inverse() {
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![1.0, i as f64, (i as f64).powi(2) / 10.0])
            .collect();
        let x = DMat::from_rows(&rows);
        let y = vec![0.0; 10];
        let fit = lsq_solve(&x, &y, 1e-12).unwrap();
        // Check (X'X) * xtx_inv = I.
        let xtx = x.transpose().matmul(&x);
        let prod = xtx.matmul(&fit.xtx_inv);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(prod.at(i, j), expect, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn flags_duplicate_columns() {
        let rows: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                let a = i as f64 + 1.0;
                vec![1.0, a, a]
            })
            .collect();
        let x = DMat::from_rows(&rows);
        let y = vec![1.0; 6];
        match lsq_solve(&x, &y, 1e-12) {
            Err(LinalgError::RankDeficient { null_vector, .. }) => {
                // The null direction lives in columns 1 and 2.
                assert!(null_vector[1].abs() > 0.5);
                assert!(null_vector[2].abs() > 0.5);
                assert!(null_vector[0].abs() < 0.1);
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn singular_values_match_eigen_route() {
        // Singular values squared are eigenvalues of M'M; check the trace and
        // determinant identities on a 2x2 case.
        let m = DMat::from_rows(&[vec![3.0, 1.0], vec![-0.5, 2.0]]);
        let (sv, v) = jacobi_svd(&m);
        let mtm = m.transpose().matmul(&m);
        let trace = mtm.at(0, 0) + mtm.at(1, 1);
        let det = mtm.at(0, 0) * mtm.at(1, 1) - mtm.at(0, 1) * mtm.at(1, 0);
        let s2: Vec<f64> = sv.iter().map(|s| s * s).collect();
        assert_relative_eq!(s2[0] + s2[1], trace, max_relative = 1e-10);
        assert_relative_eq!(s2[0] * s2[1], det, max_relative = 1e-10);
        // Right singular vectors are orthonormal.
        for i in 0..2 {
            let norm = v.at(0, i) * v.at(0, i) + v.at(1, i) * v.at(1, i);
            assert_relative_eq!(norm, 1.0, max_relative = 1e-12);
        }
        let dot = v.at(0, 0) * v.at(0, 1) + v.at(1, 0) * v.at(1, 1);
        assert_relative_eq!(dot, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn underdetermined_rejected() {
        let x: DMat<f64> = DMat::from_rows(&[vec![1.0, 2.0, 3.0]]);
        assert!(matches!(
            lsq_solve(&x, &[1.0], 1e-12),
            Err(LinalgError::Underdetermined { .. })
        ));
    }
}
