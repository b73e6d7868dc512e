//! Pointwise dense linear algebra on small matrices: numeric rank, null
//! spaces, span bases and least-squares membership. Backed by nalgebra's SVD.

use nalgebra::{DMatrix, DVector};

/// Singular values below this absolute floor count as zero even when the
/// whole family is tiny. Keeps round-off-only families at rank 0.
pub const ZERO_FLOOR: f64 = 1e-13;

/// Stack equally sized vectors as the columns of a `dim × len` matrix.
pub fn columns(vecs: &[Vec<f64>], dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, vecs.len());
    for (j, v) in vecs.iter().enumerate() {
        assert_eq!(v.len(), dim, "vector {j} has length {} instead of {dim}", v.len());
        for (i, x) in v.iter().enumerate() {
            m[(i, j)] = *x;
        }
    }
    m
}

fn threshold(sv: &DVector<f64>, tol: f64) -> f64 {
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    (tol * smax).max(ZERO_FLOOR)
}

/// Numeric rank with a relative singular-value threshold.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let t = threshold(&sv, tol);
    sv.iter().filter(|s| **s > t).count()
}

/// Rank of a family of vectors of dimension `dim`.
pub fn rank_of_family(vecs: &[Vec<f64>], dim: usize, tol: f64) -> usize {
    rank(&columns(vecs, dim), tol)
}

/// Orthonormal basis of the null space of `m` (as column vectors of length `m.ncols()`).
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let (r, c) = m.shape();
    if c == 0 {
        return Vec::new();
    }
    // The thin SVD of a wide matrix does not expose the full right basis,
    // so pad with zero rows.
    let rows = r.max(c);
    let mut a = DMatrix::zeros(rows, c);
    a.view_mut((0, 0), (r, c)).copy_from(m);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let t = threshold(&svd.singular_values, tol);
    (0..c)
        .filter(|&k| svd.singular_values[k] <= t)
        .map(|k| v_t.row(k).iter().cloned().collect())
        .collect()
}

/// Orthonormal basis of the span of the given vectors.
pub fn span_basis(vecs: &[Vec<f64>], dim: usize, tol: f64) -> Vec<Vec<f64>> {
    if vecs.is_empty() {
        return Vec::new();
    }
    let svd = columns(vecs, dim).svd(true, false);
    let u = svd.u.expect("requested U");
    let t = threshold(&svd.singular_values, tol);
    (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > t)
        .map(|k| u.column(k).iter().cloned().collect())
        .collect()
}

/// Least-squares coefficients `c` minimizing `|A c - b|` where `A` has the
/// given columns, together with the residual norm.
pub fn least_squares(cols: &[Vec<f64>], b: &[f64], tol: f64) -> (Vec<f64>, f64) {
    let dim = b.len();
    let bv = DVector::from_column_slice(b);
    if cols.is_empty() {
        return (Vec::new(), bv.norm());
    }
    let a = columns(cols, dim);
    let svd = a.clone().svd(true, true);
    let eps = threshold(&svd.singular_values, tol);
    let c = svd.solve(&bv, eps).expect("U and V^T were computed");
    let residual = (&a * &c - &bv).norm();
    (c.iter().cloned().collect(), residual)
}

/// Whether two families span the same subspace at tolerance `tol`.
pub fn same_span(a: &[Vec<f64>], b: &[Vec<f64>], dim: usize, tol: f64) -> bool {
    let ra = rank_of_family(a, dim, tol);
    let rb = rank_of_family(b, dim, tol);
    let joint: Vec<Vec<f64>> = a.iter().chain(b).cloned().collect();
    ra == rb && rank_of_family(&joint, dim, tol) == ra
}

/// Inverse of a square matrix given as nested rows; `None` when singular.
pub fn invert(rows: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let inv = m.try_inverse()?;
    Some((0..n).map(|i| inv.row(i).iter().cloned().collect()).collect())
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank_of_family(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], 3, 1e-8), 2);
        assert_eq!(rank_of_family(&[vec![1.0, 0.0], vec![2.0, 0.0]], 2, 1e-8), 1);
        assert_eq!(rank_of_family(&[vec![1.0, 0.0], vec![1.0, 1e-14]], 2, 1e-8), 1);
        assert_eq!(rank_of_family(&[], 2, 1e-8), 0);
        assert_eq!(rank_of_family(&[vec![1e-17, 0.0]], 2, 1e-8), 0);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        // one row, three columns: kernel has dimension 2 and is orthogonal to the row
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let k = null_space(&m, 1e-10);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!((v[0] + v[1]).abs() < 1e-12);
            assert!((norm(v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn null_space_of_identity_is_empty() {
        assert!(null_space(&DMatrix::identity(3, 3), 1e-10).is_empty());
    }

    #[test]
    fn least_squares_membership() {
        let cols = vec![vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]];
        let (c, r) = least_squares(&cols, &[3.0, 2.0, 0.0], 1e-12);
        assert!(r < 1e-12);
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 2.0).abs() < 1e-12);
        let (_, r) = least_squares(&cols, &[0.0, 0.0, 2.0], 1e-12);
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spans() {
        let a = vec![vec![1.0, 1.0, 0.0], vec![1.0, -1.0, 0.0]];
        let b = vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]];
        assert!(same_span(&a, &b, 3, 1e-10));
        assert!(!same_span(&a, &[vec![0.0, 0.0, 1.0]], 3, 1e-10));
        assert_eq!(span_basis(&a, 3, 1e-10).len(), 2);
    }
}
