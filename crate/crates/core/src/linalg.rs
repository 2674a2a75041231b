//! Small dense floating-point linear algebra.
//!
//! Sizes in this crate never exceed a handful of rows, so everything here is
//! written for clarity and accuracy: Jacobi rotations for the symmetric
//! eigenproblem and one-sided (Hestenes) Jacobi for the SVD. Rank decisions
//! threshold singular values relative to the largest one.

use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors, all of length `dim`.
    pub fn from_columns(dim: usize, columns: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(dim, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length");
            for (i, &x) in col.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "shape mismatch in matrix-vector product");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Largest `|a_ij - a_ji|`, or `None` when not square.
    pub fn asymmetry(&self) -> Option<T> {
        if self.rows != self.cols {
            return None;
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        Some(worst)
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn scaled<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

/// Unit vector in the direction of `a`, or `None` for a (numerically) zero vector.
pub fn normalized<T: Real>(a: &[T]) -> Option<Vec<T>> {
    let n = norm(a);
    if n <= T::min_positive_value().sqrt() {
        None
    } else {
        Some(scaled(a, T::one() / n))
    }
}

/// `Σ coeffs[i] * vectors[i]`.
pub fn combine<T: Real>(dim: usize, coeffs: &[T], vectors: &[Vec<T>]) -> Vec<T> {
    let mut out = vec![T::zero(); dim];
    for (&c, v) in coeffs.iter().zip(vectors) {
        for (o, &x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

pub fn unit_vector<T: Real>(dim: usize, i: usize) -> Vec<T> {
    let mut e = vec![T::zero(); dim];
    e[i] = T::one();
    e
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching unit eigenvectors.
pub fn symmetric_eigen<T: Real>(m: &Matrix<T>) -> (Vec<T>, Vec<Vec<T>>) {
    let n = m.rows();
    assert_eq!(n, m.cols(), "symmetric_eigen needs a square matrix");
    let mut a = m.clone();
    // symmetrize so rotations act on an exactly symmetric matrix
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)]) / T::lit(2.0);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    let mut v = Matrix::identity(n);
    let scale = a.max_abs().max(T::min_positive_value());
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(a[(i, j)].abs());
            }
        }
        if off <= T::epsilon() * scale * T::lit(1e-2) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = order.iter().map(|&i| v.column(i)).collect();
    (values, vectors)
}

/// Thin singular value decomposition `A V = U Σ`.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    /// Singular values, descending; length `cols`.
    pub singular: Vec<T>,
    /// Left singular vectors (length `rows`) paired with `singular`; zero for null directions.
    pub left: Vec<Vec<T>>,
    /// Right singular vectors (length `cols`), an orthonormal basis of the domain.
    pub right: Vec<Vec<T>>,
}

impl<T: Real> Svd<T> {
    fn cutoff(&self, rel_tol: T) -> T {
        let top = self.singular.first().copied().unwrap_or(T::zero());
        top * rel_tol
    }

    pub fn rank(&self, rel_tol: T) -> usize {
        let cut = self.cutoff(rel_tol);
        self.singular.iter().filter(|&&s| s > cut && s > T::zero()).count()
    }

    /// Orthonormal basis of the right null space.
    pub fn null_space(&self, rel_tol: T) -> Vec<Vec<T>> {
        let r = self.rank(rel_tol);
        self.right[r..].to_vec()
    }

    /// Orthonormal basis of the column space.
    pub fn range(&self, rel_tol: T) -> Vec<Vec<T>> {
        let r = self.rank(rel_tol);
        self.left[..r].to_vec()
    }
}

/// One-sided Jacobi SVD of an arbitrary `rows × cols` matrix.
pub fn svd<T: Real>(m: &Matrix<T>) -> Svd<T> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut u = m.clone();
    let mut v = Matrix::identity(cols);
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..rows {
                    let (up, uq) = (u[(i, p)], u[(i, q)]);
                    alpha += up * up;
                    beta += uq * uq;
                    gamma += up * uq;
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let (up, uq) = (u[(i, p)], u[(i, q)]);
                    u[(i, p)] = c * up - s * uq;
                    u[(i, q)] = s * up + c * uq;
                }
                for i in 0..cols {
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<T> = (0..cols).map(|j| norm(&u.column(j))).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite singular values"));
    let singular = order.iter().map(|&j| norms[j]).collect();
    let left = order
        .iter()
        .map(|&j| {
            let col = u.column(j);
            if norms[j] > T::zero() {
                scaled(&col, T::one() / norms[j])
            } else {
                vec![T::zero(); rows]
            }
        })
        .collect();
    let right = order.iter().map(|&j| v.column(j)).collect();
    Svd { singular, left, right }
}

pub fn rank<T: Real>(m: &Matrix<T>, rel_tol: T) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    svd(m).rank(rel_tol)
}

pub fn null_space<T: Real>(m: &Matrix<T>, rel_tol: T) -> Vec<Vec<T>> {
    if m.rows() == 0 {
        return (0..m.cols()).map(|i| unit_vector(m.cols(), i)).collect();
    }
    svd(m).null_space(rel_tol)
}

/// Orthonormal basis of `span(vectors)` in `R^dim`.
pub fn orthonormal_basis<T: Real>(dim: usize, vectors: &[Vec<T>], rel_tol: T) -> Vec<Vec<T>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    svd(&Matrix::from_columns(dim, vectors)).range(rel_tol)
}

/// Orthonormal basis of the orthogonal complement of `span(vectors)` inside
/// `span(within)` (or all of `R^dim` when `within` is `None`).
pub fn orthogonal_complement<T: Real>(
    dim: usize,
    vectors: &[Vec<T>],
    within: Option<&[Vec<T>]>,
    rel_tol: T,
) -> Vec<Vec<T>> {
    let frame: Vec<Vec<T>> = match within {
        Some(w) => orthonormal_basis(dim, w, rel_tol),
        None => (0..dim).map(|i| unit_vector(dim, i)).collect(),
    };
    if vectors.is_empty() {
        return frame;
    }
    // coefficients c with <b_i, F c> = 0
    let mut constraint = Matrix::zeros(vectors.len(), frame.len());
    for (i, b) in vectors.iter().enumerate() {
        for (j, f) in frame.iter().enumerate() {
            constraint[(i, j)] = dot(b, f);
        }
    }
    null_space(&constraint, rel_tol)
        .iter()
        .map(|c| combine(dim, c, &frame))
        .collect()
}

/// Minimum-norm least-squares solution of `m x = b`.
pub fn least_squares<T: Real>(m: &Matrix<T>, b: &[T], rel_tol: T) -> Vec<T> {
    assert_eq!(m.rows(), b.len(), "least_squares shape");
    let dec = svd(m);
    let r = dec.rank(rel_tol);
    let mut x = vec![T::zero(); m.cols()];
    for k in 0..r {
        let coef = dot(&dec.left[k], b) / dec.singular[k];
        for (xi, &vi) in x.iter_mut().zip(&dec.right[k]) {
            *xi += coef * vi;
        }
    }
    x
}

/// Determinant by LU with partial pivoting.
pub fn determinant<T: Real>(m: &Matrix<T>) -> T {
    let n = m.rows();
    assert_eq!(n, m.cols(), "determinant needs a square matrix");
    let mut a = m.clone();
    let mut det = T::one();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[(i, k)].abs().partial_cmp(&a[(j, k)].abs()).expect("finite"))
            .expect("nonempty range");
        if a[(pivot, k)] == T::zero() {
            return T::zero();
        }
        if pivot != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            det = -det;
        }
        let p = a[(k, k)];
        det *= p;
        for i in (k + 1)..n {
            let f = a[(i, k)] / p;
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                let akj = a[(k, j)];
                a[(i, j)] -= f * akj;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_swap_matrix() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let (vals, vecs): (Vec<f64>, _) = symmetric_eigen(&m);
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
        for (l, p) in vals.iter().zip(&vecs) {
            let mp = m.mul_vec(p);
            assert!(norm(&sub(&mp, &scaled(p, *l))) < 1e-14);
        }
    }

    #[test]
    fn svd_reconstructs_rank() {
        let m = Matrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 4.0, 6.0],
            vec![1.0, 0.0, 1.0],
        ]);
        let dec = svd(&m);
        assert_eq!(dec.rank(1e-9), 2);
        let ns = dec.null_space(1e-9);
        assert_eq!(ns.len(), 1);
        assert!(norm(&m.mul_vec(&ns[0])) < 1e-12);
    }

    #[test]
    fn wide_matrix_null_space() {
        let m = Matrix::from_rows(&[vec![1.0f64, 1.0, 0.0]]);
        let ns = null_space(&m, 1e-9);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(dot(m.row(0), v).abs() < 1e-14);
        }
    }

    #[test]
    fn determinant_matches_cofactor() {
        let m = Matrix::from_rows(&[
            vec![2.0, -1.0, 0.5],
            vec![0.0, 3.0, 1.0],
            vec![4.0, 1.0, -2.0],
        ]);
        let cof: f64 = 2.0 * (3.0 * -2.0 - 1.0 * 1.0) + (0.0 * -2.0 - 1.0 * 4.0)
            + 0.5 * (0.0 * 1.0 - 3.0 * 4.0);
        assert!((determinant(&m) - cof).abs() < 1e-12);
    }

    #[test]
    fn complement_within_subspace() {
        let e = |i| unit_vector::<f64>(3, i);
        let comp = orthogonal_complement(3, &[e(0)], Some(&[e(0), e(1)]), 1e-9);
        assert_eq!(comp.len(), 1);
        assert!((comp[0][1].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn least_squares_exact_system() {
        let m = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0], vec![0.0, 0.0]]);
        let x: Vec<f64> = least_squares(&m, &[2.0, 2.0, 0.0], 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 0.5).abs() < 1e-14);
    }
}
