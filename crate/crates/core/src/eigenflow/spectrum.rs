use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{Real, Tolerances};

/// Symmetric matrix together with its ordered eigenpairs.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricSpectrum<T> {
    matrix: Matrix<T>,
    eigenvalues: Vec<T>,
    eigenvectors: Vec<Vec<T>>,
}

/// Representative of `±v` whose first coordinate above `threshold` is positive.
pub fn canonical_representative<T: Real>(v: &[T], threshold: T) -> Vec<T> {
    match v.iter().find(|x| x.abs() > threshold) {
        Some(&x) if x < T::zero() => v.iter().map(|&c| -c).collect(),
        _ => v.to_vec(),
    }
}

impl<T: Real> SymmetricSpectrum<T> {
    /// Eigendecomposition with strictly increasing, `tol.gap`-separated eigenvalues.
    pub fn eigendecompose(matrix: &Matrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        if matrix.rows() != matrix.cols() || matrix.rows() < 2 {
            return Err(Error::InvalidInput(format!(
                "expected a square matrix of size at least 2, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if matrix.to_rows().iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let scale = T::one().max(matrix.max_abs());
        let asym = matrix.asymmetry().unwrap_or_else(T::zero);
        if asym > tol.sym * scale {
            return Err(Error::NonSymmetric(asym.to_f64_lossy()));
        }
        let n = matrix.rows();
        let sym = Matrix::from_fn(n, n, |i, j| (matrix[(i, j)] + matrix[(j, i)]) * T::lit(0.5));
        let (values, vectors) = linalg::symmetric_eigen(&sym);
        for i in 0..n - 1 {
            let gap = values[i + 1] - values[i];
            if gap < tol.gap {
                return Err(Error::DegenerateSpectrum { index: i, gap: gap.to_f64_lossy() });
            }
        }
        let vectors: Vec<Vec<T>> =
            vectors.iter().map(|v| canonical_representative(v, tol.on)).collect();
        for (i, p) in vectors.iter().enumerate() {
            let residual = linalg::norm(&linalg::sub(&sym.mul_vec(p), &linalg::scaled(p, values[i])));
            if residual > tol.eig * scale {
                return Err(Error::InvalidInput(format!("eigen residual {:e} at index {i}", residual.to_f64_lossy())));
            }
            for (j, q) in vectors.iter().enumerate() {
                let expected = if i == j { T::one() } else { T::zero() };
                if (linalg::dot(p, q) - expected).abs() > tol.orth {
                    return Err(Error::InvalidInput("eigenvectors are not orthonormal".into()));
                }
            }
        }
        Ok(SymmetricSpectrum { matrix: sym, eigenvalues: values, eigenvectors: vectors })
    }

    pub fn diagonal(values: &[T], tol: &Tolerances<T>) -> Result<Self> {
        let n = values.len();
        Self::eigendecompose(&Matrix::from_fn(n, n, |i, j| if i == j { values[i] } else { T::zero() }), tol)
    }

    /// Ambient dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Manifold dimension `n` of the sphere or projective space.
    pub fn n(&self) -> usize {
        self.dim() - 1
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Vec<T>] {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> &[T] {
        &self.eigenvectors[k]
    }

    /// Eigen-coefficients `a_i = <x, p_i>`.
    pub fn coefficients(&self, x: &[T]) -> Vec<T> {
        self.eigenvectors.iter().map(|p| linalg::dot(p, x)).collect()
    }

    /// Smallest gap between consecutive eigenvalues.
    pub fn min_gap(&self) -> T {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(T::infinity(), T::min)
    }

    /// Same matrix within `tol.sym` (entrywise).
    pub fn same_matrix(&self, other: &Self, tol: &Tolerances<T>) -> bool {
        self.dim() == other.dim()
            && self
                .matrix
                .to_rows()
                .iter()
                .flatten()
                .zip(other.matrix.to_rows().iter().flatten())
                .all(|(a, b)| (*a - *b).abs() <= tol.sym)
    }
}
