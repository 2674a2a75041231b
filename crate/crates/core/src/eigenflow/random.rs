use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use super::spectrum::SymmetricSpectrum;
use crate::error::{Error, Result};
use crate::intersections::general_position_check;
use crate::linalg::{self, Matrix};
use crate::scalar::{Real, Tolerances};

/// Attempts before a random draw gives up.
pub const RESAMPLING_BUDGET: usize = 200;

/// Random orthogonal matrix (columns) by Gram–Schmidt on Gaussian vectors.
fn random_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    loop {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
            for b in &basis {
                let c = linalg::dot(b, &v);
                v = linalg::sub(&v, &linalg::scaled(b, c));
            }
            match linalg::normalized(&v) {
                Some(u) if linalg::norm(&v) > 1e-6 => basis.push(u),
                _ => break,
            }
        }
        if basis.len() == dim {
            return basis;
        }
    }
}

/// `Q diag(λ) Q^T` with `λ_i = i + U(-0.3, 0.3)` and a random rotation `Q`.
pub fn random_matrix<R: Rng>(n: usize, rng: &mut R) -> Matrix<f64> {
    let dim = n + 1;
    let jitter = Uniform::new(-0.3, 0.3).expect("valid range");
    let values: Vec<f64> = (0..dim).map(|i| i as f64 + jitter.sample(rng)).collect();
    let q = random_orthogonal(dim, rng);
    Matrix::from_fn(dim, dim, |i, j| (0..dim).map(|k| q[k][i] * values[k] * q[k][j]).sum())
}

fn convert<T: Real>(m: &Matrix<f64>) -> Matrix<T> {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| T::lit(m[(i, j)]))
}

/// A random spectrum whose gaps pass `tol.gap`, deterministic in the rng state.
pub fn random_spectrum<T: Real, R: Rng>(n: usize, rng: &mut R, tol: &Tolerances<T>) -> Result<SymmetricSpectrum<T>> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    for _ in 0..RESAMPLING_BUDGET {
        match SymmetricSpectrum::eigendecompose(&convert(&random_matrix(n, rng)), tol) {
            Ok(s) => return Ok(s),
            Err(Error::DegenerateSpectrum { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ResamplingBudget(RESAMPLING_BUDGET))
}

/// Random spectrum from a seed.
pub fn seeded_spectrum<T: Real>(n: usize, seed: u64, tol: &Tolerances<T>) -> Result<SymmetricSpectrum<T>> {
    random_spectrum(n, &mut ChaCha8Rng::seed_from_u64(seed), tol)
}

/// Two spectra in general position, rejection-sampled from `seed`.
pub fn random_generic_pair<T: Real>(
    n: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<(SymmetricSpectrum<T>, SymmetricSpectrum<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESAMPLING_BUDGET {
        let a = random_spectrum(n, &mut rng, tol)?;
        let b = random_spectrum(n, &mut rng, tol)?;
        if general_position_check(&a, &b, tol)? {
            return Ok((a, b));
        }
    }
    Err(Error::ResamplingBudget(RESAMPLING_BUDGET))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        let tol = Tolerances::<f64>::standard();
        let (a, b) = random_generic_pair(3, 11, &tol).unwrap();
        let (c, d) = random_generic_pair(3, 11, &tol).unwrap();
        assert_eq!(a, c);
        assert_eq!(b, d);
        assert!(general_position_check(&a, &b, &tol).unwrap());
    }

    #[test]
    fn smallest_case() {
        let tol = Tolerances::<f64>::standard();
        for seed in 0..10 {
            let (a, b) = random_generic_pair(1, seed, &tol).unwrap();
            assert_eq!(a.dim(), 2);
            assert!(a.min_gap() >= tol.gap && b.min_gap() >= tol.gap);
        }
    }

    #[test]
    fn impossible_gap_exhausts_the_budget() {
        let tol = Tolerances::<f64> { gap: 5.0, ..Tolerances::standard() };
        assert_eq!(random_generic_pair::<f64>(2, 0, &tol), Err(Error::ResamplingBudget(RESAMPLING_BUDGET)));
    }
}
