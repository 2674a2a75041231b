//! Scalar abstraction for the floating-point geometry.
//!
//! Everything that touches eigenvectors, flows or subspace intersections is
//! written against [`Real`], so the same code runs in `f32` and `f64`.
//! The exact coefficient rings live in [`crate::coefficients`] instead.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};
use serde::{Deserialize, Serialize};

/// Floating-point scalar used by the geometric modules.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

/// A sign in `{+1, -1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn of<T: Real>(x: T) -> Sign {
        if x < T::zero() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn from_i64(x: i64) -> Option<Sign> {
        match x {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_real<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    /// `(-1)^k`.
    pub fn parity(k: usize) -> Sign {
        if k.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Numerical thresholds shared by the geometric modules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    /// Symmetry of an input matrix.
    pub sym: T,
    /// Orthonormality of computed eigenvectors.
    pub orth: T,
    /// Eigen-residual `|R p - λ p|`.
    pub eig: T,
    /// Minimum separation of consecutive eigenvalues.
    pub gap: T,
    /// Distance from the manifold accepted for an input point.
    pub on: T,
    /// Flow group-law agreement.
    pub flow: T,
    /// Relative singular-value cutoff for rank decisions.
    pub rank: T,
    /// Margin required for strict sign constraints on eigen-coefficients.
    pub pos: T,
    /// Eigen-coefficients below this are treated as absent from the support.
    pub support: T,
}

impl<T: Real> Tolerances<T> {
    /// Default thresholds, widened to a multiple of machine epsilon when `T`
    /// is coarser than `f64`.
    pub fn standard() -> Self {
        let eps = T::epsilon();
        let floor = |x: f64, ulps: f64| T::lit(x).max(eps * T::lit(ulps));
        Tolerances {
            sym: floor(1e-9, 64.0),
            orth: floor(1e-9, 64.0),
            eig: floor(1e-9, 256.0),
            gap: T::lit(1e-3),
            on: floor(1e-8, 256.0),
            flow: floor(1e-7, 4096.0),
            rank: floor(1e-9, 256.0),
            pos: floor(1e-8, 256.0),
            support: floor(1e-10, 64.0),
        }
    }
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self::standard()
    }
}
