//! Local Morse cohomology, chain-level cup products and relative
//! cup-lengths for the quadratic flows `f(x) = ½<x, R x>` on spheres and
//! projective spaces, optionally times a line factor.
//!
//! The geometric core is generic over the scalar type ([`scalar::Real`]);
//! the aliases below fix it to `f64`.

pub mod cli;
pub mod coefficients;
pub mod complex;
pub mod cup;
pub mod cuplength;
pub mod eigenflow;
pub mod error;
pub mod intersections;
pub mod linalg;
pub mod oracle;
pub mod scalar;

pub use coefficients::{RingMatrix, RingTag};
pub use complex::{Cochain, GeneratorLabel, GradedComplex};
pub use cup::{CupStructure, IsolationVerdict};
pub use cuplength::CupLengthReport;
pub use eigenflow::{CriticalPointLabel, Sheet, Space};
pub use error::{Error, Result};
pub use oracle::OracleConfig;
pub use scalar::Sign;

pub type Spectrum = eigenflow::SymmetricSpectrum<f64>;
pub type Datum = eigenflow::MorseDatum<f64>;
pub type Point = eigenflow::Point<f64>;
pub type Vertical = eigenflow::Vertical<f64>;
pub type Stratum = eigenflow::LinearStratum<f64>;
pub type Tolerances = scalar::Tolerances<f64>;
pub type Matrix = linalg::Matrix<f64>;
pub type OrientedSubspace = intersections::OrientedSubspace<f64>;
pub type CoorientedStratum = intersections::CoorientedStratum<f64>;
