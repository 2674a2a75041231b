//! The exactly solvable family `f(x) = ½<x, R x>` on `S^n` and `RP^n`,
//! optionally times a line factor `±(y - c)^2` on `[-1, 1]`.
//!
//! Flows, limits and (un)stable manifolds are all closed-form in the
//! eigenbasis of `R`. Connection counts over Z take their signs from
//! [`crate::intersections`].

mod datum;
mod morse;
mod random;
mod spectrum;
mod strata;

pub use datum::{CriticalPointLabel, MorseDatum, Point, Sheet, Space, Vertical};
pub use random::{random_generic_pair, random_matrix, random_spectrum, seeded_spectrum, RESAMPLING_BUDGET};
pub use spectrum::{canonical_representative, SymmetricSpectrum};
pub use strata::{LinearStratum, StratumKind, VerticalPart};
