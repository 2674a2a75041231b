//! Exact linear algebra over the coefficient rings Z/2 and Z.
//!
//! Ring elements cross module boundaries as [`BigInt`]; over Z/2 they are
//! always reduced to `0` or `1`. Internally Z/2 matrices are bit-packed and
//! Z matrices use arbitrary precision.

pub mod gf2;
pub mod integer;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use gf2::Gf2Matrix;
pub use integer::{smith_normal_form as smith_normal_form_generic, Int, IntMatrix, SmithForm};

use crate::error::{Error, Result};

/// Coefficient ring of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingTag {
    Z2,
    Z,
}

impl RingTag {
    /// Canonical representative of `x` in this ring.
    pub fn reduce(self, x: BigInt) -> BigInt {
        match self {
            RingTag::Z2 => x.mod_floor(&BigInt::from(2)),
            RingTag::Z => x,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RingTag::Z2 => "z2",
            RingTag::Z => "z",
        }
    }
}

impl std::fmt::Display for RingTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RingTag::Z2 => "Z/2",
            RingTag::Z => "Z",
        })
    }
}

impl std::str::FromStr for RingTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z2" | "z/2" => Ok(RingTag::Z2),
            "z" => Ok(RingTag::Z),
            other => Err(Error::InvalidInput(format!("unknown ring `{other}`"))),
        }
    }
}

/// Matrix over one of the coefficient rings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingMatrix {
    Z2(Gf2Matrix),
    Z(IntMatrix<BigInt>),
}

fn bit(x: &BigInt) -> bool {
    x.is_odd()
}

impl RingMatrix {
    pub fn zeros(ring: RingTag, rows: usize, cols: usize) -> Self {
        match ring {
            RingTag::Z2 => RingMatrix::Z2(Gf2Matrix::zeros(rows, cols)),
            RingTag::Z => RingMatrix::Z(IntMatrix::zeros(rows, cols)),
        }
    }

    pub fn identity(ring: RingTag, n: usize) -> Self {
        match ring {
            RingTag::Z2 => RingMatrix::Z2(Gf2Matrix::identity(n)),
            RingTag::Z => RingMatrix::Z(IntMatrix::identity(n)),
        }
    }

    /// Build from row-major integer entries; over Z/2 entries are reduced.
    pub fn from_i64_rows(ring: RingTag, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(ring, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(x));
            }
        }
        m
    }

    pub fn ring(&self) -> RingTag {
        match self {
            RingMatrix::Z2(_) => RingTag::Z2,
            RingMatrix::Z(_) => RingTag::Z,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            RingMatrix::Z2(m) => m.rows(),
            RingMatrix::Z(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            RingMatrix::Z2(m) => m.cols(),
            RingMatrix::Z(m) => m.cols(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        match self {
            RingMatrix::Z2(m) => BigInt::from(u8::from(m.get(i, j))),
            RingMatrix::Z(m) => m[(i, j)].clone(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        match self {
            RingMatrix::Z2(m) => m.set(i, j, bit(&value)),
            RingMatrix::Z(m) => m[(i, j)] = value,
        }
    }

    /// Row-major entries as ring elements.
    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows()).map(|i| (0..self.cols()).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RingMatrix::Z2(m) => m.is_zero(),
            RingMatrix::Z(m) => m.is_zero(),
        }
    }

    pub fn mul(&self, other: &RingMatrix) -> Result<RingMatrix> {
        if self.cols() != other.rows() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        match (self, other) {
            (RingMatrix::Z2(a), RingMatrix::Z2(b)) => Ok(RingMatrix::Z2(a.mul(b))),
            (RingMatrix::Z(a), RingMatrix::Z(b)) => Ok(RingMatrix::Z(a.mul(b))),
            _ => Err(Error::RingMismatch),
        }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if self.cols() != v.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix applied to vector of length {}",
                self.rows(),
                self.cols(),
                v.len()
            )));
        }
        Ok(match self {
            RingMatrix::Z2(m) => {
                let bits: Vec<bool> = v.iter().map(bit).collect();
                m.mul_vec(&bits).into_iter().map(|b| BigInt::from(u8::from(b))).collect()
            }
            RingMatrix::Z(m) => m.mul_vec(v),
        })
    }

    /// Rank over Z/2, or the free (rational) rank over Z.
    pub fn rank(&self) -> usize {
        match self {
            RingMatrix::Z2(m) => m.rank(),
            RingMatrix::Z(m) => integer::smith_normal_form(m).rank,
        }
    }

    /// Basis of the right kernel (a lattice basis over Z).
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        match self {
            RingMatrix::Z2(m) => m
                .kernel_basis()
                .into_iter()
                .map(|v| v.into_iter().map(|b| BigInt::from(u8::from(b))).collect())
                .collect(),
            RingMatrix::Z(m) => integer::smith_normal_form(m).kernel_basis(),
        }
    }

    /// Some `x` with `self · x = b` over the ring, if one exists.
    pub fn solve_in_column_space(&self, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        if b.len() != self.rows() {
            return Err(Error::ShapeMismatch(format!(
                "right-hand side of length {} for {} rows",
                b.len(),
                self.rows()
            )));
        }
        match self {
            RingMatrix::Z2(m) => {
                if b.iter().any(|x| !(x.is_zero() || x.is_one())) {
                    return Err(Error::RingMismatch);
                }
                let bits: Vec<bool> = b.iter().map(bit).collect();
                Ok(m.solve(&bits).map(|x| x.into_iter().map(|b| BigInt::from(u8::from(b))).collect()))
            }
            RingMatrix::Z(m) => Ok(integer::smith_normal_form(m).solve(b)),
        }
    }
}

/// Smith normal form of a matrix over Z.
pub fn smith_normal_form(a: &RingMatrix) -> Result<SmithForm<BigInt>> {
    match a {
        RingMatrix::Z(m) => Ok(integer::smith_normal_form(m)),
        RingMatrix::Z2(_) => Err(Error::RingMismatch),
    }
}
