//! Graded cochain complexes with labeled generators.
//!
//! A complex stores, per degree, an ordered list of generators and the
//! codifferential `d_k : C^k -> C^{k+1}` as a [`RingMatrix`] with
//! `rows = |C^{k+1}|` and `cols = |C^k|`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficients::{self, IntMatrix, RingMatrix, RingTag};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorLabel {
    pub name: String,
    pub degree: usize,
}

impl GeneratorLabel {
    pub fn new(name: impl Into<String>, degree: usize) -> Self {
        GeneratorLabel { name: name.into(), degree }
    }
}

/// Element of `C^degree`, coefficients indexed like the generators of that degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cochain {
    pub degree: usize,
    pub coefficients: Vec<BigInt>,
}

impl Cochain {
    pub fn zero(degree: usize, len: usize) -> Self {
        Cochain { degree, coefficients: vec![BigInt::zero(); len] }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `self + scale * other`, reduced in `ring`.
    pub fn add_scaled(&self, other: &Cochain, scale: &BigInt, ring: RingTag) -> Cochain {
        assert_eq!(self.degree, other.degree, "degree mismatch in cochain sum");
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| ring.reduce(a + scale * b))
            .collect();
        Cochain { degree: self.degree, coefficients }
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coefficients.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }
}

/// Outcome of [`GradedComplex::validate_differential`].
#[derive(Clone, Debug, PartialEq)]
pub enum Validation {
    Ok,
    Violation { degree: usize, composite: RingMatrix },
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        matches!(self, Validation::Ok)
    }
}

/// Cohomology of one degree: rank over Z/2, or free rank plus torsion over Z.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCohomology {
    pub degree: usize,
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedComplex {
    ring: RingTag,
    generators: Vec<Vec<GeneratorLabel>>,
    differentials: Vec<RingMatrix>,
}

impl GradedComplex {
    /// `differentials[k]` maps degree `k` to degree `k + 1`; the list may be
    /// shorter than the number of degrees, missing maps are zero.
    pub fn new(
        ring: RingTag,
        generators: Vec<Vec<GeneratorLabel>>,
        differentials: Vec<RingMatrix>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for (k, gens) in generators.iter().enumerate() {
            for g in gens {
                if g.degree != k {
                    return Err(Error::ShapeMismatch(format!(
                        "generator {} has degree {} but is listed in degree {k}",
                        g.name, g.degree
                    )));
                }
                if !seen.insert((g.name.clone(), g.degree)) {
                    return Err(Error::ShapeMismatch(format!("duplicate generator {}", g.name)));
                }
            }
        }
        let mut complex = GradedComplex { ring, generators, differentials: Vec::new() };
        let top = complex.generators.len();
        if differentials.len() > top {
            return Err(Error::ShapeMismatch(format!(
                "{} differentials for {top} degrees",
                differentials.len()
            )));
        }
        for (k, d) in differentials.iter().enumerate() {
            if d.ring() != ring {
                return Err(Error::RingMismatch);
            }
            let (rows, cols) = (complex.count(k + 1), complex.count(k));
            if d.rows() != rows || d.cols() != cols {
                return Err(Error::ShapeMismatch(format!(
                    "d_{k} is {}x{}, expected {rows}x{cols}",
                    d.rows(),
                    d.cols()
                )));
            }
        }
        complex.differentials = differentials;
        while complex.differentials.len() < top {
            let k = complex.differentials.len();
            complex.differentials.push(RingMatrix::zeros(ring, complex.count(k + 1), complex.count(k)));
        }
        Ok(complex)
    }

    pub fn empty(ring: RingTag) -> Self {
        GradedComplex { ring, generators: Vec::new(), differentials: Vec::new() }
    }

    pub fn ring(&self) -> RingTag {
        self.ring
    }

    /// Number of degrees `0..=top` that are stored.
    pub fn num_degrees(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self, degree: usize) -> &[GeneratorLabel] {
        self.generators.get(degree).map_or(&[], Vec::as_slice)
    }

    pub fn all_generators(&self) -> impl Iterator<Item = &GeneratorLabel> {
        self.generators.iter().flatten()
    }

    pub fn count(&self, degree: usize) -> usize {
        self.generators(degree).len()
    }

    pub fn total_count(&self) -> usize {
        self.generators.iter().map(Vec::len).sum()
    }

    /// `d_k`; zero outside the stored range.
    pub fn differential(&self, degree: usize) -> RingMatrix {
        self.differentials
            .get(degree)
            .cloned()
            .unwrap_or_else(|| RingMatrix::zeros(self.ring, self.count(degree + 1), self.count(degree)))
    }

    pub fn index_of(&self, name: &str) -> Option<(usize, usize)> {
        self.generators
            .iter()
            .enumerate()
            .find_map(|(k, gens)| gens.iter().position(|g| g.name == name).map(|i| (k, i)))
    }

    pub fn zero_cochain(&self, degree: usize) -> Cochain {
        Cochain::zero(degree, self.count(degree))
    }

    /// The dual generator `η^x` of the named critical point.
    pub fn dual_generator(&self, name: &str) -> Option<Cochain> {
        let (k, i) = self.index_of(name)?;
        let mut c = self.zero_cochain(k);
        c.coefficients[i] = BigInt::one();
        Some(c)
    }

    /// `d(x)`, a cochain of degree `x.degree + 1`.
    pub fn apply(&self, x: &Cochain) -> Result<Cochain> {
        self.check_cochain(x)?;
        let coefficients = self
            .differential(x.degree)
            .mul_vec(&x.coefficients)?
            .into_iter()
            .map(|c| self.ring.reduce(c))
            .collect();
        Ok(Cochain { degree: x.degree + 1, coefficients })
    }

    fn check_cochain(&self, x: &Cochain) -> Result<()> {
        if x.coefficients.len() != self.count(x.degree) {
            return Err(Error::ShapeMismatch(format!(
                "cochain of length {} in degree {} with {} generators",
                x.coefficients.len(),
                x.degree,
                self.count(x.degree)
            )));
        }
        Ok(())
    }

    /// Checks `d_{k+1} d_k = 0` in every degree.
    pub fn validate_differential(&self) -> Result<Validation> {
        for k in 0..self.num_degrees() {
            let d = &self.differentials[k];
            if d.rows() != self.count(k + 1) || d.cols() != self.count(k) {
                return Err(Error::ShapeMismatch(format!("d_{k} has the wrong shape")));
            }
        }
        for k in 0..self.num_degrees().saturating_sub(1) {
            let composite = self.differential(k + 1).mul(&self.differential(k))?;
            if !composite.is_zero() {
                return Ok(Validation::Violation { degree: k, composite });
            }
        }
        Ok(Validation::Ok)
    }

    fn ensure_valid(&self) -> Result<()> {
        match self.validate_differential()? {
            Validation::Ok => Ok(()),
            Validation::Violation { degree, .. } => Err(Error::InvalidDifferential { degree }),
        }
    }

    /// `ker d_k / im d_{k-1}` in every stored degree.
    pub fn cohomology(&self) -> Result<Vec<DegreeCohomology>> {
        self.ensure_valid()?;
        (0..self.num_degrees()).map(|k| self.cohomology_in(k)).collect()
    }

    fn cohomology_in(&self, k: usize) -> Result<DegreeCohomology> {
        let dim = self.count(k);
        let out_rank = self.differential(k).rank();
        let kernel = dim - out_rank;
        if k == 0 {
            return Ok(DegreeCohomology { degree: k, rank: kernel, torsion: Vec::new() });
        }
        let incoming = self.differential(k - 1);
        match &incoming {
            RingMatrix::Z2(m) => {
                Ok(DegreeCohomology { degree: k, rank: kernel - m.rank(), torsion: Vec::new() })
            }
            RingMatrix::Z(m) => {
                let snf = coefficients::smith_normal_form_generic(m);
                let torsion = snf.invariant_factors().into_iter().filter(|f| !f.is_one()).collect();
                Ok(DegreeCohomology { degree: k, rank: kernel - snf.rank, torsion })
            }
        }
    }

    /// Ranks only (Z/2 rank or free rank over Z), one per degree.
    pub fn betti(&self) -> Result<Vec<usize>> {
        Ok(self.cohomology()?.into_iter().map(|h| h.rank).collect())
    }

    /// Returns a witness `w` with `d w = x` when `x` is a coboundary.
    pub fn is_coboundary(&self, x: &Cochain) -> Result<Option<Cochain>> {
        self.check_cochain(x)?;
        if !self.apply(x)?.is_zero() {
            return Err(Error::NotACocycle { degree: x.degree });
        }
        if x.degree == 0 {
            // degree 0 has no incoming map; only the zero cochain bounds
            return Ok(x.is_zero().then(|| Cochain::zero(0, 0)));
        }
        let incoming = self.differential(x.degree - 1);
        Ok(incoming
            .solve_in_column_space(&x.coefficients)?
            .map(|coefficients| Cochain { degree: x.degree - 1, coefficients }))
    }

    /// True when `a - b` is a coboundary (both must be cocycles of one degree).
    pub fn same_class(&self, a: &Cochain, b: &Cochain) -> Result<bool> {
        let diff = a.add_scaled(b, &-BigInt::one(), self.ring);
        Ok(self.is_coboundary(&diff)?.is_some())
    }

    /// Cocycle representatives whose classes generate `H^degree`: a basis
    /// over Z/2; over Z the free generators first, then one generator per
    /// nontrivial torsion factor.
    pub fn cohomology_basis(&self, degree: usize) -> Result<Vec<Cochain>> {
        if degree >= self.num_degrees() {
            if self.num_degrees() == 0 {
                return Ok(Vec::new());
            }
            return Err(Error::InvalidDegree(degree));
        }
        self.ensure_valid()?;
        let dim = self.count(degree);
        let kernel = self.differential(degree).kernel_basis();
        let incoming = (degree > 0).then(|| self.differential(degree - 1));
        match self.ring {
            RingTag::Z2 => {
                let mut spanning: Vec<Vec<BigInt>> = match &incoming {
                    Some(d) => (0..d.cols()).map(|j| (0..d.rows()).map(|i| d.get(i, j)).collect()).collect(),
                    None => Vec::new(),
                };
                let mut rank = column_rank(RingTag::Z2, dim, &spanning);
                let mut out = Vec::new();
                for v in kernel {
                    spanning.push(v.clone());
                    let r = column_rank(RingTag::Z2, dim, &spanning);
                    if r > rank {
                        rank = r;
                        out.push(Cochain { degree, coefficients: v });
                    } else {
                        spanning.pop();
                    }
                }
                Ok(out)
            }
            RingTag::Z => {
                if kernel.is_empty() {
                    return Ok(Vec::new());
                }
                let m = kernel.len();
                let k_mat = IntMatrix::from_fn(dim, m, |i, j| kernel[j][i].clone());
                let k_snf = coefficients::smith_normal_form_generic(&k_mat);
                // coordinates of the incoming image in the kernel lattice
                let cols: Vec<Vec<BigInt>> = match &incoming {
                    Some(d) => (0..d.cols())
                        .map(|j| {
                            let col: Vec<BigInt> = (0..d.rows()).map(|i| d.get(i, j)).collect();
                            k_snf.solve(&col).ok_or_else(|| {
                                Error::InvalidDifferential { degree: degree - 1 }
                            })
                        })
                        .collect::<Result<_>>()?,
                    None => Vec::new(),
                };
                let a = IntMatrix::from_fn(m, cols.len(), |i, j| cols[j][i].clone());
                let a_snf = coefficients::smith_normal_form_generic(&a);
                let gens = k_mat.mul(&a_snf.u_inv);
                let column = |j: usize| Cochain {
                    degree,
                    coefficients: (0..dim).map(|i| gens[(i, j)].clone()).collect(),
                };
                let mut out: Vec<Cochain> = (a_snf.rank..m).map(column).collect();
                for i in 0..a_snf.rank {
                    if !a_snf.d[(i, i)].abs().is_one() {
                        out.push(column(i));
                    }
                }
                Ok(out)
            }
        }
    }

    /// The same complex with generators of each degree reordered by
    /// `perms[k]` (new position `i` holds old generator `perms[k][i]`).
    pub fn permuted(&self, perms: &[Vec<usize>]) -> Result<Self> {
        if perms.len() != self.num_degrees() {
            return Err(Error::ShapeMismatch("one permutation per degree required".into()));
        }
        let generators = self
            .generators
            .iter()
            .zip(perms)
            .map(|(gens, p)| p.iter().map(|&i| gens[i].clone()).collect())
            .collect();
        let differentials = (0..self.num_degrees())
            .map(|k| {
                let d = self.differential(k);
                let rows_p = perms.get(k + 1).cloned().unwrap_or_default();
                let mut out = RingMatrix::zeros(self.ring, d.rows(), d.cols());
                for (ni, &oi) in rows_p.iter().enumerate() {
                    for (nj, &oj) in perms[k].iter().enumerate() {
                        out.set(ni, nj, d.get(oi, oj));
                    }
                }
                out
            })
            .collect();
        GradedComplex::new(self.ring, generators, differentials)
    }

    /// Alternating sum of generator counts.
    pub fn euler_characteristic(&self) -> i64 {
        self.generators
            .iter()
            .enumerate()
            .map(|(k, g)| if k % 2 == 0 { g.len() as i64 } else { -(g.len() as i64) })
            .sum()
    }
}

fn column_rank(ring: RingTag, dim: usize, columns: &[Vec<BigInt>]) -> usize {
    let mut m = RingMatrix::zeros(ring, dim, columns.len());
    for (j, c) in columns.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            m.set(i, j, x.clone());
        }
    }
    m.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens(prefix: &str, degree: usize, n: usize) -> Vec<GeneratorLabel> {
        (0..n).map(|i| GeneratorLabel::new(format!("{prefix}{degree}_{i}"), degree)).collect()
    }

    #[test]
    fn zero_differentials_are_valid() {
        let c = GradedComplex::new(RingTag::Z2, vec![gens("g", 0, 2), gens("g", 1, 1)], vec![]).unwrap();
        assert!(c.validate_differential().unwrap().is_ok());
        assert_eq!(c.betti().unwrap(), vec![2, 1]);
    }

    #[test]
    fn identity_composite_is_a_violation() {
        let id = RingMatrix::identity(RingTag::Z2, 1);
        let c = GradedComplex::new(
            RingTag::Z2,
            vec![gens("g", 0, 1), gens("g", 1, 1), gens("g", 2, 1)],
            vec![id.clone(), id],
        )
        .unwrap();
        match c.validate_differential().unwrap() {
            Validation::Violation { degree, composite } => {
                assert_eq!(degree, 0);
                assert!(!composite.is_zero());
            }
            Validation::Ok => panic!("expected violation"),
        }
        assert!(c.cohomology().is_err());
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let bad = RingMatrix::zeros(RingTag::Z2, 2, 2);
        assert!(GradedComplex::new(RingTag::Z2, vec![gens("g", 0, 1), gens("g", 1, 1)], vec![bad]).is_err());
    }

    #[test]
    fn empty_complex() {
        let c = GradedComplex::empty(RingTag::Z2);
        assert!(c.cohomology().unwrap().is_empty());
        assert!(c.cohomology_basis(0).unwrap().is_empty());
    }

    #[test]
    fn torsion_over_z() {
        // 0 -> Z --2--> Z -> 0 has H^1 = Z/2
        let d = RingMatrix::from_i64_rows(RingTag::Z, &[vec![2]]);
        let c = GradedComplex::new(RingTag::Z, vec![gens("g", 0, 1), gens("g", 1, 1)], vec![d]).unwrap();
        let h = c.cohomology().unwrap();
        assert_eq!(h[0].rank, 0);
        assert_eq!(h[1].rank, 0);
        assert_eq!(h[1].torsion, vec![BigInt::from(2)]);
        let basis = c.cohomology_basis(1).unwrap();
        assert_eq!(basis.len(), 1);
        assert!(c.is_coboundary(&basis[0]).unwrap().is_none());
    }

    #[test]
    fn non_cocycle_is_an_error() {
        let d = RingMatrix::from_i64_rows(RingTag::Z2, &[vec![1]]);
        let c = GradedComplex::new(RingTag::Z2, vec![gens("g", 0, 1), gens("g", 1, 1)], vec![d]).unwrap();
        let x = c.dual_generator("g0_0").unwrap();
        assert_eq!(c.is_coboundary(&x), Err(Error::NotACocycle { degree: 0 }));
    }

    #[test]
    fn zero_cochain_bounds() {
        let d = RingMatrix::from_i64_rows(RingTag::Z2, &[vec![1]]);
        let c = GradedComplex::new(RingTag::Z2, vec![gens("g", 0, 1), gens("g", 1, 1)], vec![d]).unwrap();
        let w = c.is_coboundary(&c.zero_cochain(1)).unwrap().unwrap();
        assert!(w.is_zero());
        assert!(c.is_coboundary(&c.zero_cochain(0)).unwrap().is_some());
    }
}
