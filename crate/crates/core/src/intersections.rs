//! Linear intersection engine: transversality, genericity of spectra,
//! zero-dimensional triple intersections of strata, and orientation signs
//! from the short-exact-sequence convention.
//!
//! All subspaces here are tangent spaces at one point, expressed in the
//! coordinates of a [`TangentFrame`]. Rank decisions use singular values
//! relative to the largest one.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::eigenflow::{LinearStratum, Point, Space, StratumKind, SymmetricSpectrum, VerticalPart};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{Real, Sign, Tolerances};

/// A subspace with an orientation: the order of `basis` times `sign`.
/// A zero-dimensional subspace is oriented by `sign` alone.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedSubspace<T> {
    pub ambient_dim: usize,
    pub basis: Vec<Vec<T>>,
    pub sign: Sign,
}

impl<T: Real> OrientedSubspace<T> {
    pub fn new(ambient_dim: usize, basis: Vec<Vec<T>>, tol: &Tolerances<T>) -> Result<Self> {
        if let Some(v) = basis.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in ambient dimension {ambient_dim}",
                v.len()
            )));
        }
        if linalg::rank(&Matrix::from_columns(ambient_dim, &basis), tol.rank) != basis.len() {
            return Err(Error::InvalidInput("basis vectors are linearly dependent".into()));
        }
        Ok(OrientedSubspace { ambient_dim, basis, sign: Sign::Plus })
    }

    /// An oriented point.
    pub fn point(ambient_dim: usize, sign: Sign) -> Self {
        OrientedSubspace { ambient_dim, basis: Vec::new(), sign }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient_dim - self.dim()
    }

    pub fn reversed(&self) -> Self {
        OrientedSubspace { sign: -self.sign, ..self.clone() }
    }

    /// Sign of the ordered basis `w` of this subspace relative to its orientation.
    pub fn same_orientation(&self, w: &[Vec<T>], tol: &Tolerances<T>) -> Result<Sign> {
        if w.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} vectors for a {}-dimensional subspace",
                w.len(),
                self.dim()
            )));
        }
        let gram = Matrix::from_fn(self.dim(), self.dim(), |i, j| linalg::dot(&self.basis[i], &w[j]));
        let scale: T = self
            .basis
            .iter()
            .chain(w)
            .map(|v| linalg::norm(v))
            .fold(T::one(), |acc, x| acc * x);
        let det = if self.dim() == 0 { T::one() } else { linalg::determinant(&gram) };
        if !(det.abs() > tol.rank * scale) {
            return Err(Error::DegenerateDeterminant);
        }
        Ok(self.sign * Sign::of(det))
    }
}

/// A subspace together with an ordered basis of a complement (its normal
/// directions); the orientation of `subspace` itself is not used.
#[derive(Clone, Debug, PartialEq)]
pub struct CoorientedStratum<T> {
    pub subspace: OrientedSubspace<T>,
    pub normal_basis: Vec<Vec<T>>,
}

impl<T: Real> CoorientedStratum<T> {
    pub fn new(subspace: OrientedSubspace<T>, normal_basis: Vec<Vec<T>>, tol: &Tolerances<T>) -> Result<Self> {
        let n = subspace.ambient_dim;
        if normal_basis.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch("normal vector length".into()));
        }
        let mut all = subspace.basis.clone();
        all.extend(normal_basis.iter().cloned());
        if all.len() != n || linalg::rank(&Matrix::from_columns(n, &all), tol.rank) != n {
            return Err(Error::InvalidInput("subspace and normals do not span the ambient space".into()));
        }
        Ok(CoorientedStratum { subspace, normal_basis })
    }

    pub fn codim(&self) -> usize {
        self.normal_basis.len()
    }
}

/// Orthonormal coordinates on `T_p M` for `M = S^n` or `S^n × R`.
#[derive(Clone, Debug)]
pub struct TangentFrame<T> {
    base_frame: Vec<Vec<T>>,
    base_dim: usize,
    vertical: bool,
}

impl<T: Real> TangentFrame<T> {
    pub fn at(p: &Point<T>, tol: &Tolerances<T>) -> Self {
        let base_dim = p.x.len();
        TangentFrame {
            base_frame: linalg::orthogonal_complement(base_dim, std::slice::from_ref(&p.x), None, tol.rank),
            base_dim,
            vertical: p.y.is_some(),
        }
    }

    pub fn dim(&self) -> usize {
        self.base_frame.len() + usize::from(self.vertical)
    }

    /// Coordinates of an ambient vector (base block, then vertical entry).
    pub fn express(&self, v: &[T]) -> Vec<T> {
        let mut out: Vec<T> = self.base_frame.iter().map(|f| linalg::dot(f, &v[..self.base_dim])).collect();
        if self.vertical {
            out.push(v.get(self.base_dim).copied().unwrap_or_else(T::zero));
        }
        out
    }

    pub fn express_all(&self, vs: &[Vec<T>]) -> Vec<Vec<T>> {
        vs.iter().map(|v| self.express(v)).collect()
    }

    pub fn express_point(&self, p: &Point<T>) -> Vec<T> {
        let mut v = p.x.clone();
        if let Some(y) = p.y {
            v.push(y);
        }
        self.express(&v)
    }
}

/// Every pair `span{p^A_k..p^A_{k+l}}`, `span{p^B_l..p^B_n}` meets in a line,
/// and that line has nonzero coefficients on `p^A_k`, `p^A_{k+l}` and `p^B_l`
/// (it avoids the smaller spans bounding the strata).
pub fn general_position_check<T: Real>(
    a: &SymmetricSpectrum<T>,
    b: &SymmetricSpectrum<T>,
    tol: &Tolerances<T>,
) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("spectra of size {} and {}", a.dim(), b.dim())));
    }
    let n = a.n();
    let (pa, pb) = (a.eigenvectors(), b.eigenvectors());
    for k in 0..=n {
        for l in 0..=(n - k) {
            let mut rows: Vec<Vec<T>> = Vec::new();
            rows.extend(pa.iter().enumerate().filter(|(i, _)| *i < k || *i > k + l).map(|(_, p)| p.clone()));
            rows.extend(pb[..l].iter().cloned());
            let line = if rows.is_empty() {
                return Ok(n == 0);
            } else {
                linalg::null_space(&Matrix::from_rows(&rows), tol.rank)
            };
            let [v] = line.as_slice() else { return Ok(false) };
            let leading = [linalg::dot(v, &pa[k]), linalg::dot(v, &pa[k + l]), linalg::dot(v, &pb[l])];
            if leading.iter().any(|c| c.abs() < tol.pos) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The diagonal map `T → ⊕ T/T_i` is onto.
pub fn mutual_transversality<T: Real>(subspaces: &[OrientedSubspace<T>], tol: &Tolerances<T>) -> bool {
    let Some(first) = subspaces.first() else { return true };
    let m = first.ambient_dim;
    if subspaces.iter().any(|s| s.ambient_dim != m) {
        return false;
    }
    let mut rows = Vec::new();
    for s in subspaces {
        rows.extend(linalg::orthogonal_complement(m, &s.basis, None, tol.rank));
    }
    if rows.is_empty() {
        return true;
    }
    if rows.len() > m {
        return false;
    }
    linalg::rank(&Matrix::from_rows(&rows), tol.rank) == rows.len()
}

/// One step of the convention: orient `X ∩ Y` from `0 → T(X∩Y) → TX → TX/TY → 0`.
pub fn intersect<T: Real>(
    x: &OrientedSubspace<T>,
    y: &CoorientedStratum<T>,
    tol: &Tolerances<T>,
) -> Result<OrientedSubspace<T>> {
    let m = x.ambient_dim;
    if y.subspace.ambient_dim != m {
        return Err(Error::DimensionMismatch("ambient dimensions differ".into()));
    }
    let (k, l) = (x.dim(), y.codim());
    if l == 0 {
        return Ok(x.clone());
    }
    if k < l {
        return Err(Error::Transversality(format!("dimension {k} cannot meet codimension {l} transversely")));
    }
    let mut cols = x.basis.clone();
    cols.extend(y.subspace.basis.iter().cloned());
    let stacked = Matrix::from_columns(m, &cols);
    let kernel = linalg::null_space(&stacked, tol.rank);
    if kernel.len() != k - l {
        return Err(Error::Transversality(format!(
            "tangent intersection has dimension {}, expected {}",
            kernel.len(),
            k - l
        )));
    }
    let common: Vec<Vec<T>> = kernel.iter().map(|c| linalg::combine(m, &c[..k], &x.basis)).collect();
    let mut lifts = Vec::with_capacity(l);
    for n in &y.normal_basis {
        let c = linalg::least_squares(&stacked, n, tol.rank);
        let residual = linalg::norm(&linalg::sub(&stacked.mul_vec(&c), n));
        if residual > tol.on.max(tol.rank) * T::one().max(linalg::norm(n)) {
            return Err(Error::Transversality("normal direction does not lift into X".into()));
        }
        lifts.push(linalg::combine(m, &c[..k], &x.basis));
    }
    let mut frame = common.clone();
    frame.extend(lifts);
    let s = x.same_orientation(&frame, tol)?;
    if common.is_empty() {
        return Ok(OrientedSubspace::point(m, s));
    }
    let mut basis = common;
    if s == Sign::Minus {
        basis[0] = linalg::scaled(&basis[0], -T::one());
    }
    Ok(OrientedSubspace { ambient_dim: m, basis, sign: Sign::Plus })
}

/// `((X ∩ Y_1) ∩ Y_2) ∩ ...`, oriented step by step.
pub fn intersect_all<T: Real>(
    x: &OrientedSubspace<T>,
    ys: &[CoorientedStratum<T>],
    tol: &Tolerances<T>,
) -> Result<OrientedSubspace<T>> {
    ys.iter().try_fold(x.clone(), |acc, y| intersect(&acc, y, tol))
}

/// Sign of the zero-dimensional intersection `X ∩ Y_1 ∩ ... ∩ Y_r`.
pub fn intersection_sign<T: Real>(
    x: &OrientedSubspace<T>,
    ys: &[CoorientedStratum<T>],
    tol: &Tolerances<T>,
) -> Result<Sign> {
    let result = intersect_all(x, ys, tol)?;
    if result.dim() != 0 {
        return Err(Error::ExpectedDimensionNonZero(result.dim() as i64));
    }
    Ok(result.sign)
}

/// Compares `X ∩ Y_1 ∩ Y_2` with `(−1)^{codim Y_1 · codim Y_2} X ∩ Y_2 ∩ Y_1`.
pub fn swap_rule_holds<T: Real>(
    x: &OrientedSubspace<T>,
    y1: &CoorientedStratum<T>,
    y2: &CoorientedStratum<T>,
    tol: &Tolerances<T>,
) -> Result<bool> {
    let forward = intersection_sign(x, &[y1.clone(), y2.clone()], tol)?;
    let swapped = intersection_sign(x, &[y2.clone(), y1.clone()], tol)?;
    Ok(forward == Sign::parity(y1.codim() * y2.codim()) * swapped)
}

fn gaussian_vectors<R: Rng>(count: usize, dim: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..dim).map(|_| StandardNormal.sample(rng)).collect()).collect()
}

/// Random mutually transverse `X`, `Y_1`, `Y_2` in `R^m` with
/// `dim X = codim Y_1 + codim Y_2`.
pub fn random_transverse_triple<R: Rng>(
    m: usize,
    rng: &mut R,
    tol: &Tolerances<f64>,
) -> Result<(OrientedSubspace<f64>, CoorientedStratum<f64>, CoorientedStratum<f64>)> {
    for _ in 0..crate::eigenflow::RESAMPLING_BUDGET {
        let c1 = rng.random_range(0..=m);
        let c2 = rng.random_range(0..=m - c1);
        let x = OrientedSubspace::new(m, gaussian_vectors(c1 + c2, m, rng), tol);
        let cooriented = |c: usize, rng: &mut R| {
            let sub = OrientedSubspace::new(m, gaussian_vectors(m - c, m, rng), tol)?;
            CoorientedStratum::new(sub, gaussian_vectors(c, m, rng), tol)
        };
        let (Ok(x), Ok(y1), Ok(y2)) = (x, cooriented(c1, rng), cooriented(c2, rng)) else { continue };
        if mutual_transversality(&[x.clone(), y1.subspace.clone(), y2.subspace.clone()], tol) {
            return Ok((x, y1, y2));
        }
    }
    Err(Error::ResamplingBudget(crate::eigenflow::RESAMPLING_BUDGET))
}

/// Orientation of `M / R` from `0 → TR → TM → TM/R → 0`, with `TR` oriented by
/// `flow_direction`.
pub fn quotient_orientation<T: Real>(
    m: &OrientedSubspace<T>,
    flow_direction: &[T],
    tol: &Tolerances<T>,
) -> Result<OrientedSubspace<T>> {
    let size = linalg::norm(flow_direction);
    if flow_direction.len() != m.ambient_dim || m.dim() == 0 || !(size > tol.rank) {
        return Err(Error::FlowDirection);
    }
    let frame = Matrix::from_columns(m.ambient_dim, &m.basis);
    let c = linalg::least_squares(&frame, flow_direction, tol.rank);
    let residual = linalg::norm(&linalg::sub(&frame.mul_vec(&c), flow_direction));
    if residual > tol.on.max(tol.rank) * T::one().max(size) {
        return Err(Error::FlowDirection);
    }
    let mut rest =
        linalg::orthogonal_complement(m.ambient_dim, &[flow_direction.to_vec()], Some(&m.basis), tol.rank);
    let mut ordered = vec![flow_direction.to_vec()];
    ordered.extend(rest.iter().cloned());
    let s = m.same_orientation(&ordered, tol)?;
    if rest.is_empty() {
        return Ok(OrientedSubspace::point(m.ambient_dim, s));
    }
    if s == Sign::Minus {
        rest[0] = linalg::scaled(&rest[0], -T::one());
    }
    Ok(OrientedSubspace { ambient_dim: m.ambient_dim, basis: rest, sign: Sign::Plus })
}

/// A point of a zero-dimensional intersection with its orientation sign
/// (always `Plus` on the projective space, where only parity is defined).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPoint<T> {
    pub point: Point<T>,
    pub sign: Sign,
}

/// Leading-coefficient condition with margin: `Some(true)` inside, `Some(false)`
/// outside, error when too close to call.
fn leading_condition<T: Real>(s: &LinearStratum<T>, x: &[T], tol: &Tolerances<T>) -> Result<bool> {
    let a = s.leading_coefficient(x);
    let signed = match s.leading {
        Some((_, sign)) => sign.as_real::<T>() * a,
        None => a.abs(),
    };
    if signed >= tol.pos {
        Ok(true)
    } else if signed <= -tol.pos {
        Ok(false)
    } else {
        Err(Error::Transversality(format!(
            "leading coefficient {} of a {} stratum of {} is within the margin",
            a,
            match s.kind {
                StratumKind::Stable => "stable",
                StratumKind::Unstable => "unstable",
            },
            s.label
        )))
    }
}

/// Oriented points of `u ∩ s1 ∩ s2` for an unstable stratum `u` and stable
/// strata `s1`, `s2` of total expected dimension zero.
pub fn triple_intersection<T: Real>(
    u: &LinearStratum<T>,
    s1: &LinearStratum<T>,
    s2: &LinearStratum<T>,
    tol: &Tolerances<T>,
) -> Result<Vec<IntersectionPoint<T>>> {
    if u.kind != StratumKind::Unstable || s1.kind != StratumKind::Stable || s2.kind != StratumKind::Stable {
        return Err(Error::InvalidInput("expected (unstable, stable, stable) strata".into()));
    }
    let strata = [u, s1, s2];
    for s in &strata[1..] {
        if s.space != u.space || s.base_dim() != u.base_dim() || s.has_vertical() != u.has_vertical() {
            return Err(Error::MismatchedNeighborhoods(format!("{} and {}", u.label, s.label)));
        }
    }
    let m = (u.base_dim() - 1 + usize::from(u.has_vertical())) as i64;
    let expected = strata.iter().map(|s| s.dim() as i64).sum::<i64>() - 2 * m;
    if expected != 0 {
        return Err(Error::ExpectedDimensionNonZero(expected));
    }

    let centers: Vec<T> = strata
        .iter()
        .filter_map(|s| match s.vertical {
            VerticalPart::PointAt(c) => Some(c),
            _ => None,
        })
        .collect();
    if centers.len() >= 2 {
        if centers.iter().any(|&c| (c - centers[0]).abs() > tol.on) {
            return Ok(Vec::new());
        }
        return Err(Error::Transversality("vertical slices coincide".into()));
    }
    let height = centers.first().copied();

    let n1 = u.base_dim();
    let mut rows: Vec<Vec<T>> = Vec::new();
    for s in &strata {
        rows.extend(s.complement().cloned());
    }
    let kernel = if rows.is_empty() {
        (0..n1).map(|i| linalg::unit_vector(n1, i)).collect()
    } else {
        linalg::null_space(&Matrix::from_rows(&rows), tol.rank)
    };
    let expected_cone = usize::from(height.is_some() || !u.has_vertical());
    if kernel.len() != expected_cone {
        if kernel.len() > expected_cone {
            return Err(Error::Transversality(format!(
                "eigen-spans meet in dimension {}, expected {expected_cone}",
                kernel.len()
            )));
        }
        return Ok(Vec::new());
    }
    if kernel.is_empty() {
        return Ok(Vec::new());
    }
    let v = linalg::normalized(&kernel[0]).ok_or(Error::DegenerateDeterminant)?;
    let candidates = match u.space {
        Space::Sphere => vec![v.clone(), linalg::scaled(&v, -T::one())],
        Space::Projective => vec![crate::eigenflow::canonical_representative(&v, tol.on)],
    };

    let mut out = Vec::new();
    for x in candidates {
        let mut inside = true;
        for s in &strata {
            inside &= leading_condition(s, &x, tol)?;
        }
        if !inside {
            continue;
        }
        let point = Point { x, y: height.or(if u.has_vertical() { Some(T::zero()) } else { None }) };
        let frame = TangentFrame::at(&point, tol);
        let tangents: Vec<OrientedSubspace<T>> = strata
            .iter()
            .map(|s| OrientedSubspace::new(frame.dim(), frame.express_all(&s.tangent_vectors(&point, tol)), tol))
            .collect::<Result<_>>()?;
        if !mutual_transversality(&tangents, tol) {
            return Err(Error::Transversality("strata are not mutually transverse at the intersection".into()));
        }
        let sign = match u.space {
            Space::Projective => Sign::Plus,
            Space::Sphere => {
                let x_or = u.oriented_tangent(&point, &frame, tol)?;
                let ys = [s1.coorientation(&point, &frame, tol)?, s2.coorientation(&point, &frame, tol)?];
                intersection_sign(&x_or, &ys, tol)?
            }
        };
        out.push(IntersectionPoint { point, sign });
    }
    Ok(out)
}
