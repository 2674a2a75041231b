use serde::{Deserialize, Serialize};

use super::datum::{CriticalPointLabel, MorseDatum, Point, Sheet, Space};
use crate::coefficients::RingTag;
use crate::error::{Error, Result};
use crate::intersections::{CoorientedStratum, OrientedSubspace, TangentFrame};
use crate::linalg::{self, Matrix};
use crate::scalar::{Real, Sign, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StratumKind {
    Stable,
    Unstable,
}

/// Vertical slice of a stratum in `base × [-1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerticalPart<T> {
    FullLine,
    PointAt(T),
    None,
}

/// A local (un)stable manifold: the unit vectors of an eigen-span, cut by a
/// sign (sphere) or nonvanishing (projective) condition on the leading
/// coefficient, times a vertical slice.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearStratum<T> {
    pub label: String,
    pub space: Space,
    pub kind: StratumKind,
    /// Inclusive eigen-index range of the span.
    pub range: (usize, usize),
    /// Required sign of the leading coefficient; `None` on the projective space.
    pub leading: Option<(usize, Sign)>,
    pub vertical: VerticalPart<T>,
    eigenvectors: Vec<Vec<T>>,
}

impl<T: Real> MorseDatum<T> {
    pub fn unstable_stratum(&self, cp: &CriticalPointLabel) -> Result<LinearStratum<T>> {
        self.stratum(cp, StratumKind::Unstable)
    }

    pub fn stable_stratum(&self, cp: &CriticalPointLabel) -> Result<LinearStratum<T>> {
        self.stratum(cp, StratumKind::Stable)
    }

    fn stratum(&self, cp: &CriticalPointLabel, kind: StratumKind) -> Result<LinearStratum<T>> {
        self.check_owns(cp)?;
        let k = cp.eigen_index;
        let range = match kind {
            StratumKind::Unstable => (0, k),
            StratumKind::Stable => (k, self.n()),
        };
        let leading = (cp.sheet != Sheet::Class).then(|| (k, cp.sheet.sign()));
        let vertical = match (self.vertical, kind) {
            (None, _) => VerticalPart::None,
            (Some(v), StratumKind::Unstable) if v.sign == Sign::Minus => VerticalPart::FullLine,
            (Some(v), StratumKind::Stable) if v.sign == Sign::Plus => VerticalPart::FullLine,
            (Some(v), _) => VerticalPart::PointAt(v.center),
        };
        Ok(LinearStratum {
            label: self.label.clone(),
            space: self.space,
            kind,
            range,
            leading,
            vertical,
            eigenvectors: self.spectrum.eigenvectors().to_vec(),
        })
    }
}

impl<T: Real> LinearStratum<T> {
    /// Ambient dimension `n + 1` of the base.
    pub fn base_dim(&self) -> usize {
        self.eigenvectors.len()
    }

    pub fn has_vertical(&self) -> bool {
        self.vertical != VerticalPart::None
    }

    /// The eigen-index of the critical point the stratum belongs to.
    pub fn critical_index(&self) -> usize {
        match self.kind {
            StratumKind::Unstable => self.range.1,
            StratumKind::Stable => self.range.0,
        }
    }

    pub fn span(&self) -> &[Vec<T>] {
        &self.eigenvectors[self.range.0..=self.range.1]
    }

    /// Eigenvectors orthogonal to the span.
    pub fn complement(&self) -> impl Iterator<Item = &Vec<T>> {
        self.eigenvectors
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i < self.range.0 || *i > self.range.1)
            .map(|(_, p)| p)
    }

    pub fn eigenvector(&self, i: usize) -> &[T] {
        &self.eigenvectors[i]
    }

    /// Manifold dimension, vertical line included.
    pub fn dim(&self) -> usize {
        self.range.1 - self.range.0 + usize::from(self.vertical == VerticalPart::FullLine)
    }

    pub fn manifold_codim(&self) -> usize {
        self.base_dim() - 1 + usize::from(self.has_vertical()) - self.dim()
    }

    /// Leading eigen-coefficient of a base point.
    pub fn leading_coefficient(&self, x: &[T]) -> T {
        linalg::dot(x, &self.eigenvectors[self.critical_index()])
    }

    /// Membership test within `tol.on`, strict leading condition with margin `tol.pos`.
    pub fn contains(&self, p: &Point<T>, tol: &Tolerances<T>) -> bool {
        if p.x.len() != self.base_dim() || p.y.is_some() != self.has_vertical() {
            return false;
        }
        if self.complement().any(|q| linalg::dot(q, &p.x).abs() > tol.on) {
            return false;
        }
        let lead = self.leading_coefficient(&p.x);
        let lead_ok = match self.leading {
            Some((_, s)) => s.as_real::<T>() * lead > tol.pos,
            None => lead.abs() > tol.pos,
        };
        let vertical_ok = match (self.vertical, p.y) {
            (VerticalPart::PointAt(c), Some(y)) => (y - c).abs() <= tol.on,
            (VerticalPart::FullLine, Some(y)) => y.abs() < T::one(),
            (VerticalPart::None, None) => true,
            _ => false,
        };
        lead_ok && vertical_ok
    }

    fn embed(&self, v: &[T]) -> Vec<T> {
        let mut out = v.to_vec();
        if self.has_vertical() {
            out.push(T::zero());
        }
        out
    }

    fn vertical_unit(&self) -> Vec<T> {
        let mut e = vec![T::zero(); self.base_dim()];
        e.push(T::one());
        e
    }

    /// Orthonormal basis of the tangent space at `p`, ambient layout.
    pub fn tangent_vectors(&self, p: &Point<T>, tol: &Tolerances<T>) -> Vec<Vec<T>> {
        let mut t: Vec<Vec<T>> =
            linalg::orthogonal_complement(self.base_dim(), std::slice::from_ref(&p.x), Some(self.span()), tol.rank)
                .iter()
                .map(|v| self.embed(v))
                .collect();
        if self.vertical == VerticalPart::FullLine {
            t.push(self.vertical_unit());
        }
        t
    }

    fn require_sphere(&self, what: &str) -> Result<Sign> {
        match (self.space, self.leading) {
            (Space::Sphere, Some((_, s))) => Ok(s),
            _ => Err(Error::UnsupportedRing(RingTag::Z, format!("{what} on the projective space"))),
        }
    }

    /// Orientation of an unstable stratum at `p`, expressed in `frame`.
    ///
    /// The span is oriented by `(s p_k, p_0, ..., p_{k-1})`; the tangent basis
    /// `t` at `p` is positive when `(p, t)` is, and a vertical line comes last.
    pub fn oriented_tangent(&self, p: &Point<T>, frame: &TangentFrame<T>, tol: &Tolerances<T>) -> Result<OrientedSubspace<T>> {
        if self.kind != StratumKind::Unstable {
            return Err(Error::InvalidInput("orientations are attached to unstable strata".into()));
        }
        let s = self.require_sphere("orientation")?;
        let k = self.range.1;
        let mut omega = vec![linalg::scaled(&self.eigenvectors[k], s.as_real())];
        omega.extend(self.eigenvectors[..k].iter().cloned());
        let mut base =
            linalg::orthogonal_complement(self.base_dim(), std::slice::from_ref(&p.x), Some(self.span()), tol.rank);
        let mut candidate = vec![p.x.clone()];
        candidate.extend(base.iter().cloned());
        let gram = Matrix::from_fn(omega.len(), candidate.len(), |i, j| linalg::dot(&omega[i], &candidate[j]));
        if gram.rows() != gram.cols() {
            return Err(Error::Transversality("point is not on the unstable stratum".into()));
        }
        let det = linalg::determinant(&gram);
        if det.abs() <= tol.rank {
            return Err(Error::DegenerateDeterminant);
        }
        if det < T::zero() {
            match base.first_mut() {
                Some(v) => *v = linalg::scaled(v, -T::one()),
                None => return Err(Error::Transversality("point is on the wrong sheet".into())),
            }
        }
        let mut tangent: Vec<Vec<T>> = base.iter().map(|v| self.embed(v)).collect();
        if self.vertical == VerticalPart::FullLine {
            tangent.push(self.vertical_unit());
        }
        OrientedSubspace::new(frame.dim(), frame.express_all(&tangent), tol)
    }

    /// Coorientation of a stable stratum at `p`: normals `(p_0, ..., p_{k-1})`,
    /// then the vertical direction when the slice is a point.
    pub fn coorientation(&self, p: &Point<T>, frame: &TangentFrame<T>, tol: &Tolerances<T>) -> Result<CoorientedStratum<T>> {
        if self.kind != StratumKind::Stable {
            return Err(Error::InvalidInput("coorientations are attached to stable strata".into()));
        }
        self.require_sphere("coorientation")?;
        let mut normals: Vec<Vec<T>> = self.eigenvectors[..self.range.0].iter().map(|v| self.embed(v)).collect();
        if matches!(self.vertical, VerticalPart::PointAt(_)) {
            normals.push(self.vertical_unit());
        }
        let tangent = self.tangent_vectors(p, tol);
        CoorientedStratum::new(
            OrientedSubspace::new(frame.dim(), frame.express_all(&tangent), tol)?,
            frame.express_all(&normals),
            tol,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenflow::{SymmetricSpectrum, Vertical};

    fn tol() -> Tolerances<f64> {
        Tolerances::standard()
    }

    fn datum(space: Space, vertical: Option<Vertical<f64>>) -> MorseDatum<f64> {
        MorseDatum::new(space, SymmetricSpectrum::diagonal(&[1.0, 2.0, 3.0], &tol()).unwrap(), vertical, "a").unwrap()
    }

    #[test]
    fn sphere_unstable_stratum() {
        let d = datum(Space::Sphere, None);
        let cp = d.critical_point("p1+").unwrap();
        let u = d.unstable_stratum(&cp).unwrap();
        assert_eq!(u.range, (0, 1));
        assert_eq!(u.leading, Some((1, Sign::Plus)));
        assert_eq!(u.dim(), 1);
        let r = 0.5f64.sqrt();
        assert!(u.contains(&Point::base(vec![r, r, 0.0]), &tol()));
        assert!(!u.contains(&Point::base(vec![r, -r, 0.0]), &tol()));
    }

    #[test]
    fn projective_stable_stratum() {
        let d = datum(Space::Projective, None);
        let cp = d.critical_point("[p1]").unwrap();
        let s = d.stable_stratum(&cp).unwrap();
        assert_eq!(s.range, (1, 2));
        assert_eq!(s.leading, None);
        let r = 0.5f64.sqrt();
        assert!(s.contains(&Point::base(vec![0.0, -r, r]), &tol()));
    }

    #[test]
    fn vertical_slices() {
        let d = datum(Space::Projective, Some(Vertical { sign: Sign::Minus, center: 0.0 }));
        let cp = d.critical_point("x2^a").unwrap();
        let s = d.stable_stratum(&cp).unwrap();
        assert_eq!(s.range, (1, 2));
        assert_eq!(s.vertical, VerticalPart::PointAt(0.0));
        let u = d.unstable_stratum(&cp).unwrap();
        assert_eq!(u.vertical, VerticalPart::FullLine);
        assert_eq!(u.dim(), 2);
    }

    #[test]
    fn foreign_point_is_rejected() {
        let d = datum(Space::Sphere, None);
        let other = datum(Space::Projective, None);
        let cp = other.critical_point("[p0]").unwrap();
        assert!(matches!(d.stable_stratum(&cp), Err(Error::ForeignCriticalPoint(_))));
    }

    #[test]
    fn orientation_at_the_critical_point() {
        let d = datum(Space::Sphere, None);
        for name in ["p2+", "p2-"] {
            let cp = d.critical_point(name).unwrap();
            let p = d.point_of(&cp);
            let frame = TangentFrame::at(&p, &tol());
            let o = d.unstable_stratum(&cp).unwrap().oriented_tangent(&p, &frame, &tol()).unwrap();
            let c = d.stable_stratum(&cp).unwrap().coorientation(&p, &frame, &tol()).unwrap();
            // the unstable orientation and the stable coorientation agree at the critical point
            assert_eq!(o.same_orientation(&c.normal_basis, &tol()).unwrap(), Sign::Plus);
        }
    }
}
