use serde::{Deserialize, Serialize};

use super::spectrum::{canonical_representative, SymmetricSpectrum};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{Real, Sign, Tolerances};

/// Base manifold of a datum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Sphere,
    Projective,
}

/// Line factor `σ (y - c)^2` on `base × [-1, 1]`.
///
/// `sign = Plus` attracts toward `y = c`, `sign = Minus` repels and shifts
/// every Morse index by one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertical<T> {
    pub sign: Sign,
    pub center: T,
}

/// A point of `S^n`, `RP^n` (unit representative) or their product with the line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: Vec<T>,
    pub y: Option<T>,
}

impl<T: Real> Point<T> {
    pub fn base(x: Vec<T>) -> Self {
        Point { x, y: None }
    }

    pub fn with_height(x: Vec<T>, y: T) -> Self {
        Point { x, y: Some(y) }
    }

    /// Distance in the ambient `R^{n+1} × R`, identifying `±x` when `projective`.
    pub fn distance(&self, other: &Point<T>, projective: bool) -> T {
        let direct = linalg::norm(&linalg::sub(&self.x, &other.x));
        let base = if projective {
            direct.min(linalg::norm(&linalg::add(&self.x, &other.x)))
        } else {
            direct
        };
        let vertical = match (self.y, other.y) {
            (Some(a), Some(b)) => (a - b).abs(),
            _ => T::zero(),
        };
        (base * base + vertical * vertical).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    Plus,
    Minus,
    /// The class `[p_k]` on the projective space.
    Class,
}

impl Sheet {
    pub fn sign(self) -> Sign {
        match self {
            Sheet::Minus => Sign::Minus,
            Sheet::Plus | Sheet::Class => Sign::Plus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CriticalPointLabel {
    pub name: String,
    pub eigen_index: usize,
    pub sheet: Sheet,
    pub vertical_at_center: bool,
    pub morse_index: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorseDatum<T> {
    pub space: Space,
    pub spectrum: SymmetricSpectrum<T>,
    pub vertical: Option<Vertical<T>>,
    pub label: String,
}

impl<T: Real> MorseDatum<T> {
    pub fn new(
        space: Space,
        spectrum: SymmetricSpectrum<T>,
        vertical: Option<Vertical<T>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let label = label.into();
        if label.is_empty() {
            return Err(Error::InvalidInput("datum label must be nonempty".into()));
        }
        if let Some(v) = &vertical {
            if !(v.center > -T::one() && v.center < T::one()) {
                return Err(Error::InvalidInput(format!(
                    "vertical center {} of datum {label} is outside (-1, 1)",
                    v.center
                )));
            }
        }
        Ok(MorseDatum { space, spectrum, vertical, label })
    }

    pub fn sphere(spectrum: SymmetricSpectrum<T>, label: impl Into<String>) -> Result<Self> {
        Self::new(Space::Sphere, spectrum, None, label)
    }

    pub fn projective(spectrum: SymmetricSpectrum<T>, label: impl Into<String>) -> Result<Self> {
        Self::new(Space::Projective, spectrum, None, label)
    }

    /// Manifold dimension of the base.
    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    /// Manifold dimension including the line factor.
    pub fn manifold_dim(&self) -> usize {
        self.n() + usize::from(self.vertical.is_some())
    }

    pub fn is_projective(&self) -> bool {
        self.space == Space::Projective
    }

    /// Index shift contributed by a repelling line factor.
    pub fn index_shift(&self) -> usize {
        usize::from(matches!(self.vertical, Some(Vertical { sign: Sign::Minus, .. })))
    }

    /// Attracting type: closed base, or a line factor that attracts.
    pub fn is_attracting_type(&self) -> bool {
        self.index_shift() == 0
    }

    /// True when both data generate the same flow on the same neighborhood.
    pub fn same_flow(&self, other: &Self, tol: &Tolerances<T>) -> bool {
        let vertical_match = match (&self.vertical, &other.vertical) {
            (None, None) => true,
            (Some(a), Some(b)) => a.sign == b.sign && (a.center - b.center).abs() <= tol.sym,
            _ => false,
        };
        self.space == other.space && vertical_match && self.spectrum.same_matrix(&other.spectrum, tol)
    }

    /// Same base space, dimension and line factor presence.
    pub fn same_neighborhood(&self, other: &Self) -> bool {
        self.space == other.space
            && self.n() == other.n()
            && self.vertical.is_some() == other.vertical.is_some()
    }

    pub fn generator_name(&self, eigen_index: usize, sheet: Sheet) -> String {
        let suffix = match sheet {
            Sheet::Plus => "+",
            Sheet::Minus => "-",
            Sheet::Class => "",
        };
        match self.vertical {
            None if sheet == Sheet::Class => format!("[p{eigen_index}]"),
            None => format!("p{eigen_index}{suffix}"),
            Some(_) => {
                let index = eigen_index + self.index_shift();
                format!("x{index}{suffix}^{}", self.label)
            }
        }
    }

    pub fn critical_points(&self) -> Vec<CriticalPointLabel> {
        let sheets: &[Sheet] = match self.space {
            Space::Sphere => &[Sheet::Plus, Sheet::Minus],
            Space::Projective => &[Sheet::Class],
        };
        (0..=self.n())
            .flat_map(|k| {
                sheets.iter().map(move |&sheet| CriticalPointLabel {
                    name: self.generator_name(k, sheet),
                    eigen_index: k,
                    sheet,
                    vertical_at_center: self.vertical.is_some(),
                    morse_index: k + self.index_shift(),
                })
            })
            .collect()
    }

    pub fn critical_point(&self, name: &str) -> Option<CriticalPointLabel> {
        self.critical_points().into_iter().find(|c| c.name == name)
    }

    pub(crate) fn check_owns(&self, cp: &CriticalPointLabel) -> Result<()> {
        let valid = cp.eigen_index <= self.n()
            && cp.vertical_at_center == self.vertical.is_some()
            && cp.morse_index == cp.eigen_index + self.index_shift()
            && (cp.sheet == Sheet::Class) == self.is_projective()
            && cp.name == self.generator_name(cp.eigen_index, cp.sheet);
        if valid {
            Ok(())
        } else {
            Err(Error::ForeignCriticalPoint(format!("{} in datum {}", cp.name, self.label)))
        }
    }

    /// Location of a critical point.
    pub fn point_of(&self, cp: &CriticalPointLabel) -> Point<T> {
        let p = self.spectrum.eigenvector(cp.eigen_index);
        let x = match cp.sheet {
            Sheet::Minus => p.iter().map(|&c| -c).collect(),
            _ => p.to_vec(),
        };
        Point { x, y: self.vertical.map(|v| v.center) }
    }

    /// `F(x, y) = ½<x, R x> + σ (y - c)^2`.
    pub fn value(&self, p: &Point<T>) -> T {
        let base = T::lit(0.5) * linalg::dot(&p.x, &self.spectrum.matrix().mul_vec(&p.x));
        match (self.vertical, p.y) {
            (Some(v), Some(y)) => base + v.sign.as_real::<T>() * (y - v.center) * (y - v.center),
            _ => base,
        }
    }

    /// `-∇F` in ambient coordinates (base block then vertical).
    pub fn descent_direction(&self, p: &Point<T>) -> Point<T> {
        let r = self.spectrum.matrix().mul_vec(&p.x);
        let f2 = linalg::dot(&p.x, &r);
        let x = r.iter().zip(&p.x).map(|(&ri, &xi)| f2 * xi - ri).collect();
        let y = match (self.vertical, p.y) {
            (Some(v), Some(y)) => Some(-T::lit(2.0) * v.sign.as_real::<T>() * (y - v.center)),
            _ => None,
        };
        Point { x, y }
    }

    /// Validates that `p` lies on the space within `tol.on`.
    pub fn check_on_space(&self, p: &Point<T>, tol: &Tolerances<T>) -> Result<()> {
        if p.x.len() != self.spectrum.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} for ambient dimension {}",
                p.x.len(),
                self.spectrum.dim()
            )));
        }
        let defect = (linalg::norm(&p.x) - T::one()).abs();
        if !(defect <= tol.on) {
            return Err(Error::NotOnSpace(defect.to_f64_lossy()));
        }
        match (self.vertical.is_some(), p.y) {
            (false, None) => Ok(()),
            (true, Some(y)) if y.abs() <= T::one() + tol.on => Ok(()),
            (true, Some(y)) => Err(Error::NotOnSpace((y.abs() - T::one()).to_f64_lossy())),
            _ => Err(Error::DimensionMismatch("vertical coordinate presence".into())),
        }
    }

    /// Closed-form flow of `-∇F` for time `t` (any sign).
    pub fn flow(&self, p: &Point<T>, t: T, tol: &Tolerances<T>) -> Result<Point<T>> {
        self.check_on_space(p, tol)?;
        let coeffs = self
            .flow_coefficients(&self.spectrum.coefficients(&p.x), t)
            .ok_or(Error::NotOnSpace(1.0))?;
        let x = linalg::combine(self.spectrum.dim(), &coeffs, self.spectrum.eigenvectors());
        let x = linalg::normalized(&x).ok_or(Error::NotOnSpace(1.0))?;
        let x = if self.is_projective() { canonical_representative(&x, tol.on) } else { x };
        Ok(Point { x, y: p.y.map(|y| self.flow_height(y, t)) })
    }

    /// The base flow in eigen-coordinates: `a_i e^{-λ_i t}`, normalized.
    /// `None` when every coefficient vanishes.
    pub fn flow_coefficients(&self, a: &[T], t: T) -> Option<Vec<T>> {
        let lambda = self.spectrum.eigenvalues();
        // log-magnitudes shifted by their maximum so nothing overflows
        let logs: Vec<Option<T>> = a
            .iter()
            .zip(lambda)
            .map(|(&ai, &li)| (ai != T::zero()).then(|| ai.abs().ln() - t * li))
            .collect();
        let top = logs.iter().flatten().fold(T::neg_infinity(), |m, &l| m.max(l));
        if top == T::neg_infinity() {
            return None;
        }
        let coeffs: Vec<T> = a
            .iter()
            .zip(&logs)
            .map(|(&ai, l)| l.map_or(T::zero(), |l| ai.signum() * (l - top).exp()))
            .collect();
        linalg::normalized(&coeffs)
    }

    /// Line coordinate after time `t`; unchanged without a line factor.
    pub fn flow_height(&self, y: T, t: T) -> T {
        match self.vertical {
            // avoid 0 * inf when sitting exactly on the center
            Some(v) if y != v.center => {
                let rate = -T::lit(2.0) * v.sign.as_real::<T>();
                v.center + (y - v.center) * (rate * t).exp()
            }
            _ => y,
        }
    }

    /// Number of negative eigenvalues of the Hessian at a critical point.
    pub fn hessian_index(&self, cp: &CriticalPointLabel, tol: &Tolerances<T>) -> Result<usize> {
        self.check_owns(cp)?;
        let x = self.point_of(cp).x;
        let dim = self.spectrum.dim();
        let tangent = linalg::orthogonal_complement(dim, std::slice::from_ref(&x), None, tol.rank);
        let r = self.spectrum.matrix();
        let f2 = linalg::dot(&x, &r.mul_vec(&x));
        let h = Matrix::from_fn(tangent.len(), tangent.len(), |i, j| {
            linalg::dot(&tangent[i], &r.mul_vec(&tangent[j])) - f2 * linalg::dot(&tangent[i], &tangent[j])
        });
        let (values, _) = linalg::symmetric_eigen(&h);
        if values.iter().any(|v| v.abs() <= tol.eig) {
            return Err(Error::DegenerateSpectrum { index: cp.eigen_index, gap: 0.0 });
        }
        let base = values.iter().filter(|v| **v < T::zero()).count();
        Ok(base + self.index_shift())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances<f64> {
        Tolerances::standard()
    }

    fn diag(values: &[f64]) -> SymmetricSpectrum<f64> {
        SymmetricSpectrum::diagonal(values, &tol()).unwrap()
    }

    #[test]
    fn critical_point_counts_and_indices() {
        let s = MorseDatum::sphere(diag(&[1.0, 2.0, 3.0]), "a").unwrap();
        let mut idx: Vec<usize> = s.critical_points().iter().map(|c| c.morse_index).collect();
        idx.sort();
        assert_eq!(idx, vec![0, 0, 1, 1, 2, 2]);

        let p = MorseDatum::projective(diag(&[1.0, 2.0, 3.0]), "a").unwrap();
        let idx: Vec<usize> = p.critical_points().iter().map(|c| c.morse_index).collect();
        assert_eq!(idx, vec![0, 1, 2]);
        assert_eq!(p.critical_points()[1].name, "[p1]");

        let v = MorseDatum::new(
            Space::Projective,
            diag(&[1.0, 2.0, 3.0]),
            Some(Vertical { sign: Sign::Minus, center: 0.0 }),
            "alpha",
        )
        .unwrap();
        let cps = v.critical_points();
        assert_eq!(cps.iter().map(|c| c.morse_index).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(cps[0].name, "x1^alpha");
    }

    #[test]
    fn center_must_be_interior() {
        let err = MorseDatum::new(
            Space::Sphere,
            diag(&[1.0, 2.0]),
            Some(Vertical { sign: Sign::Plus, center: 1.0 }),
            "b",
        );
        assert!(err.is_err());
        assert!(MorseDatum::sphere(diag(&[1.0, 2.0]), "").is_err());
    }

    #[test]
    fn fixed_points_do_not_move() {
        let d = MorseDatum::sphere(diag(&[1.0, 2.0, 4.0]), "a").unwrap();
        for cp in d.critical_points() {
            let p = d.point_of(&cp);
            let q = d.flow(&p, 3.7, &tol()).unwrap();
            assert!(p.distance(&q, false) < 1e-12);
        }
    }

    #[test]
    fn limits_of_the_diagonal_example() {
        let d = MorseDatum::sphere(diag(&[1.0, 2.0]), "a").unwrap();
        let r = 0.5f64.sqrt();
        let p = Point::base(vec![r, r]);
        let fwd = d.flow(&p, 60.0, &tol()).unwrap();
        let bwd = d.flow(&p, -60.0, &tol()).unwrap();
        assert!(linalg::norm(&linalg::sub(&fwd.x, &[1.0, 0.0])) < 1e-12);
        assert!(linalg::norm(&linalg::sub(&bwd.x, &[0.0, 1.0])) < 1e-12);
        // huge times stay finite
        let far = d.flow(&p, 1e6, &tol()).unwrap();
        assert!(far.x.iter().all(|c| c.is_finite()));
    }

    #[test]
    fn off_space_point_is_rejected() {
        let d = MorseDatum::sphere(diag(&[1.0, 2.0]), "a").unwrap();
        assert!(matches!(d.flow(&Point::base(vec![1.0, 1.0]), 1.0, &tol()), Err(Error::NotOnSpace(_))));
    }

    #[test]
    fn hessian_index_matches_eigen_index() {
        let d = MorseDatum::new(
            Space::Sphere,
            diag(&[0.5, 1.5, 2.0, 4.0]),
            Some(Vertical { sign: Sign::Minus, center: 0.25 }),
            "a",
        )
        .unwrap();
        for cp in d.critical_points() {
            assert_eq!(d.hessian_index(&cp, &tol()).unwrap(), cp.morse_index);
        }
    }

    #[test]
    fn vertical_flow_repels_or_attracts() {
        let spec = diag(&[1.0, 2.0]);
        let rep = MorseDatum::new(Space::Sphere, spec.clone(), Some(Vertical { sign: Sign::Minus, center: 0.0 }), "a")
            .unwrap();
        let att = MorseDatum::new(Space::Sphere, spec, Some(Vertical { sign: Sign::Plus, center: 0.5 }), "b").unwrap();
        let p = Point::with_height(vec![1.0, 0.0], 0.1);
        assert!(rep.flow(&p, 2.0, &tol()).unwrap().y.unwrap() > 0.9);
        assert!((att.flow(&p, 20.0, &tol()).unwrap().y.unwrap() - 0.5).abs() < 1e-9);
    }
}
