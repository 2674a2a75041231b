use num_bigint::BigInt;
use num_traits::Zero;

use super::datum::{CriticalPointLabel, MorseDatum, Point, Space};
use crate::coefficients::{RingMatrix, RingTag};
use crate::complex::{GeneratorLabel, GradedComplex};
use crate::error::{Error, Result};
use crate::intersections::{intersect, quotient_orientation, TangentFrame};
use crate::linalg;
use crate::scalar::{Real, Sign, Tolerances};

impl<T: Real> MorseDatum<T> {
    /// One representative point per unparametrized orbit from `hi` to `lo`.
    ///
    /// With adjacent eigen-indices `k + 1`, `k` the orbits are the open arcs of
    /// the circle in `span{p_k, p_{k+1}}` whose endpoints are the two critical
    /// points; on the projective space antipodal arcs coincide.
    pub fn connecting_orbits(&self, hi: &CriticalPointLabel, lo: &CriticalPointLabel) -> Result<Vec<Point<T>>> {
        self.check_owns(hi)?;
        self.check_owns(lo)?;
        if hi.morse_index != lo.morse_index + 1 {
            return Err(Error::IndexGap { hi: hi.morse_index, lo: lo.morse_index });
        }
        let k = lo.eigen_index;
        let (p, q) = (self.spectrum.eigenvector(k), self.spectrum.eigenvector(k + 1));
        let r = T::lit(0.5).sqrt();
        let arc = |s_lo: Sign, s_hi: Sign| Point {
            x: linalg::add(&linalg::scaled(p, s_lo.as_real::<T>() * r), &linalg::scaled(q, s_hi.as_real::<T>() * r)),
            y: self.vertical.map(|v| v.center),
        };
        Ok(match self.space {
            Space::Sphere => vec![arc(lo.sheet.sign(), hi.sheet.sign())],
            Space::Projective => vec![arc(Sign::Plus, Sign::Plus), arc(Sign::Plus, Sign::Minus)],
        })
    }

    /// Oriented count `m` of orbits from `hi` down to `lo`.
    pub fn connection_count(
        &self,
        hi: &CriticalPointLabel,
        lo: &CriticalPointLabel,
        ring: RingTag,
        tol: &Tolerances<T>,
    ) -> Result<BigInt> {
        let orbits = self.connecting_orbits(hi, lo)?;
        match ring {
            RingTag::Z2 => Ok(BigInt::from(orbits.len() % 2)),
            RingTag::Z => {
                if self.space == Space::Projective {
                    return Err(Error::UnsupportedRing(RingTag::Z, "projective data".into()));
                }
                let mut total = BigInt::zero();
                for q in &orbits {
                    total += self.orbit_sign(hi, lo, q, tol)?.as_i64();
                }
                Ok(total)
            }
        }
    }

    /// Sign of one orbit: orient `W^u(hi) ∩ W^s(lo)` and divide by the flow.
    fn orbit_sign(&self, hi: &CriticalPointLabel, lo: &CriticalPointLabel, q: &Point<T>, tol: &Tolerances<T>) -> Result<Sign> {
        let frame = TangentFrame::at(q, tol);
        let x = self.unstable_stratum(hi)?.oriented_tangent(q, &frame, tol)?;
        let y = self.stable_stratum(lo)?.coorientation(q, &frame, tol)?;
        let orbit = intersect(&x, &y, tol)?;
        let flow = frame.express_point(&self.descent_direction(q));
        Ok(quotient_orientation(&orbit, &flow, tol)?.sign)
    }

    /// Morse cochain complex; generators sorted by name within each degree.
    pub fn build_complex(&self, ring: RingTag, tol: &Tolerances<T>) -> Result<GradedComplex> {
        if ring == RingTag::Z && self.space == Space::Projective {
            return Err(Error::UnsupportedRing(RingTag::Z, "projective data".into()));
        }
        let top = self.n() + self.index_shift();
        let mut by_degree: Vec<Vec<CriticalPointLabel>> = vec![Vec::new(); top + 1];
        for cp in self.critical_points() {
            by_degree[cp.morse_index].push(cp);
        }
        for cps in &mut by_degree {
            cps.sort_by(|a, b| a.name.cmp(&b.name));
        }
        let mut differentials = Vec::with_capacity(top);
        for k in 0..top {
            let (lo, hi) = (&by_degree[k], &by_degree[k + 1]);
            let mut d = RingMatrix::zeros(ring, hi.len(), lo.len());
            for (i, h) in hi.iter().enumerate() {
                for (j, l) in lo.iter().enumerate() {
                    d.set(i, j, self.connection_count(h, l, ring, tol)?);
                }
            }
            differentials.push(d);
        }
        let generators = by_degree
            .iter()
            .enumerate()
            .map(|(k, cps)| cps.iter().map(|c| GeneratorLabel::new(c.name.clone(), k)).collect())
            .collect();
        GradedComplex::new(ring, generators, differentials)
    }
}
