//! Brute-force recounting by integrating the flow.
//!
//! Nothing here touches the orientation or intersection code: candidate
//! points come from a separate Gaussian elimination and every candidate is
//! accepted only after its limits have been classified and checked against
//! the integrated flow.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::coefficients::RingTag;
use crate::cup::chain_cup;
use crate::eigenflow::{canonical_representative, CriticalPointLabel, MorseDatum, Point, Sheet, Space};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Real, Sign, Tolerances};

/// Largest base dimension the brute-force counters accept.
pub const MAX_ORACLE_DIM: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// Horizon `T` for flow integration.
    pub horizon: f64,
    pub samples_per_cell: usize,
    /// Grid step `h`, used both for cells in the line factor and time steps.
    pub grid_step: f64,
    pub seed: u64,
    /// Proximity to the predicted limit after flowing.
    pub near: f64,
    /// Clearance `d_int` required between the sampled invariant set and `∂N`.
    pub interior_clearance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            horizon: 50.0,
            samples_per_cell: 3,
            grid_step: 0.1,
            seed: 0,
            near: 1e-4,
            interior_clearance: 0.05,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.horizon > 0.0
            && self.grid_step > 0.0
            && self.samples_per_cell >= 1
            && self.near > 0.0
            && self.interior_clearance >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid oracle configuration {self:?}")))
        }
    }
}

/// Side-by-side oracle and symbolic counts, reduced mod 2.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCounts {
    /// `"label: hi -> lo"` to `(oracle, symbolic)`.
    pub connections: BTreeMap<String, (u8, u8)>,
    /// `"(z, x, y)"` to `(oracle, symbolic)`.
    pub triples: BTreeMap<String, (u8, u8)>,
    pub discrepancies: Vec<String>,
}

impl OracleCounts {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

fn check_budget<T: Real>(d: &MorseDatum<T>) -> Result<()> {
    if d.n() > MAX_ORACLE_DIM {
        return Err(Error::DimensionBudget { n: d.n(), max: MAX_ORACLE_DIM });
    }
    Ok(())
}

/// Limit of the trajectory through `p` as `t → ±∞`.
///
/// The prediction is read off the extremal supported eigen-coefficient and
/// then confirmed by flowing the point (with sub-threshold coefficients
/// removed) over a horizon long enough to reach `cfg.near`.
pub fn classify_limit<T: Real>(
    d: &MorseDatum<T>,
    p: &Point<T>,
    direction: Direction,
    cfg: &OracleConfig,
    tol: &Tolerances<T>,
) -> Result<CriticalPointLabel> {
    d.check_on_space(p, tol)?;
    let mut y = p.y;
    if let (Some(v), Some(h)) = (d.vertical, p.y) {
        let repelling = (direction == Direction::Forward) == (v.sign == Sign::Minus);
        if repelling {
            if (h - v.center).abs() > tol.support {
                return Err(Error::ExitsNeighborhood);
            }
            y = Some(v.center);
        }
    }

    let a = d.spectrum.coefficients(&p.x);
    let support: Vec<usize> = (0..a.len()).filter(|&i| a[i].abs() > tol.support).collect();
    let k = match direction {
        Direction::Forward => support.first(),
        Direction::Backward => support.last(),
    }
    .copied()
    .ok_or(Error::AmbiguousSupport)?;
    let sheet = match d.space {
        Space::Projective => Sheet::Class,
        Space::Sphere if a[k] > T::zero() => Sheet::Plus,
        Space::Sphere => Sheet::Minus,
    };
    let label = CriticalPointLabel {
        name: d.generator_name(k, sheet),
        eigen_index: k,
        sheet,
        vertical_at_center: d.vertical.is_some(),
        morse_index: k + d.index_shift(),
    };

    let lambda = d.spectrum.eigenvalues();
    let near = T::lit(cfg.near);
    let mut horizon = T::lit(cfg.horizon);
    for &j in support.iter().filter(|&&j| j != k) {
        let rate = (lambda[j] - lambda[k]).abs();
        let needed = ((a[j] / a[k]).abs().ln() + (T::lit(2.0 * a.len() as f64) / near).ln()) / rate;
        horizon = horizon.max(needed);
    }
    // flow in eigen-coordinates so removed coefficients stay exactly zero
    let cleaned: Vec<T> = (0..a.len()).map(|i| if support.contains(&i) { a[i] } else { T::zero() }).collect();
    let t = match direction {
        Direction::Forward => horizon,
        Direction::Backward => -horizon,
    };
    let end = Point {
        x: d.flow_coefficients(&cleaned, t).ok_or(Error::AmbiguousSupport)?,
        y: y.map(|h| d.flow_height(h, t)),
    };
    let mut target = vec![T::zero(); a.len()];
    target[k] = sheet.sign().as_real();
    let predicted = Point { x: target, y: d.vertical.map(|v| v.center) };
    let distance = predicted.distance(&end, d.is_projective());
    if !(distance < near) {
        return Err(Error::LimitMismatch(distance.to_f64_lossy()));
    }
    Ok(label)
}

/// Number of orbits from `hi` to `lo`, mod 2, found by trying every sign
/// pattern on the two extremal eigen-coefficients.
pub fn count_connections_bruteforce<T: Real>(
    d: &MorseDatum<T>,
    hi: &CriticalPointLabel,
    lo: &CriticalPointLabel,
    cfg: &OracleConfig,
    tol: &Tolerances<T>,
) -> Result<u8> {
    check_budget(d)?;
    if hi.morse_index != lo.morse_index + 1 {
        return Err(Error::IndexGap { hi: hi.morse_index, lo: lo.morse_index });
    }
    let (p, q) = (d.spectrum.eigenvector(lo.eigen_index), d.spectrum.eigenvector(hi.eigen_index));
    let mut found: Vec<Vec<T>> = Vec::new();
    for s_lo in [Sign::Plus, Sign::Minus] {
        for s_hi in [Sign::Plus, Sign::Minus] {
            let x = linalg::add(
                &linalg::scaled(p, T::lit(0.6) * s_lo.as_real::<T>()),
                &linalg::scaled(q, T::lit(0.8) * s_hi.as_real::<T>()),
            );
            let x = if d.is_projective() { canonical_representative(&x, tol.on) } else { x };
            if found.iter().any(|f| linalg::norm(&linalg::sub(f, &x)) < T::lit(1e-6)) {
                continue;
            }
            let point = Point { x: x.clone(), y: d.vertical.map(|v| v.center) };
            let back = classify_limit(d, &point, Direction::Backward, cfg, tol)?;
            let fwd = classify_limit(d, &point, Direction::Forward, cfg, tol)?;
            if back.name == hi.name && fwd.name == lo.name {
                found.push(x);
            }
        }
    }
    Ok((found.len() % 2) as u8)
}

/// Nullspace by Gaussian elimination with partial pivoting.
fn gauss_null_space<T: Real>(rows: &[Vec<T>], cols: usize, rel_tol: T) -> Vec<Vec<T>> {
    let mut m: Vec<Vec<T>> = rows.to_vec();
    let scale = m.iter().flatten().fold(T::zero(), |s, x| s.max(x.abs()));
    let cutoff = rel_tol * scale.max(T::one());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let best = (r..m.len()).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).expect("finite"));
        let Some(best) = best else { break };
        if m[best][c].abs() <= cutoff {
            continue;
        }
        m.swap(r, best);
        let piv = m[r][c];
        for v in m[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            let f = row[c];
            if i != r && f != T::zero() {
                for (v, &p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![T::zero(); cols];
            v[free] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][free];
            }
            v
        })
        .collect()
}

/// Vertical constraint of a stratum: `Some(c)` when it is the point `y = c`.
fn vertical_point<T: Real>(d: &MorseDatum<T>, unstable: bool) -> Option<T> {
    let v = d.vertical?;
    // attracting factor: stable part is the whole line, unstable the point
    let is_point = (v.sign == Sign::Plus) == unstable;
    is_point.then_some(v.center)
}

/// Number of points of `W^u(z; γ) ∩ W^s(x; α) ∩ W^s(y; β)`, mod 2.
#[allow(clippy::too_many_arguments)]
pub fn count_triple_bruteforce<T: Real>(
    gamma: &MorseDatum<T>,
    alpha: &MorseDatum<T>,
    beta: &MorseDatum<T>,
    z: &CriticalPointLabel,
    x: &CriticalPointLabel,
    y: &CriticalPointLabel,
    cfg: &OracleConfig,
    tol: &Tolerances<T>,
) -> Result<u8> {
    for d in [gamma, alpha, beta] {
        check_budget(d)?;
    }
    let expected = z.morse_index as i64 - x.morse_index as i64 - y.morse_index as i64;
    if expected != 0 {
        return Err(Error::ExpectedDimensionNonZero(expected));
    }
    let dim = gamma.spectrum.dim();
    let mut rows: Vec<Vec<T>> = Vec::new();
    rows.extend((z.eigen_index + 1..dim).map(|i| gamma.spectrum.eigenvector(i).to_vec()));
    rows.extend((0..x.eigen_index).map(|i| alpha.spectrum.eigenvector(i).to_vec()));
    rows.extend((0..y.eigen_index).map(|i| beta.spectrum.eigenvector(i).to_vec()));
    let kernel = gauss_null_space(&rows, dim, tol.rank);

    let centers: Vec<T> = [vertical_point(gamma, true), vertical_point(alpha, false), vertical_point(beta, false)]
        .into_iter()
        .flatten()
        .collect();
    let height = match centers.first() {
        _ if gamma.vertical.is_none() => None,
        None => {
            return match kernel.len() {
                0 => Ok(0),
                _ => Err(Error::Transversality("free line factor gives a continuum".into())),
            }
        }
        Some(&c) => {
            if centers.iter().any(|&o| (o - c).abs() > tol.sym) {
                return Ok(0);
            }
            Some(c)
        }
    };
    let v = match kernel.len() {
        0 => return Ok(0),
        1 => linalg::normalized(&kernel[0]).ok_or(Error::AmbiguousSupport)?,
        k => return Err(Error::Transversality(format!("{k}-dimensional solution cone"))),
    };
    let candidates = match gamma.space {
        Space::Sphere => vec![v.clone(), linalg::scaled(&v, -T::one())],
        Space::Projective => vec![canonical_representative(&v, tol.on)],
    };
    let mut count = 0u8;
    for c in candidates {
        let p = Point { x: c, y: height };
        let hits = [
            (gamma, Direction::Backward, z),
            (alpha, Direction::Forward, x),
            (beta, Direction::Forward, y),
        ]
        .into_iter()
        .map(|(d, dir, target)| match classify_limit(d, &p, dir, cfg, tol) {
            Ok(label) => Ok(label.name == target.name),
            Err(Error::ExitsNeighborhood | Error::AmbiguousSupport) => Ok(false),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<bool>>>()?;
        if hits.into_iter().all(|h| h) {
            count += 1;
        }
    }
    Ok(count % 2)
}

/// Samples the neighborhood and flags points whose `α`, `β` forward and `γ`
/// backward trajectories stay in `N` on `[0, T]`; true iff every flagged
/// point keeps `cfg.interior_clearance` from the boundary.
pub fn z_set_sample_check<T: Real>(
    gamma: &MorseDatum<T>,
    alpha: &MorseDatum<T>,
    beta: &MorseDatum<T>,
    cfg: &OracleConfig,
    tol: &Tolerances<T>,
) -> Result<bool> {
    cfg.validate()?;
    if gamma.vertical.is_none() {
        return Ok(true);
    }
    let dim = gamma.spectrum.dim();
    let cells = (2.0 / cfg.grid_step).ceil() as usize;
    let steps = (cfg.horizon / cfg.grid_step).ceil() as usize;
    let inside = |p: &Point<T>| p.y.is_some_and(|h| h.abs() <= T::one());
    for cell in 0..cells {
        let lo = -1.0 + cell as f64 * cfg.grid_step;
        let hi = (lo + cfg.grid_step).min(1.0);
        for s in 0..cfg.samples_per_cell {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream((cell * cfg.samples_per_cell + s) as u64);
            let h = lo + (hi - lo) * rng.random::<f64>();
            let raw: Vec<T> = (0..dim).map(|_| T::lit(StandardNormal.sample(&mut rng))).collect();
            let Some(x) = linalg::normalized(&raw) else { continue };
            let p = Point { x, y: Some(T::lit(h)) };
            let mut flagged = true;
            'time: for step in 0..=steps {
                let t = T::lit((step as f64 * cfg.grid_step).min(cfg.horizon));
                for (d, t) in [(alpha, t), (beta, t), (gamma, -t)] {
                    if !inside(&d.flow(&p, t, tol)?) {
                        flagged = false;
                        break 'time;
                    }
                }
            }
            if flagged && 1.0 - h.abs() < cfg.interior_clearance {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn mod2(x: &BigInt) -> u8 {
    u8::from(RingTag::Z2.reduce(x.clone()) != BigInt::from(0))
}

/// Recounts every connection of the three data and every admissible triple,
/// comparing with the symbolic engine over Z/2.
pub fn oracle_agreement<T: Real>(
    gamma: &MorseDatum<T>,
    alpha: &MorseDatum<T>,
    beta: &MorseDatum<T>,
    cfg: &OracleConfig,
    tol: &Tolerances<T>,
) -> Result<OracleCounts> {
    let mut out = OracleCounts::default();
    let mut seen: Vec<&str> = Vec::new();
    for d in [gamma, alpha, beta] {
        if seen.contains(&d.label.as_str()) {
            continue;
        }
        seen.push(&d.label);
        let cps = d.critical_points();
        for hi in &cps {
            for lo in cps.iter().filter(|lo| lo.morse_index + 1 == hi.morse_index) {
                let oracle = count_connections_bruteforce(d, hi, lo, cfg, tol)?;
                let symbolic = mod2(&d.connection_count(hi, lo, RingTag::Z2, tol)?);
                let key = format!("{}: {} -> {}", d.label, hi.name, lo.name);
                if oracle != symbolic {
                    out.discrepancies.push(format!("connection {key}: oracle {oracle}, symbolic {symbolic}"));
                }
                out.connections.insert(key, (oracle, symbolic));
            }
        }
    }
    let w = chain_cup(gamma, alpha, beta, RingTag::Z2, cfg, tol)?;
    for z in gamma.critical_points() {
        for x in alpha.critical_points() {
            for y in beta.critical_points() {
                if x.morse_index + y.morse_index != z.morse_index {
                    continue;
                }
                let oracle = count_triple_bruteforce(gamma, alpha, beta, &z, &x, &y, cfg, tol)?;
                let symbolic = mod2(&w.get(&z.name, &x.name, &y.name));
                let key = format!("({}, {}, {})", z.name, x.name, y.name);
                if oracle != symbolic {
                    out.discrepancies.push(format!("triple {key}: oracle {oracle}, symbolic {symbolic}"));
                }
                out.triples.insert(key, (oracle, symbolic));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenflow::{SymmetricSpectrum, Vertical};

    fn tol() -> Tolerances<f64> {
        Tolerances::standard()
    }

    fn diag(values: &[f64]) -> SymmetricSpectrum<f64> {
        SymmetricSpectrum::diagonal(values, &tol()).unwrap()
    }

    #[test]
    fn fixed_point_is_its_own_limit() {
        let d = MorseDatum::sphere(diag(&[1.0, 2.0, 3.0]), "a").unwrap();
        let cfg = OracleConfig::default();
        for cp in d.critical_points() {
            let p = d.point_of(&cp);
            for dir in [Direction::Forward, Direction::Backward] {
                assert_eq!(classify_limit(&d, &p, dir, &cfg, &tol()).unwrap(), cp);
            }
        }
    }

    #[test]
    fn diagonal_limit() {
        let d = MorseDatum::sphere(diag(&[1.0, 2.0]), "a").unwrap();
        let r = 0.5f64.sqrt();
        let cfg = OracleConfig::default();
        let fwd = classify_limit(&d, &Point::base(vec![r, r]), Direction::Forward, &cfg, &tol()).unwrap();
        assert_eq!(fwd.name, "p0+");
        let bwd = classify_limit(&d, &Point::base(vec![r, -r]), Direction::Backward, &cfg, &tol()).unwrap();
        assert_eq!(bwd.name, "p1-");
    }

    #[test]
    fn repelling_line_exits() {
        let d = MorseDatum::new(
            Space::Sphere,
            diag(&[1.0, 2.0]),
            Some(Vertical { sign: Sign::Minus, center: 0.0 }),
            "a",
        )
        .unwrap();
        let p = Point::with_height(vec![0.0, 1.0], 0.9);
        let cfg = OracleConfig::default();
        assert_eq!(classify_limit(&d, &p, Direction::Forward, &cfg, &tol()), Err(Error::ExitsNeighborhood));
        assert!(classify_limit(&d, &p, Direction::Backward, &cfg, &tol()).is_ok());
    }

    #[test]
    fn connection_counts() {
        let cfg = OracleConfig::default();
        let s = MorseDatum::sphere(diag(&[1.0, 2.0, 3.0]), "a").unwrap();
        let hi = s.critical_point("p1+").unwrap();
        let lo = s.critical_point("p0+").unwrap();
        assert_eq!(count_connections_bruteforce(&s, &hi, &lo, &cfg, &tol()).unwrap(), 1);
        let p = MorseDatum::projective(diag(&[1.0, 2.0, 3.0]), "a").unwrap();
        let hi = p.critical_point("[p1]").unwrap();
        let lo = p.critical_point("[p0]").unwrap();
        assert_eq!(count_connections_bruteforce(&p, &hi, &lo, &cfg, &tol()).unwrap(), 0);
        let big = MorseDatum::sphere(diag(&[1.0, 2.0, 3.0, 4.0, 5.0]), "a").unwrap();
        let cps = big.critical_points();
        assert_eq!(
            count_connections_bruteforce(&big, &cps[2], &cps[0], &cfg, &tol()),
            Err(Error::DimensionBudget { n: 4, max: 3 })
        );
    }

    #[test]
    fn gauss_kernel() {
        let k = gauss_null_space::<f64>(&[vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]], 3, 1e-12);
        assert_eq!(k.len(), 1);
        assert!((k[0][0] - 1.0).abs() < 1e-12 && (k[0][1] + 1.0).abs() < 1e-12 && (k[0][2] - 1.0).abs() < 1e-12);
        assert_eq!(gauss_null_space::<f64>(&[], 2, 1e-12).len(), 2);
    }

    #[test]
    fn boundary_touching_invariant_set_is_detected() {
        let spec = diag(&[1.0, 2.0]);
        let line = |sign, center| {
            MorseDatum::new(Space::Sphere, spec.clone(), Some(Vertical { sign, center }), "d").unwrap()
        };
        let cfg = OracleConfig::default();
        // forward attraction for alpha and beta, backward attraction for gamma: Z = N
        let (a, b, g) = (line(Sign::Plus, 0.95), line(Sign::Plus, -0.95), line(Sign::Minus, 0.95));
        assert!(!z_set_sample_check(&g, &a, &b, &cfg, &tol()).unwrap());
        // repelling alpha pins Z to its center
        let (a, b, g) = (line(Sign::Minus, 0.0), line(Sign::Plus, 0.5), line(Sign::Minus, 0.0));
        assert!(z_set_sample_check(&g, &a, &b, &cfg, &tol()).unwrap());
    }
}
