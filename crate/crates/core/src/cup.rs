//! Chain-level cup products from triple intersections.
//!
//! `η^x ⌣ η^y = Σ w_z^{x,y} η^z` with `w` the oriented (or mod-2) count of
//! `W^u(z; γ) ∩ W^s(x; α) ∩ W^s(y; β)`. The Leibniz rule and graded
//! commutativity are checked algebraically on the resulting tables.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficients::RingTag;
use crate::complex::{Cochain, GeneratorLabel, GradedComplex};
use crate::eigenflow::{MorseDatum, Space};
use crate::error::{Error, Result};
use crate::intersections::{general_position_check, triple_intersection};
use crate::oracle::{self, OracleConfig};
use crate::scalar::{Real, Sign, Tolerances};

/// Labels of the data in the `(γ, α, β)` slots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CupSources {
    pub gamma: String,
    pub alpha: String,
    pub beta: String,
}

/// Outcome of the isolation-compatibility gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsolationVerdict {
    /// `γ` shares its flow with `α` or `β`.
    StructurallyTrue,
    /// Certified by sampling only.
    SampledTrue,
    Fail,
}

/// Structure constants `w_z^{x,y}`; absent entries are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CupStructure {
    pub ring: RingTag,
    pub sources: CupSources,
    pub isolation: IsolationVerdict,
    generators: [Vec<GeneratorLabel>; 3],
    table: BTreeMap<(String, String, String), BigInt>,
}

/// First pair `(x, y)` whose Leibniz expansion is nonzero, with a generator
/// `z` where the residual is supported.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeibnizViolation {
    pub z: String,
    pub x: String,
    pub y: String,
    pub residual: BigInt,
}

/// Class-level product with its nonvanishing flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CupClass {
    pub cochain: Cochain,
    pub nonzero: bool,
}

fn flattened(c: &GradedComplex) -> Vec<GeneratorLabel> {
    c.all_generators().cloned().collect()
}

fn degree_map(gens: &[GeneratorLabel]) -> HashMap<&str, usize> {
    gens.iter().map(|g| (g.name.as_str(), g.degree)).collect()
}

impl CupStructure {
    /// Empty table on the given complexes.
    pub fn zero(
        ring: RingTag,
        sources: CupSources,
        gamma: &GradedComplex,
        alpha: &GradedComplex,
        beta: &GradedComplex,
    ) -> Self {
        CupStructure {
            ring,
            sources,
            isolation: IsolationVerdict::StructurallyTrue,
            generators: [flattened(gamma), flattened(alpha), flattened(beta)],
            table: BTreeMap::new(),
        }
    }

    fn degree(&self, slot: usize, name: &str) -> Option<usize> {
        self.generators[slot].iter().find(|g| g.name == name).map(|g| g.degree)
    }

    /// Sets `w_z^{x,y}`; the degrees must satisfy `|z| = |x| + |y|`.
    pub fn set(&mut self, z: &str, x: &str, y: &str, value: BigInt) -> Result<()> {
        let (dz, dx, dy) = match (self.degree(0, z), self.degree(1, x), self.degree(2, y)) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(Error::InvalidInput(format!("unknown generator in ({z}, {x}, {y})"))),
        };
        if dz != dx + dy {
            return Err(Error::InvalidInput(format!("degrees {dz} != {dx} + {dy} for ({z}, {x}, {y})")));
        }
        let value = self.ring.reduce(value);
        let key = (z.to_string(), x.to_string(), y.to_string());
        if value.is_zero() {
            self.table.remove(&key);
        } else {
            self.table.insert(key, value);
        }
        Ok(())
    }

    pub fn get(&self, z: &str, x: &str, y: &str) -> BigInt {
        self.table
            .get(&(z.to_string(), x.to_string(), y.to_string()))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// Nonzero entries `((z, x, y), w)` in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (&(String, String, String), &BigInt)> {
        self.table.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    fn check_complexes(&self, gamma: &GradedComplex, alpha: &GradedComplex, beta: &GradedComplex) -> Result<()> {
        for (slot, c) in [gamma, alpha, beta].into_iter().enumerate() {
            if flattened(c) != self.generators[slot] || c.ring() != self.ring {
                return Err(Error::ShapeMismatch(format!(
                    "complex in slot {slot} does not match the structure's generators"
                )));
            }
        }
        Ok(())
    }

    /// Chain-level product `a ⌣ b` in `C^{|a|+|b|}(γ)`.
    pub fn product(
        &self,
        gamma: &GradedComplex,
        alpha: &GradedComplex,
        beta: &GradedComplex,
        a: &Cochain,
        b: &Cochain,
    ) -> Result<Cochain> {
        self.check_complexes(gamma, alpha, beta)?;
        if a.len() != alpha.count(a.degree) || b.len() != beta.count(b.degree) {
            return Err(Error::ShapeMismatch("cochain length does not match its degree".into()));
        }
        let degree = a.degree + b.degree;
        let mut out = gamma.zero_cochain(degree);
        let z_index: HashMap<&str, usize> =
            gamma.generators(degree).iter().enumerate().map(|(i, g)| (g.name.as_str(), i)).collect();
        for (i, xa) in a.support() {
            let x = &alpha.generators(a.degree)[i].name;
            for (j, yb) in b.support() {
                let y = &beta.generators(b.degree)[j].name;
                for (z, &zi) in &z_index {
                    let w = self.get(z, x, y);
                    if !w.is_zero() {
                        out.coefficients[zi] += w * xa * yb;
                    }
                }
            }
        }
        for c in &mut out.coefficients {
            *c = self.ring.reduce(c.clone());
        }
        Ok(out)
    }

    /// Copy with `w_z^{x,y}` incremented by one (a parity flip over Z/2).
    pub fn with_bumped_entry(&self, z: &str, x: &str, y: &str) -> Result<CupStructure> {
        let mut out = self.clone();
        out.set(z, x, y, self.get(z, x, y) + BigInt::one())?;
        Ok(out)
    }
}

/// Isolation compatibility of `(γ, α, β)` on their common neighborhood.
pub fn isolation_compatible<T: Real>(
    gamma: &MorseDatum<T>,
    alpha: &MorseDatum<T>,
    beta: &MorseDatum<T>,
    cfg: &OracleConfig,
    tol: &Tolerances<T>,
) -> Result<IsolationVerdict> {
    for other in [alpha, beta] {
        if !gamma.same_neighborhood(other) {
            return Err(Error::MismatchedNeighborhoods(format!("{} and {}", gamma.label, other.label)));
        }
    }
    if gamma.same_flow(alpha, tol) || gamma.same_flow(beta, tol) {
        return Ok(IsolationVerdict::StructurallyTrue);
    }
    Ok(if oracle::z_set_sample_check(gamma, alpha, beta, cfg, tol)? {
        IsolationVerdict::SampledTrue
    } else {
        IsolationVerdict::Fail
    })
}

/// The pair of spectra whose general position governs the triple intersections.
fn check_genericity<T: Real>(
    gamma: &MorseDatum<T>,
    alpha: &MorseDatum<T>,
    beta: &MorseDatum<T>,
    tol: &Tolerances<T>,
) -> Result<()> {
    let same = |a: &MorseDatum<T>, b: &MorseDatum<T>| a.spectrum.same_matrix(&b.spectrum, tol);
    let pair = if same(gamma, alpha) {
        Some((alpha, beta))
    } else if same(gamma, beta) {
        Some((beta, alpha))
    } else {
        None
    };
    if let Some((a, b)) = pair {
        if same(a, b) || !general_position_check(&a.spectrum, &b.spectrum, tol)? {
            return Err(Error::Genericity(format!("spectra of {} and {}", a.label, b.label)));
        }
    }
    Ok(())
}

/// Full table `w_z^{x,y}(γ, α, β)`.
///
/// Over Z each point is signed by orienting `W^u(z) ∩ W^s(y) ∩ W^s(x)`
/// with the iterated short exact sequence convention.
pub fn chain_cup<T: Real>(
    gamma: &MorseDatum<T>,
    alpha: &MorseDatum<T>,
    beta: &MorseDatum<T>,
    ring: RingTag,
    cfg: &OracleConfig,
    tol: &Tolerances<T>,
) -> Result<CupStructure> {
    let isolation = isolation_compatible(gamma, alpha, beta, cfg, tol)?;
    if isolation == IsolationVerdict::Fail {
        return Err(Error::NotIsolationCompatible(format!(
            "{}, {}, {}",
            gamma.label, alpha.label, beta.label
        )));
    }
    if ring == RingTag::Z && gamma.space == Space::Projective {
        return Err(Error::UnsupportedRing(ring, "cup products on the projective space".into()));
    }
    check_genericity(gamma, alpha, beta, tol)?;
    let complexes = [
        gamma.build_complex(ring, tol)?,
        alpha.build_complex(ring, tol)?,
        beta.build_complex(ring, tol)?,
    ];
    let sources = CupSources { gamma: gamma.label.clone(), alpha: alpha.label.clone(), beta: beta.label.clone() };
    let mut w = CupStructure::zero(ring, sources, &complexes[0], &complexes[1], &complexes[2]);
    w.isolation = isolation;
    for z in gamma.critical_points() {
        let u = gamma.unstable_stratum(&z)?;
        for x in alpha.critical_points() {
            if x.morse_index > z.morse_index {
                continue;
            }
            let s1 = alpha.stable_stratum(&x)?;
            for y in beta.critical_points() {
                if x.morse_index + y.morse_index != z.morse_index {
                    continue;
                }
                let s2 = beta.stable_stratum(&y)?;
                let points = triple_intersection(&u, &s1, &s2, tol)?;
                // (−1)^{|x||y|} reorders the coorientations to (W^u ∩ W^s(y)) ∩ W^s(x);
                // with the other order the Leibniz rule fails over Z
                let swap = Sign::parity(x.morse_index * y.morse_index).as_i64();
                let value: i64 = points.iter().map(|p| p.sign.as_i64()).sum::<i64>() * swap;
                w.set(&z.name, &x.name, &y.name, BigInt::from(value))?;
            }
        }
    }
    Ok(w)
}

/// Checks `δ(η^x ⌣ η^y) − (δη^x) ⌣ η^y − (−1)^{|x|} η^x ⌣ δη^y = 0` for all pairs.
pub fn leibniz_check(
    w: &CupStructure,
    gamma: &GradedComplex,
    alpha: &GradedComplex,
    beta: &GradedComplex,
) -> Result<Option<LeibnizViolation>> {
    w.check_complexes(gamma, alpha, beta)?;
    for (p, xs) in (0..alpha.num_degrees()).map(|p| (p, alpha.generators(p))) {
        for (xi, x) in xs.iter().enumerate() {
            let mut ex = alpha.zero_cochain(p);
            ex.coefficients[xi] = BigInt::one();
            let dx = alpha.apply(&ex)?;
            for q in 0..beta.num_degrees() {
                for (yi, y) in beta.generators(q).iter().enumerate() {
                    let mut ey = beta.zero_cochain(q);
                    ey.coefficients[yi] = BigInt::one();
                    let dy = beta.apply(&ey)?;
                    let first = gamma.apply(&w.product(gamma, alpha, beta, &ex, &ey)?)?;
                    let second = w.product(gamma, alpha, beta, &dx, &ey)?;
                    let third = w.product(gamma, alpha, beta, &ex, &dy)?;
                    let sign = BigInt::from(Sign::parity(p).as_i64());
                    let residual = first
                        .add_scaled(&second, &-BigInt::one(), w.ring)
                        .add_scaled(&third, &-sign, w.ring);
                    let hit = residual.support().next().map(|(zi, r)| (zi, r.clone()));
                    if let Some((zi, r)) = hit {
                        return Ok(Some(LeibnizViolation {
                            z: gamma.generators(p + q + 1)[zi].name.clone(),
                            x: x.name.clone(),
                            y: y.name.clone(),
                            residual: r,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// `w_ab(z, x, y) = (−1)^{|x||y|} w_ba(z, y, x)` for every triple.
pub fn commutativity_check(w_ab: &CupStructure, w_ba: &CupStructure) -> Result<bool> {
    let (s, t) = (&w_ab.sources, &w_ba.sources);
    if s.gamma != t.gamma || s.alpha != t.beta || s.beta != t.alpha || w_ab.ring != w_ba.ring {
        return Err(Error::SourceMismatch(format!(
            "({}, {}, {}) against ({}, {}, {})",
            s.gamma, s.alpha, s.beta, t.gamma, t.alpha, t.beta
        )));
    }
    if w_ab.generators[0] != w_ba.generators[0]
        || w_ab.generators[1] != w_ba.generators[2]
        || w_ab.generators[2] != w_ba.generators[1]
    {
        return Err(Error::SourceMismatch("generator lists differ".into()));
    }
    let deg_x = degree_map(&w_ab.generators[1]);
    let deg_y = degree_map(&w_ab.generators[2]);
    let sign = |x: &str, y: &str| BigInt::from(Sign::parity(deg_x[x] * deg_y[y]).as_i64());
    let forward = w_ab.entries().all(|((z, x, y), v)| {
        *v == w_ab.ring.reduce(sign(x, y) * w_ba.get(z, y, x))
    });
    let backward = w_ba.entries().all(|((z, y, x), v)| {
        *v == w_ab.ring.reduce(sign(x, y) * w_ab.get(z, x, y))
    });
    Ok(forward && backward)
}

/// Product of cohomology classes represented by cocycles `a ∈ C(α)`, `b ∈ C(β)`.
pub fn cohomology_cup(
    w: &CupStructure,
    gamma: &GradedComplex,
    alpha: &GradedComplex,
    beta: &GradedComplex,
    a: &Cochain,
    b: &Cochain,
) -> Result<CupClass> {
    for (c, x) in [(alpha, a), (beta, b)] {
        if !c.apply(x)?.is_zero() {
            return Err(Error::NotACocycle { degree: x.degree });
        }
    }
    let cochain = w.product(gamma, alpha, beta, a, b)?;
    let nonzero = if cochain.degree < gamma.num_degrees() {
        gamma.is_coboundary(&cochain)?.is_none()
    } else {
        false
    };
    Ok(CupClass { cochain, nonzero })
}

/// An entry whose change must break the Leibniz rule: a triple `(z, x, y)`
/// of matching degrees with `δη^z ≠ 0`. `None` when every `δη^z` vanishes,
/// in which case no single-entry mutation is detectable.
pub fn leibniz_sensitive_entry(
    gamma: &GradedComplex,
    alpha: &GradedComplex,
    beta: &GradedComplex,
) -> Result<Option<(String, String, String)>> {
    for p in 0..alpha.num_degrees() {
        for q in 0..beta.num_degrees() {
            let (Some(x), Some(y)) = (alpha.generators(p).first(), beta.generators(q).first()) else {
                continue;
            };
            for z in gamma.generators(p + q) {
                let ez = gamma.dual_generator(&z.name).expect("generator of gamma");
                if !gamma.apply(&ez)?.is_zero() {
                    return Ok(Some((z.name.clone(), x.name.clone(), y.name.clone())));
                }
            }
        }
    }
    Ok(None)
}
