//! Relative and absolute cup-length and the critical-point bound.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coefficients::RingTag;
use crate::complex::{Cochain, GradedComplex};
use crate::cup::{chain_cup, cohomology_cup, CupStructure, IsolationVerdict};
use crate::eigenflow::MorseDatum;
use crate::error::{Error, Result};
use crate::oracle::OracleConfig;
use crate::scalar::{Real, Tolerances};

/// A cochain written out by generator name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub degree: usize,
    /// Nonzero `(generator, coefficient)` pairs in complex order.
    pub terms: Vec<(String, i64)>,
}

impl ClassSummary {
    pub fn of(complex: &GradedComplex, c: &Cochain) -> Self {
        let gens = complex.generators(c.degree);
        let terms = c
            .support()
            .map(|(i, v)| (gens[i].name.clone(), i64::try_from(v).unwrap_or(i64::MAX)))
            .collect();
        ClassSummary { degree: c.degree, terms }
    }
}

impl fmt::Display for ClassSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (name, c)) in self.terms.iter().enumerate() {
            let sep = match (i, *c < 0) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            match c.abs() {
                1 => write!(f, "{sep}η^{{{name}}}")?,
                a => write!(f, "{sep}{a}·η^{{{name}}}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CupLengthKind {
    /// Partner is an attracting-type datum.
    Relative,
    /// Partner is an arbitrary datum `γ`.
    Absolute,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CupLengthReport {
    pub kind: CupLengthKind,
    pub value: usize,
    pub datum: String,
    pub partner: String,
    /// `η` followed by `μ_1, …, μ_{Y−1}`.
    pub witness: Vec<ClassSummary>,
    /// The iterated product of the witness chain.
    pub product: Option<ClassSummary>,
    /// Every product of two positive-degree classes vanishes.
    pub positive_products_vanish: bool,
    pub isolation: IsolationVerdict,
    pub notes: Vec<String>,
}

/// Output of the search on explicit complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CupLengthSearch {
    pub value: usize,
    pub witness: Vec<Cochain>,
    pub product: Option<Cochain>,
    pub positive_products_vanish: bool,
}

fn basis(c: &GradedComplex) -> Result<Vec<Cochain>> {
    let mut out = Vec::new();
    for k in 0..c.num_degrees() {
        out.extend(c.cohomology_basis(k)?);
    }
    Ok(out)
}

/// Breadth-first search for the longest nonzero product
/// `(…(η ⌣ μ_1) ⌣ …) ⌣ μ_{Y−1}` with `η ∈ H(target)` and positive-degree
/// basis classes `μ_i ∈ H(partner)`, where `w` has slots (target, target, partner).
pub fn cup_length_search(w: &CupStructure, target: &GradedComplex, partner: &GradedComplex) -> Result<CupLengthSearch> {
    let classes = basis(target)?;
    let factors: Vec<Cochain> = basis(partner)?.into_iter().filter(|m| m.degree > 0).collect();

    let mut vanish = true;
    for a in classes.iter().filter(|a| a.degree > 0) {
        for m in &factors {
            if cohomology_cup(w, target, target, partner, a, m)?.nonzero {
                vanish = false;
            }
        }
    }

    // (class, index of η, factor indices)
    let mut level: Vec<(Cochain, usize, Vec<usize>)> =
        classes.iter().enumerate().map(|(i, c)| (c.clone(), i, Vec::new())).collect();
    let mut best = match level.first() {
        None => {
            return Ok(CupLengthSearch { value: 0, witness: Vec::new(), product: None, positive_products_vanish: vanish })
        }
        Some(first) => first.clone(),
    };
    let mut depth = 1;
    loop {
        let mut next: Vec<(Cochain, usize, Vec<usize>)> = Vec::new();
        for (class, root, chain) in &level {
            for (j, m) in factors.iter().enumerate() {
                let prod = cohomology_cup(w, target, target, partner, class, m)?;
                if !prod.nonzero {
                    continue;
                }
                let mut known = false;
                for (other, _, _) in &next {
                    if other.degree == prod.cochain.degree && target.same_class(other, &prod.cochain)? {
                        known = true;
                        break;
                    }
                }
                if !known {
                    let mut chain = chain.clone();
                    chain.push(j);
                    next.push((prod.cochain, *root, chain));
                }
            }
        }
        match next.first() {
            None => break,
            Some(first) => best = first.clone(),
        }
        depth += 1;
        level = next;
    }
    let (product, root, chain) = best;
    let mut witness = vec![classes[root].clone()];
    witness.extend(chain.iter().map(|&j| factors[j].clone()));
    Ok(CupLengthSearch { value: depth, witness, product: Some(product), positive_products_vanish: vanish })
}

fn report<T: Real>(
    kind: CupLengthKind,
    alpha: &MorseDatum<T>,
    partner: &MorseDatum<T>,
    ring: RingTag,
    cfg: &OracleConfig,
    tol: &Tolerances<T>,
) -> Result<CupLengthReport> {
    let w = chain_cup(alpha, alpha, partner, ring, cfg, tol)?;
    let ca = alpha.build_complex(ring, tol)?;
    let cp = partner.build_complex(ring, tol)?;
    let search = cup_length_search(&w, &ca, &cp)?;
    let mut witness: Vec<ClassSummary> = Vec::new();
    if let Some((eta, mus)) = search.witness.split_first() {
        witness.push(ClassSummary::of(&ca, eta));
        witness.extend(mus.iter().map(|m| ClassSummary::of(&cp, m)));
    }
    let mut notes = Vec::new();
    if w.isolation == IsolationVerdict::SampledTrue {
        notes.push("isolation compatibility sampled, not proven".to_string());
    }
    if kind == CupLengthKind::Absolute && search.positive_products_vanish && search.value > 0 {
        notes.push(format!(
            "all positive-degree products vanish: cup-length {} by the maximal-chain count, zero by the vanishing reading",
            search.value
        ));
    }
    Ok(CupLengthReport {
        kind,
        value: search.value,
        datum: alpha.label.clone(),
        partner: partner.label.clone(),
        witness,
        product: search.product.as_ref().map(|p| ClassSummary::of(&ca, p)),
        positive_products_vanish: search.positive_products_vanish,
        isolation: w.isolation,
        notes,
    })
}

/// Relative cup-length `Y(α)` against an attracting-type datum `β`.
pub fn relative_cup_length<T: Real>(
    alpha: &MorseDatum<T>,
    beta: &MorseDatum<T>,
    ring: RingTag,
    cfg: &OracleConfig,
    tol: &Tolerances<T>,
) -> Result<CupLengthReport> {
    if !beta.is_attracting_type() {
        return Err(Error::InvalidInput(format!("datum {} is not of attracting type", beta.label)));
    }
    report(CupLengthKind::Relative, alpha, beta, ring, cfg, tol)
}

/// Absolute cup-length `Y′(α)` against an arbitrary datum `γ`.
pub fn absolute_cup_length<T: Real>(
    alpha: &MorseDatum<T>,
    gamma: &MorseDatum<T>,
    ring: RingTag,
    cfg: &OracleConfig,
    tol: &Tolerances<T>,
) -> Result<CupLengthReport> {
    report(CupLengthKind::Absolute, alpha, gamma, ring, cfg, tol)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub cup_length: usize,
    pub critical_points: usize,
    pub satisfied: bool,
    pub equality: bool,
}

/// Compares the number of critical points of `α` with `Y(α)`.
pub fn critical_point_bound<T: Real>(
    alpha: &MorseDatum<T>,
    beta: &MorseDatum<T>,
    ring: RingTag,
    cfg: &OracleConfig,
    tol: &Tolerances<T>,
) -> Result<BoundReport> {
    let y = relative_cup_length(alpha, beta, ring, cfg, tol)?.value;
    Ok(bound_from(y, alpha.critical_points().len()))
}

pub fn bound_from(cup_length: usize, critical_points: usize) -> BoundReport {
    BoundReport {
        cup_length,
        critical_points,
        satisfied: critical_points >= cup_length,
        equality: critical_points == cup_length,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemarkCheck {
    pub relative: usize,
    pub absolute: usize,
    pub holds: bool,
}

/// `Y′(α, γ) ≤ Y(α, β)`.
pub fn remark_inequality_check<T: Real>(
    alpha: &MorseDatum<T>,
    beta: &MorseDatum<T>,
    gamma: &MorseDatum<T>,
    ring: RingTag,
    cfg: &OracleConfig,
    tol: &Tolerances<T>,
) -> Result<RemarkCheck> {
    let relative = relative_cup_length(alpha, beta, ring, cfg, tol)?.value;
    let absolute = absolute_cup_length(alpha, gamma, ring, cfg, tol)?.value;
    Ok(RemarkCheck { relative, absolute, holds: absolute <= relative })
}

/// `Y ≤ 1 + #{k > 0 : H^k(partner) ≠ 0}`.
pub fn sanity_bound(value: usize, partner: &GradedComplex) -> Result<bool> {
    let betti = partner.betti()?;
    let torsion = partner.cohomology()?;
    let degrees = (1..partner.num_degrees())
        .filter(|&k| betti[k] > 0 || !torsion[k].torsion.is_empty())
        .count();
    Ok(value <= 1 + degrees)
}

/// Re-multiplies a witness chain from scratch.
pub fn replay_witness(
    w: &CupStructure,
    target: &GradedComplex,
    partner: &GradedComplex,
    witness: &[Cochain],
) -> Result<Option<Cochain>> {
    let Some((first, rest)) = witness.split_first() else {
        return Ok(None);
    };
    let mut acc = first.clone();
    for m in rest {
        acc = cohomology_cup(w, target, target, partner, &acc, m)?.cochain;
    }
    Ok(Some(acc))
}

/// True when `x` represents the zero class.
pub fn is_zero_class(c: &GradedComplex, x: &Cochain) -> Result<bool> {
    Ok(x.is_zero() || c.is_coboundary(x)?.is_some())
}
