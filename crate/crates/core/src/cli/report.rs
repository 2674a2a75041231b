use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::coefficients::RingTag;
use crate::complex::GradedComplex;
use crate::cup::{CupStructure, IsolationVerdict};
use crate::cuplength::{BoundReport, CupLengthReport, RemarkCheck};
use crate::eigenflow::{MorseDatum, Space, Vertical};
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexReport {
    pub label: String,
    pub space: Space,
    pub n: usize,
    /// Row-major matrix the spectrum was computed from.
    pub matrix: Vec<Vec<f64>>,
    pub vertical: Option<Vertical<f64>>,
    /// Generator names per degree.
    pub generators: Vec<Vec<String>>,
    /// `differentials[k]` maps degree `k` to `k + 1`, rows indexed by degree `k + 1`.
    pub differentials: Vec<Vec<Vec<i64>>>,
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<i64>>,
    pub critical_points: usize,
}

fn small(x: &num_bigint::BigInt) -> i64 {
    i64::try_from(x).unwrap_or(i64::MAX)
}

impl ComplexReport {
    pub fn new(d: &MorseDatum<f64>, c: &GradedComplex) -> Result<Self> {
        let cohomology = c.cohomology()?;
        Ok(ComplexReport {
            label: d.label.clone(),
            space: d.space,
            n: d.n(),
            matrix: d.spectrum.matrix().to_rows(),
            vertical: d.vertical,
            generators: (0..c.num_degrees())
                .map(|k| c.generators(k).iter().map(|g| g.name.clone()).collect())
                .collect(),
            differentials: (0..c.num_degrees())
                .map(|k| c.differential(k).to_rows().iter().map(|r| r.iter().map(small).collect()).collect())
                .collect(),
            betti: cohomology.iter().map(|h| h.rank).collect(),
            torsion: cohomology.iter().map(|h| h.torsion.iter().map(small).collect()).collect(),
            critical_points: d.critical_points().len(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CupEntry {
    pub z: String,
    pub x: String,
    pub y: String,
    pub w: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CupTableReport {
    pub gamma: String,
    pub alpha: String,
    pub beta: String,
    pub ring: RingTag,
    pub isolation: IsolationVerdict,
    pub entries: Vec<CupEntry>,
}

impl CupTableReport {
    pub fn new(w: &CupStructure) -> Self {
        CupTableReport {
            gamma: w.sources.gamma.clone(),
            alpha: w.sources.alpha.clone(),
            beta: w.sources.beta.clone(),
            ring: w.ring,
            isolation: w.isolation,
            entries: w
                .entries()
                .map(|((z, x, y), v)| CupEntry { z: z.clone(), x: x.clone(), y: y.clone(), w: small(v) })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CupLengthSection {
    pub relative: Option<CupLengthReport>,
    pub absolute: Option<CupLengthReport>,
    pub bound: Option<BoundReport>,
    pub remark: Option<RemarkCheck>,
    /// `Y ≤ 1 + #{k > 0 : H^k(β) ≠ 0}`.
    pub sanity_bound: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub module: String,
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn push(&mut self, module: &str, name: impl Into<String>, passed: bool, counterexample: Option<serde_json::Value>) {
        self.checks.push(CheckResult { module: module.into(), name: name.into(), passed, counterexample });
        self.passed = self.checks.iter().all(|c| c.passed);
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub config: Option<RunConfig>,
    pub complexes: Vec<ComplexReport>,
    pub cup_tables: Vec<CupTableReport>,
    pub cup_length: Option<CupLengthSection>,
    pub verification: Option<VerificationReport>,
    /// Wall-clock milliseconds per stage; the only nondeterministic field.
    pub timings: BTreeMap<String, f64>,
}

impl Default for Report {
    fn default() -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: String::new(),
            config: None,
            complexes: Vec::new(),
            cup_tables: Vec::new(),
            cup_length: None,
            verification: None,
            timings: BTreeMap::new(),
        }
    }
}

fn table(out: &mut String, rows: &[Vec<String>]) {
    let Some(first) = rows.first() else { return };
    let widths: Vec<usize> =
        (0..first.len()).map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0)).collect();
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        let _ = writeln!(out, "  {}", cells.join("  ").trim_end());
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "morse-cup {} ({})", self.tool_version, self.command);
        for c in &self.complexes {
            let line = match &c.vertical {
                Some(v) => format!(", line factor σ = {}1, c = {}", v.sign.symbol(), v.center),
                None => String::new(),
            };
            let space = match c.space {
                Space::Sphere => "sphere",
                Space::Projective => "projective",
            };
            let _ = writeln!(out, "\ndatum {} ({space}, n = {}{line})", c.label, c.n);
            let mut rows = vec![vec!["degree".into(), "generators".into(), "rank".into(), "torsion".into()]];
            for (k, gens) in c.generators.iter().enumerate() {
                let torsion: Vec<String> = c.torsion[k].iter().map(|t| format!("Z/{t}")).collect();
                rows.push(vec![k.to_string(), gens.join(" "), c.betti[k].to_string(), torsion.join(" ")]);
            }
            table(&mut out, &rows);
        }
        for t in &self.cup_tables {
            let _ = writeln!(
                out,
                "\ncup products C({}) x C({}) -> C({}) over {} [{:?}]",
                t.alpha, t.beta, t.gamma, t.ring, t.isolation
            );
            let mut products: BTreeMap<(&str, &str), Vec<(i64, &str)>> = BTreeMap::new();
            for e in &t.entries {
                products.entry((&e.x, &e.y)).or_default().push((e.w, &e.z));
            }
            if products.is_empty() {
                let _ = writeln!(out, "  all products vanish");
            }
            let rows: Vec<Vec<String>> = products
                .iter()
                .map(|((x, y), terms)| {
                    let sum: Vec<String> = terms
                        .iter()
                        .map(|(w, z)| if *w == 1 { format!("η^{{{z}}}") } else { format!("{w}·η^{{{z}}}") })
                        .collect();
                    vec![format!("η^{{{x}}}"), "⌣".into(), format!("η^{{{y}}}"), "=".into(), sum.join(" + ")]
                })
                .collect();
            table(&mut out, &rows);
        }
        if let Some(s) = &self.cup_length {
            for r in [&s.relative, &s.absolute].into_iter().flatten() {
                let chain: Vec<String> = r.witness.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(
                    out,
                    "\n{:?} cup-length of {} against {}: {}",
                    r.kind, r.datum, r.partner, r.value
                );
                let _ = writeln!(out, "  witness: {}", chain.join(" ⌣ "));
                let _ = writeln!(out, "  positive-degree products vanish: {}", r.positive_products_vanish);
                for note in &r.notes {
                    let _ = writeln!(out, "  note: {note}");
                }
            }
            if let Some(b) = &s.bound {
                let _ = writeln!(
                    out,
                    "\ncritical points {} >= cup-length {}: {}{}",
                    b.critical_points,
                    b.cup_length,
                    b.satisfied,
                    if b.equality { " (equality)" } else { "" }
                );
            }
            if let Some(r) = &s.remark {
                let _ = writeln!(out, "absolute {} <= relative {}: {}", r.absolute, r.relative, r.holds);
            }
        }
        if let Some(v) = &self.verification {
            let _ = writeln!(out, "\nverification: {}", if v.passed { "PASS" } else { "FAIL" });
            for c in &v.checks {
                let _ = writeln!(out, "  {} {}::{}", if c.passed { "ok  " } else { "FAIL" }, c.module, c.name);
                if let Some(x) = &c.counterexample {
                    let _ = writeln!(out, "       {x}");
                }
            }
        }
        out
    }
}
