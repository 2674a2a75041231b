//! Command-line front end: `complex`, `cuplength` and `verify`.

mod config;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub use config::{datum_seed, resolve_seed, DatumSpec, RunConfig, ToleranceOverrides, VerifySettings, SEED_ENV};
pub use report::{
    CheckResult, ComplexReport, CupEntry, CupLengthSection, CupTableReport, Report, VerificationReport,
    SCHEMA_VERSION,
};

use crate::coefficients::RingTag;
use crate::complex::{GradedComplex, Validation};
use crate::cup::{chain_cup, commutativity_check, leibniz_check, leibniz_sensitive_entry, CupStructure};
use crate::cuplength::{absolute_cup_length, bound_from, relative_cup_length, sanity_bound, RemarkCheck};
use crate::eigenflow::{random_generic_pair, MorseDatum, Space};
use crate::error::{Error, Result};
use crate::intersections::{random_transverse_triple, swap_rule_holds};
use crate::oracle::{oracle_agreement, MAX_ORACLE_DIM};
use crate::scalar::Tolerances;

#[derive(Parser, Debug)]
#[command(name = "morse-cup", version, about = "Local Morse cohomology and cup-lengths of quadratic flows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run seed (overrides MORSE_SEED and the config).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Coefficient ring (overrides the config).
    #[arg(long, global = true)]
    pub ring: Option<RingTag>,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    pub json_out: Option<PathBuf>,
    /// Format of the report printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Morse complexes and cohomology of every datum.
    Complex,
    /// Relative and absolute cup-length with the critical-point bound.
    Cuplength,
    /// Algebraic identities, oracle agreement and orientation checks.
    Verify {
        /// Bump one cup-table entry before the Leibniz check.
        #[arg(long)]
        mutate_cup_entry: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INVARIANT: i32 = 1;
    pub const INVALID_INPUT: i32 = 2;
    pub const GENERICITY: i32 = 3;
    pub const IO: i32 = 4;
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => exit::IO,
        Error::Genericity(_)
        | Error::DegenerateSpectrum { .. }
        | Error::Transversality(_)
        | Error::ResamplingBudget(_)
        | Error::DegenerateDeterminant => exit::GENERICITY,
        Error::InvalidInput(_)
        | Error::NonSymmetric(_)
        | Error::UnsupportedRing(..)
        | Error::MismatchedNeighborhoods(_)
        | Error::NotIsolationCompatible(_)
        | Error::DimensionMismatch(_)
        | Error::ShapeMismatch(_) => exit::INVALID_INPUT,
        _ => exit::INVARIANT,
    }
}

struct Run {
    config: RunConfig,
    seed: u64,
    tol: Tolerances<f64>,
    report: Report,
}

impl Run {
    fn new(cli: &Cli, env_seed: Option<&str>) -> Result<Self> {
        let path = cli.config.as_ref().ok_or_else(|| Error::InvalidInput("--config is required".into()))?;
        let mut config = RunConfig::load(path)?;
        if let Some(ring) = cli.ring {
            config.ring = ring;
        }
        config.validate()?;
        let seed = resolve_seed(cli.seed, env_seed, config.seed)?;
        config.seed = Some(seed);
        let tol = config.tolerances.apply()?;
        let report = Report { config: Some(config.clone()), ..Report::default() };
        Ok(Run { config, seed, tol, report })
    }

    fn datum(&self, label: &str) -> Result<MorseDatum<f64>> {
        self.config.datum(label, self.seed, &self.tol)
    }

    fn labelled(&self, which: &Option<String>, what: &str) -> Result<MorseDatum<f64>> {
        self.datum(self.config.required_label(which, what)?)
    }

    fn timed<R>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> Result<R>) -> Result<R> {
        let start = Instant::now();
        let out = f(self);
        self.report.timings.insert(stage.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }
}

fn cmd_complex(run: &mut Run) -> Result<i32> {
    let mut code = exit::OK;
    for spec in run.config.data.clone() {
        let d = run.datum(&spec.label)?;
        let c = d.build_complex(run.config.ring, &run.tol)?;
        if !c.validate_differential()?.is_ok() {
            code = exit::INVARIANT;
        }
        run.report.complexes.push(ComplexReport::new(&d, &c)?);
    }
    Ok(code)
}

fn cmd_cuplength(run: &mut Run) -> Result<i32> {
    let alpha = run.labelled(&run.config.alpha_label.clone(), "alpha_label")?;
    let beta = run.labelled(&run.config.attracting_label.clone(), "attracting_label")?;
    let gamma = match run.config.gamma_label.clone() {
        Some(l) => Some(run.datum(&l)?),
        None => None,
    };
    let (ring, tol, cfg) = (run.config.ring, run.tol, run.config.oracle.clone());
    let mut seen = Vec::new();
    for d in [Some(&alpha), Some(&beta), gamma.as_ref()].into_iter().flatten() {
        if !seen.contains(&d.label) {
            seen.push(d.label.clone());
            let c = d.build_complex(ring, &tol)?;
            run.report.complexes.push(ComplexReport::new(d, &c)?);
        }
    }

    let mut section = CupLengthSection::default();
    let mut ok = true;
    let rel = run.timed("relative", |_| relative_cup_length(&alpha, &beta, ring, &cfg, &tol))?;
    let w = chain_cup(&alpha, &alpha, &beta, ring, &cfg, &tol)?;
    run.report.cup_tables.push(CupTableReport::new(&w));
    let ca = alpha.build_complex(ring, &tol)?;
    let cb = beta.build_complex(ring, &tol)?;
    ok &= leibniz_check(&w, &ca, &ca, &cb)?.is_none();
    let sane = sanity_bound(rel.value, &cb)?;
    ok &= sane;
    section.sanity_bound = Some(sane);
    let bound = bound_from(rel.value, alpha.critical_points().len());
    ok &= bound.satisfied;
    section.bound = Some(bound);
    if let Some(g) = &gamma {
        let abs = run.timed("absolute", |_| absolute_cup_length(&alpha, g, ring, &cfg, &tol))?;
        let wg = chain_cup(&alpha, &alpha, g, ring, &cfg, &tol)?;
        run.report.cup_tables.push(CupTableReport::new(&wg));
        let remark = RemarkCheck { relative: rel.value, absolute: abs.value, holds: abs.value <= rel.value };
        ok &= remark.holds;
        section.remark = Some(remark);
        section.absolute = Some(abs);
    }
    section.relative = Some(rel);
    run.report.cup_length = Some(section);
    Ok(if ok { exit::OK } else { exit::INVARIANT })
}

fn violation_json(v: &crate::cup::LeibnizViolation) -> serde_json::Value {
    json!({"z": v.z, "x": v.x, "y": v.y, "residual": v.residual.to_string()})
}

/// Leibniz for `w` and its swapped table, plus graded commutativity.
fn identity_checks(
    out: &mut VerificationReport,
    tag: &str,
    gamma: &MorseDatum<f64>,
    other: &MorseDatum<f64>,
    ring: RingTag,
    run: &Run,
) -> Result<()> {
    let (cfg, tol) = (&run.config.oracle, &run.tol);
    let w_ab = chain_cup(gamma, gamma, other, ring, cfg, tol)?;
    let w_ba = chain_cup(gamma, other, gamma, ring, cfg, tol)?;
    let cg = gamma.build_complex(ring, tol)?;
    let co = other.build_complex(ring, tol)?;
    let l1 = leibniz_check(&w_ab, &cg, &cg, &co)?;
    let l2 = leibniz_check(&w_ba, &cg, &co, &cg)?;
    out.push("cup", format!("leibniz {tag}"), l1.is_none(), l1.as_ref().map(violation_json));
    out.push("cup", format!("leibniz swapped {tag}"), l2.is_none(), l2.as_ref().map(violation_json));
    out.push("cup", format!("commutativity {tag}"), commutativity_check(&w_ab, &w_ba)?, None);
    Ok(())
}

fn complex_check(out: &mut VerificationReport, tag: &str, c: &GradedComplex) -> Result<()> {
    match c.validate_differential()? {
        Validation::Ok => out.push("complex", format!("d^2 = 0 {tag}"), true, None),
        Validation::Violation { degree, .. } => {
            out.push("complex", format!("d^2 = 0 {tag}"), false, Some(json!({"degree": degree})))
        }
    }
    Ok(())
}

fn oracle_check(out: &mut VerificationReport, tag: &str, g: &MorseDatum<f64>, o: &MorseDatum<f64>, run: &Run) -> Result<()> {
    if g.n() > MAX_ORACLE_DIM {
        return Ok(());
    }
    let counts = oracle_agreement(g, g, o, &run.config.oracle, &run.tol)?;
    let payload = (!counts.passed()).then(|| json!(counts.discrepancies));
    out.push("oracle", format!("agreement {tag}"), counts.passed(), payload);
    Ok(())
}

/// Cup table, target and partner complexes, and the entry to bump.
type MutationTarget = (CupStructure, [GradedComplex; 2], (String, String, String));

/// Bumps a Leibniz-sensitive entry; falls back to a sphere pair when the
/// configured data have vanishing differentials.
fn mutation_check(out: &mut VerificationReport, alpha: &MorseDatum<f64>, beta: &MorseDatum<f64>, run: &Run) -> Result<()> {
    let (cfg, tol, ring) = (&run.config.oracle, &run.tol, run.config.ring);
    let attempt = |a: &MorseDatum<f64>, b: &MorseDatum<f64>, ring: RingTag| -> Result<Option<MutationTarget>> {
        let w = chain_cup(a, a, b, ring, cfg, tol)?;
        let ca = a.build_complex(ring, tol)?;
        let cb = b.build_complex(ring, tol)?;
        Ok(leibniz_sensitive_entry(&ca, &ca, &cb)?.map(|e| (w, [ca, cb], e)))
    };
    let found = match attempt(alpha, beta, ring)? {
        Some(f) => Some((f, "configured data".to_string())),
        None => {
            let (sa, sb) = random_generic_pair(run.config.n, run.seed, tol)?;
            let a = MorseDatum::sphere(sa, "alpha")?;
            let b = MorseDatum::sphere(sb, "beta")?;
            attempt(&a, &b, ring)?.map(|f| (f, "sphere pair (configured differentials vanish)".to_string()))
        }
    };
    let Some(((w, [ca, cb], (z, x, y)), source)) = found else {
        out.push("cup", "leibniz after mutation", true, Some(json!({"note": "no sensitive entry"})));
        return Ok(());
    };
    let bad = w.with_bumped_entry(&z, &x, &y)?;
    let v = leibniz_check(&bad, &ca, &ca, &cb)?;
    let payload = json!({
        "mutated_entry": {"z": z, "x": x, "y": y},
        "source": source,
        "violation": v.as_ref().map(violation_json),
    });
    out.push("cup", "leibniz after mutation", v.is_none(), Some(payload));
    Ok(())
}

fn cmd_verify(run: &mut Run, mutate: bool) -> Result<i32> {
    let mut out = VerificationReport { passed: true, checks: Vec::new() };
    let ring = run.config.ring;
    let tol = run.tol;

    for spec in run.config.data.clone() {
        let d = run.datum(&spec.label)?;
        complex_check(&mut out, &spec.label, &d.build_complex(ring, &tol)?)?;
    }
    let alpha = run.labelled(&run.config.alpha_label.clone(), "alpha_label")?;
    let beta = run.labelled(&run.config.attracting_label.clone(), "attracting_label")?;
    let gamma = match run.config.gamma_label.clone() {
        Some(l) => Some(run.datum(&l)?),
        None => None,
    };
    identity_checks(&mut out, &format!("({0}, {0}, {1})", alpha.label, beta.label), &alpha, &beta, ring, run)?;
    if let Some(g) = &gamma {
        identity_checks(&mut out, &format!("({0}, {0}, {1})", alpha.label, g.label), &alpha, g, ring, run)?;
    }
    run.timed("oracle", |run| {
        oracle_check(&mut out, &format!("({0}, {0}, {1})", alpha.label, beta.label), &alpha, &beta, run)?;
        if let Some(g) = &gamma {
            oracle_check(&mut out, &format!("({0}, {0}, {1})", alpha.label, g.label), &alpha, g, run)?;
        }
        Ok(())
    })?;
    if let Some(g) = &gamma {
        let cfg = run.config.oracle.clone();
        let rel = relative_cup_length(&alpha, &beta, ring, &cfg, &tol)?.value;
        let abs = absolute_cup_length(&alpha, g, ring, &cfg, &tol)?.value;
        let payload = (abs > rel).then(|| json!({"relative": rel, "absolute": abs}));
        out.push("cuplength", "absolute <= relative", abs <= rel, payload);
    }

    run.timed("sweep", |run| {
        let settings = run.config.verify.clone();
        for n in 1..=settings.max_n {
            for s in 0..settings.seeds {
                let (fa, fb) = random_generic_pair(n, datum_seed(run.seed, s), &tol)?;
                for space in [Space::Sphere, Space::Projective] {
                    if space == Space::Projective && ring == RingTag::Z {
                        continue;
                    }
                    let a = MorseDatum::new(space, fa.clone(), None, "alpha")?;
                    let b = MorseDatum::new(space, fb.clone(), None, "beta")?;
                    let tag = format!("{space:?} n={n} seed={s}").to_lowercase();
                    complex_check(&mut out, &tag, &a.build_complex(ring, &tol)?)?;
                    identity_checks(&mut out, &tag, &a, &b, ring, run)?;
                    oracle_check(&mut out, &tag, &a, &b, run)?;
                }
            }
        }
        Ok(())
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let mut swap_failures = Vec::new();
    for trial in 0..run.config.verify.swap_trials {
        let m = 1 + trial % 6;
        let (x, y1, y2) = random_transverse_triple(m, &mut rng, &tol)?;
        if !swap_rule_holds(&x, &y1, &y2, &tol)? {
            swap_failures.push(json!({"trial": trial, "dim": m}));
        }
    }
    let payload = (!swap_failures.is_empty()).then(|| json!(swap_failures));
    out.push("intersections", "swap rule", swap_failures.is_empty(), payload);

    if mutate {
        mutation_check(&mut out, &alpha, &beta, run)?;
    }
    let code = if out.passed { exit::OK } else { exit::INVARIANT };
    run.report.verification = Some(out);
    Ok(code)
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Runs the parsed command, printing the report; returns the exit code.
pub fn run(cli: &Cli, env_seed: Option<&str>) -> i32 {
    let mut run = match Run::new(cli, env_seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let (name, outcome) = match cli.command {
        Command::Complex => ("complex", run.timed("total", cmd_complex)),
        Command::Cuplength => ("cuplength", run.timed("total", cmd_cuplength)),
        Command::Verify { mutate_cup_entry } => ("verify", run.timed("total", |r| cmd_verify(r, mutate_cup_entry))),
    };
    run.report.command = name.to_string();
    let code = match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let json = run.report.to_json();
    let target = cli.json_out.clone().or_else(|| run.config.output.clone());
    if let Some(path) = target {
        if let Err(e) = write_file(&path, &json) {
            eprintln!("error: {e}");
            return exit::IO;
        }
    }
    match cli.format {
        Format::Json => println!("{json}"),
        Format::Text => print!("{}", run.report.to_text()),
    }
    if code == exit::INVARIANT {
        if let Some(v) = &run.report.verification {
            for f in v.failures() {
                eprintln!("check failed: {}::{}", f.module, f.name);
            }
        }
    }
    code
}
