//! Acceptance suite: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use morse_cup::cup::{chain_cup, commutativity_check, leibniz_check, leibniz_sensitive_entry, IsolationVerdict};
use morse_cup::cuplength::{absolute_cup_length, critical_point_bound, relative_cup_length};
use morse_cup::eigenflow::{random_generic_pair, seeded_spectrum};
use morse_cup::intersections::{general_position_check, random_transverse_triple, swap_rule_holds};
use morse_cup::oracle::oracle_agreement;
use morse_cup::{Datum, OracleConfig, RingTag, Sign, Space, Spectrum, Tolerances, Vertical};
use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn tol() -> Tolerances {
    Tolerances::standard()
}

fn cfg() -> OracleConfig {
    OracleConfig::default()
}

fn fail(msg: impl Into<String>) -> Outcome {
    Err(msg.into())
}

fn e2s(e: morse_cup::Error) -> String {
    e.to_string()
}

fn closed(space: Space, n: usize, seed: u64) -> Result<(Datum, Datum), String> {
    let (a, b) = random_generic_pair(n, seed, &tol()).map_err(e2s)?;
    Ok((
        Datum::new(space, a, None, "alpha").map_err(e2s)?,
        Datum::new(space, b, None, "beta").map_err(e2s)?,
    ))
}

fn line(sign: Sign, center: f64) -> Option<Vertical> {
    Some(Vertical { sign, center })
}

/// A spectrum in general position with `a`, drawn from `seed` onwards.
fn generic_partner(a: &Spectrum, seed: u64) -> Result<Spectrum, String> {
    for s in seed..seed + 1000 {
        let b = seeded_spectrum(a.n(), s, &tol()).map_err(e2s)?;
        if general_position_check(a, &b, &tol()).map_err(e2s)? {
            return Ok(b);
        }
    }
    Err(format!("no generic partner near seed {seed}"))
}

/// `RP^n × [−1, 1]` with `(−, 0 | +, ½ | −, ½)`.
fn product_family(n: usize, seed: u64) -> Result<[Datum; 3], String> {
    let (fa, fb) = random_generic_pair(n, seed, &tol()).map_err(e2s)?;
    Ok([
        Datum::new(Space::Projective, fa, line(Sign::Minus, 0.0), "alpha").map_err(e2s)?,
        Datum::new(Space::Projective, fb.clone(), line(Sign::Plus, 0.5), "beta").map_err(e2s)?,
        Datum::new(Space::Projective, fb, line(Sign::Minus, 0.5), "gamma").map_err(e2s)?,
    ])
}

fn betti(d: &Datum, ring: RingTag) -> Result<Vec<usize>, String> {
    d.build_complex(ring, &tol()).and_then(|c| c.betti()).map_err(e2s)
}

fn sphere_ranks(n: usize) -> Vec<usize> {
    (0..=n).map(|k| usize::from(k == 0 || k == n)).collect()
}

fn c1_projective_cohomology() -> Outcome {
    let mut slowest = Duration::ZERO;
    for n in 2..=5 {
        for seed in 0..5 {
            let start = Instant::now();
            let (a, _) = closed(Space::Projective, n, seed)?;
            let b = betti(&a, RingTag::Z2)?;
            slowest = slowest.max(start.elapsed());
            if b != vec![1; n + 1] {
                return fail(format!("n={n} seed={seed}: ranks {b:?}"));
            }
        }
    }
    if slowest >= Duration::from_secs(1) {
        return fail(format!("slowest instance {slowest:?}"));
    }
    Ok(format!("20 instances, slowest {slowest:?}"))
}

fn c2_sphere_cohomology() -> Outcome {
    for n in 1..=5 {
        let (a, _) = closed(Space::Sphere, n, n as u64)?;
        let b = betti(&a, RingTag::Z2)?;
        if b != sphere_ranks(n) {
            return fail(format!("n={n}: ranks {b:?}"));
        }
    }
    Ok("n = 1..5".into())
}

fn c3_projective_cup_table() -> Outcome {
    for n in 2..=4 {
        for seed in 0..3 {
            let (a, b) = closed(Space::Projective, n, seed)?;
            let w = chain_cup(&a, &a, &b, RingTag::Z2, &cfg(), &tol()).map_err(e2s)?;
            let mut expected = 0;
            for k in 0..=n {
                for l in 0..=n - k {
                    let (z, x, y) = (format!("[p{}]", k + l), format!("[p{k}]"), format!("[p{l}]"));
                    if w.get(&z, &x, &y) != BigInt::one() {
                        return fail(format!("n={n} seed={seed}: w({z}, {x}, {y}) = 0"));
                    }
                    expected += 1;
                }
            }
            if w.entries().count() != expected {
                return fail(format!("n={n} seed={seed}: {} nonzero entries, expected {expected}", w.entries().count()));
            }
            let abs = absolute_cup_length(&a, &b, RingTag::Z2, &cfg(), &tol()).map_err(e2s)?;
            if abs.value != n + 1 {
                return fail(format!("n={n} seed={seed}: absolute cup-length {}", abs.value));
            }
        }
    }
    Ok("n = 2..4, 3 pairs each".into())
}

fn c4_product_example() -> Outcome {
    for n in 2..=4 {
        let [a, b, g] = product_family(n, n as u64)?;
        let rel = relative_cup_length(&a, &b, RingTag::Z2, &cfg(), &tol()).map_err(e2s)?;
        if rel.value != n + 1 {
            return fail(format!("n={n}: Y = {}", rel.value));
        }
        let wg = chain_cup(&a, &a, &g, RingTag::Z2, &cfg(), &tol()).map_err(e2s)?;
        if !wg.is_zero() {
            return fail(format!("n={n}: gamma table has {} nonzero entries", wg.entries().count()));
        }
        let abs = absolute_cup_length(&a, &g, RingTag::Z2, &cfg(), &tol()).map_err(e2s)?;
        if !abs.positive_products_vanish {
            return fail(format!("n={n}: vanishing flag not set"));
        }
    }
    Ok("Y = n+1 and gamma table zero for n = 2..4".into())
}

fn c5_bound() -> Outcome {
    for n in 2..=4 {
        let [a, b, _] = product_family(n, n as u64)?;
        let r = critical_point_bound(&a, &b, RingTag::Z2, &cfg(), &tol()).map_err(e2s)?;
        if !(r.satisfied && r.equality && r.critical_points == n + 1) {
            return fail(format!("n={n}: {r:?}"));
        }
    }
    Ok("#crit = n+1 = Y for n = 2..4".into())
}

fn identities(a: &Datum, b: &Datum, ring: RingTag, tag: &str) -> Result<(), String> {
    let (ca, cb) = (a.build_complex(ring, &tol()).map_err(e2s)?, b.build_complex(ring, &tol()).map_err(e2s)?);
    for c in [&ca, &cb] {
        if !c.validate_differential().map_err(e2s)?.is_ok() {
            return Err(format!("{tag}: d^2 != 0"));
        }
    }
    let w_ab = chain_cup(a, a, b, ring, &cfg(), &tol()).map_err(e2s)?;
    let w_ba = chain_cup(a, b, a, ring, &cfg(), &tol()).map_err(e2s)?;
    if let Some(v) = leibniz_check(&w_ab, &ca, &ca, &cb).map_err(e2s)? {
        return Err(format!("{tag}: leibniz {v:?}"));
    }
    if let Some(v) = leibniz_check(&w_ba, &ca, &cb, &ca).map_err(e2s)? {
        return Err(format!("{tag}: swapped leibniz {v:?}"));
    }
    if !commutativity_check(&w_ab, &w_ba).map_err(e2s)? {
        return Err(format!("{tag}: commutativity"));
    }
    Ok(())
}

fn c6_identities() -> Outcome {
    let start = Instant::now();
    let mut structures = 0;
    let mut mutations = 0;
    for n in 1..=4 {
        for seed in 0..20 {
            for (space, ring) in [(Space::Sphere, RingTag::Z2), (Space::Sphere, RingTag::Z), (Space::Projective, RingTag::Z2)] {
                let (a, b) = closed(space, n, seed)?;
                identities(&a, &b, ring, &format!("{space:?} {ring} n={n} seed={seed}"))?;
                structures += 1;
                let ca = a.build_complex(ring, &tol()).map_err(e2s)?;
                let cb = b.build_complex(ring, &tol()).map_err(e2s)?;
                if let Some((z, x, y)) = leibniz_sensitive_entry(&ca, &ca, &cb).map_err(e2s)? {
                    let w = chain_cup(&a, &a, &b, ring, &cfg(), &tol()).map_err(e2s)?;
                    let bad = w.with_bumped_entry(&z, &x, &y).map_err(e2s)?;
                    if leibniz_check(&bad, &ca, &ca, &cb).map_err(e2s)?.is_none() {
                        return fail(format!("{space:?} {ring} n={n} seed={seed}: mutation of ({z}, {x}, {y}) undetected"));
                    }
                    mutations += 1;
                }
            }
            if n >= 2 {
                let [a, b, g] = product_family(n, seed)?;
                identities(&a, &b, RingTag::Z2, &format!("product n={n} seed={seed} beta"))?;
                identities(&a, &g, RingTag::Z2, &format!("product n={n} seed={seed} gamma"))?;
                structures += 2;
            }
        }
    }
    if mutations == 0 {
        return fail("no mutation was detectable");
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(30) {
        return fail(format!("took {elapsed:?}"));
    }
    Ok(format!("{structures} structures, {mutations} mutations detected, {elapsed:?}"))
}

fn c7_oracle() -> Outcome {
    let start = Instant::now();
    let mut comparisons = 0;
    for n in 1..=3 {
        for seed in 0..5 {
            let mut cases = Vec::new();
            for space in [Space::Sphere, Space::Projective] {
                let (a, b) = closed(space, n, seed)?;
                cases.push((format!("{space:?}"), a, b));
            }
            let [a, b, g] = product_family(n, seed)?;
            cases.push(("product beta".into(), a.clone(), b));
            cases.push(("product gamma".into(), a, g));
            for (tag, a, b) in cases {
                let counts = oracle_agreement(&a, &a, &b, &cfg(), &tol()).map_err(e2s)?;
                if !counts.passed() {
                    return fail(format!("{tag} n={n} seed={seed}: {:?}", counts.discrepancies));
                }
                comparisons += counts.connections.len() + counts.triples.len();
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(300) {
        return fail(format!("took {elapsed:?}"));
    }
    Ok(format!("{comparisons} counts agree, {elapsed:?}"))
}

fn c8_orientations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..100 {
        let m = 1 + trial % 6;
        let (x, y1, y2) = random_transverse_triple(m, &mut rng, &tol()).map_err(e2s)?;
        if !swap_rule_holds(&x, &y1, &y2, &tol()).map_err(e2s)? {
            return fail(format!("swap rule fails in trial {trial}, dim {m}"));
        }
    }
    for n in 1..=3 {
        for seed in 0..5 {
            let (a, _) = closed(Space::Sphere, n, seed)?;
            let c = a.build_complex(RingTag::Z, &tol()).map_err(e2s)?;
            let h = c.cohomology().map_err(e2s)?;
            let ranks: Vec<usize> = h.iter().map(|d| d.rank).collect();
            if ranks != sphere_ranks(n) || h.iter().any(|d| !d.torsion.is_empty()) {
                return fail(format!("Z sphere n={n} seed={seed}: {h:?}"));
            }
        }
    }
    Ok("100 swap trials, Z spheres n = 1..3".into())
}

fn c9_remark() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..20u64 {
        let n = 2 + (i as usize) % 3;
        let (qa, qg) = random_generic_pair(n, 900 + i, &tol()).map_err(e2s)?;
        let qb = generic_partner(&qa, 9000 + 100 * i)?;
        let sigma = if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
        let c: f64 = rng.random_range(-0.5..0.5);
        let a = Datum::new(Space::Projective, qa, line(Sign::Minus, 0.0), "alpha").map_err(e2s)?;
        let b = Datum::new(Space::Projective, qb, line(Sign::Plus, 0.5), "beta").map_err(e2s)?;
        let g = Datum::new(Space::Projective, qg, line(sigma, c), "gamma").map_err(e2s)?;
        let y = relative_cup_length(&a, &b, RingTag::Z2, &cfg(), &tol()).map_err(e2s)?;
        let yp = absolute_cup_length(&a, &g, RingTag::Z2, &cfg(), &tol()).map_err(e2s)?;
        if yp.isolation == IsolationVerdict::Fail || yp.value > y.value {
            return fail(format!("instance {i}: Y' = {} > Y = {}", yp.value, y.value));
        }
    }
    Ok("20 instances".into())
}

fn c10_attracting_independence() -> Outcome {
    for seed in 0..10u64 {
        let n = 1 + (seed as usize) % 4;
        let qa = seeded_spectrum(n, 1000 + seed, &tol()).map_err(e2s)?;
        let b1 = generic_partner(&qa, 2000 + 100 * seed)?;
        let b2 = generic_partner(&qa, 5000 + 100 * seed)?;
        let mut values = Vec::new();
        for (space, va, vb) in [
            (Space::Projective, line(Sign::Minus, 0.0), line(Sign::Plus, 0.5)),
            (Space::Projective, None, None),
        ] {
            let a = Datum::new(space, qa.clone(), va, "alpha").map_err(e2s)?;
            let y: Vec<usize> = [&b1, &b2]
                .iter()
                .map(|q| {
                    let b = Datum::new(space, (*q).clone(), vb, "beta")?;
                    relative_cup_length(&a, &b, RingTag::Z2, &cfg(), &tol()).map(|r| r.value)
                })
                .collect::<Result<_, _>>()
                .map_err(e2s)?;
            if y[0] != y[1] {
                return fail(format!("seed={seed} n={n}: Y = {} vs {}", y[0], y[1]));
            }
            values.push(y[0]);
        }
        if values != [n + 1, n + 1] {
            return fail(format!("seed={seed} n={n}: Y = {values:?}"));
        }
    }
    Ok("10 seeds, two attracting spectra each".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("projective cohomology", c1_projective_cohomology),
        ("sphere cohomology", c2_sphere_cohomology),
        ("projective cup table", c3_projective_cup_table),
        ("product example", c4_product_example),
        ("critical point bound", c5_bound),
        ("algebraic identities", c6_identities),
        ("oracle equivalence", c7_oracle),
        ("orientation signs", c8_orientations),
        ("absolute <= relative", c9_remark),
        ("attracting-datum independence", c10_attracting_independence),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{ms:.0} ms]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{ms:.0} ms]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
