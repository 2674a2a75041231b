use morse_cup::cup::{chain_cup, cohomology_cup};
use morse_cup::cuplength::relative_cup_length;
use morse_cup::eigenflow::{random_generic_pair, seeded_spectrum};
use morse_cup::intersections::{general_position_check, random_transverse_triple, swap_rule_holds};
use morse_cup::oracle::{classify_limit, z_set_sample_check, Direction};
use morse_cup::{Datum, OracleConfig, Point, RingTag, Sign, Space, Tolerances, Vertical};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerances {
    Tolerances::standard()
}

fn space() -> impl Strategy<Value = Space> {
    prop_oneof![Just(Space::Sphere), Just(Space::Projective)]
}

fn unit(raw: &[f64]) -> Option<Vec<f64>> {
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    (norm > 1e-3).then(|| raw.iter().map(|x| x / norm).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn flow_group_law(seed in 0u64..1000, n in 1usize..4, sp in space(),
                      raw in prop::collection::vec(-1.0f64..1.0, 4), y in -0.9f64..0.9,
                      s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let Some(x) = unit(&raw[..=n]) else { return Ok(()) };
        let spec = seeded_spectrum(n, seed, &tol()).unwrap();
        let d = Datum::new(sp, spec, Some(Vertical { sign: Sign::Plus, center: 0.25 }), "a").unwrap();
        let p = Point::with_height(x, y);
        // backward flow may push the height out of [-1, 1]; only segments inside N compare
        let (Ok(once), Ok(mid)) = (d.flow(&p, s + t, &tol()), d.flow(&p, s, &tol())) else { return Ok(()) };
        let Ok(twice) = d.flow(&mid, t, &tol()) else { return Ok(()) };
        prop_assert!(once.distance(&twice, d.is_projective()) < 1e-9);
    }

    #[test]
    fn limits_are_constant_along_trajectories(seed in 0u64..1000, n in 1usize..4, sp in space(),
                                              raw in prop::collection::vec(0.2f64..1.0, 4),
                                              signs in prop::collection::vec(any::<bool>(), 4),
                                              t in -1.5f64..1.5) {
        let signed: Vec<f64> = raw.iter().zip(&signs).map(|(r, &s)| if s { *r } else { -r }).collect();
        let spec = seeded_spectrum(n, seed, &tol()).unwrap();
        let d = Datum::new(sp, spec.clone(), None, "a").unwrap();
        let x = unit(&(0..=n).map(|i| (0..=n).map(|k| signed[k] * spec.eigenvector(k)[i]).sum()).collect::<Vec<_>>()).unwrap();
        let p = Point::base(x);
        let q = d.flow(&p, t, &tol()).unwrap();
        let cfg = OracleConfig::default();
        for dir in [Direction::Forward, Direction::Backward] {
            prop_assert_eq!(
                classify_limit(&d, &p, dir, &cfg, &tol()).unwrap(),
                classify_limit(&d, &q, dir, &cfg, &tol()).unwrap()
            );
        }
    }

    #[test]
    fn swap_rule(seed in any::<u64>(), m in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y1, y2) = random_transverse_triple(m, &mut rng, &tol()).unwrap();
        prop_assert!(swap_rule_holds(&x, &y1, &y2, &tol()).unwrap());
    }

    #[test]
    fn cohomology_ignores_generator_order(seed in 0u64..1000, n in 1usize..4, shuffle in any::<u64>(),
                                          ring in prop_oneof![Just(RingTag::Z2), Just(RingTag::Z)]) {
        use rand::seq::SliceRandom;
        let spec = seeded_spectrum(n, seed, &tol()).unwrap();
        let c = Datum::sphere(spec, "a").unwrap().build_complex(ring, &tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(shuffle);
        let perms: Vec<Vec<usize>> = (0..c.num_degrees())
            .map(|k| {
                let mut p: Vec<usize> = (0..c.count(k)).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let shuffled = c.permuted(&perms).unwrap();
        prop_assert!(shuffled.validate_differential().unwrap().is_ok());
        prop_assert_eq!(shuffled.cohomology().unwrap(), c.cohomology().unwrap());
    }

    #[test]
    fn euler_characteristic_matches_betti(seed in 0u64..1000, n in 1usize..6, sp in space(), line in any::<bool>()) {
        let spec = seeded_spectrum(n, seed, &tol()).unwrap();
        let v = line.then_some(Vertical { sign: Sign::Minus, center: 0.0 });
        let c = Datum::new(sp, spec, v, "a").unwrap().build_complex(RingTag::Z2, &tol()).unwrap();
        let alternating: i64 = c.betti().unwrap().iter().enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum();
        prop_assert_eq!(alternating, c.euler_characteristic());
    }

    #[test]
    fn cup_of_classes_ignores_representatives(seed in 0u64..200, n in 1usize..4) {
        let (fa, fb) = random_generic_pair(n, seed, &tol()).unwrap();
        let a = Datum::sphere(fa, "alpha").unwrap();
        let b = Datum::sphere(fb, "beta").unwrap();
        let ring = RingTag::Z;
        let w = chain_cup(&a, &a, &b, ring, &OracleConfig::default(), &tol()).unwrap();
        let ca = a.build_complex(ring, &tol()).unwrap();
        let cb = b.build_complex(ring, &tol()).unwrap();
        let x = ca.cohomology_basis(0).unwrap().remove(0);
        let y = cb.cohomology_basis(n).unwrap().remove(0);
        // shift both representatives by a coboundary
        let bump = |c: &morse_cup::GradedComplex, v: &morse_cup::Cochain| {
            if v.degree == 0 {
                return v.clone();
            }
            let mut e = c.zero_cochain(v.degree - 1);
            e.coefficients[0] = 1.into();
            v.add_scaled(&c.apply(&e).unwrap(), &3.into(), ring)
        };
        let p1 = cohomology_cup(&w, &ca, &ca, &cb, &x, &y).unwrap();
        let p2 = cohomology_cup(&w, &ca, &ca, &cb, &bump(&ca, &x), &bump(&cb, &y)).unwrap();
        prop_assert!(p1.nonzero && p2.nonzero);
        prop_assert!(ca.same_class(&p1.cochain, &p2.cochain).unwrap());
    }

    #[test]
    fn relative_length_ignores_the_attracting_spectrum(seed in 0u64..200, n in 1usize..4, line in any::<bool>()) {
        let qa = seeded_spectrum(n, seed, &tol()).unwrap();
        let partners: Vec<_> = (0..200u64)
            .map(|s| seeded_spectrum(n, 10_000 + 7 * seed + s, &tol()).unwrap())
            .filter(|b| general_position_check(&qa, b, &tol()).unwrap())
            .take(2)
            .collect();
        prop_assume!(partners.len() == 2);
        let (va, vb) = if line {
            (Some(Vertical { sign: Sign::Minus, center: 0.0 }), Some(Vertical { sign: Sign::Plus, center: 0.5 }))
        } else {
            (None, None)
        };
        let a = Datum::new(Space::Projective, qa, va, "alpha").unwrap();
        let ys: Vec<usize> = partners
            .into_iter()
            .map(|q| {
                let b = Datum::new(Space::Projective, q, vb, "beta").unwrap();
                relative_cup_length(&a, &b, RingTag::Z2, &OracleConfig::default(), &tol()).unwrap().value
            })
            .collect();
        prop_assert_eq!(ys[0], ys[1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn z_set_check_is_monotone_in_the_horizon(seed in 0u64..50, n in 1usize..3,
                                              ca in -0.9f64..0.9, cb in -0.9f64..0.9, cg in -0.9f64..0.9,
                                              signs in prop::collection::vec(any::<bool>(), 3)) {
        let (fa, fb) = random_generic_pair(n, seed, &tol()).unwrap();
        let sign = |s: bool| if s { Sign::Plus } else { Sign::Minus };
        let mk = |f, s, c, l| Datum::new(Space::Projective, f, Some(Vertical { sign: sign(s), center: c }), l).unwrap();
        let a = mk(fa.clone(), signs[0], ca, "alpha");
        let b = mk(fb.clone(), signs[1], cb, "beta");
        let g = mk(fa, signs[2], cg, "gamma");
        let short = OracleConfig { horizon: 2.0, samples_per_cell: 2, seed, ..OracleConfig::default() };
        let long = OracleConfig { horizon: 6.0, ..short.clone() };
        if z_set_sample_check(&g, &a, &b, &short, &tol()).unwrap() {
            prop_assert!(z_set_sample_check(&g, &a, &b, &long, &tol()).unwrap());
        }
    }
}
