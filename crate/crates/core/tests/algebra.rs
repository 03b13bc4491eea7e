use coloured_operads::algebra::builtin::{star_closed, star_open};
use coloured_operads::algebra::endo::{generated_bimodule, generated_infbimodule, random_fn};
use coloured_operads::algebra::xcons::{as_pair, x_construction_unchecked};
use coloured_operads::algebra::*;
use coloured_operads::seqcore::{profile_closed, profile_open, Colour, Elem, SSeqMap};
use coloured_operads::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod oracles;
use oracles::doubled_as;

#[test]
fn act_cardinalities() {
    let u = builtin_act(true, 6);
    let n = builtin_act(false, 6);
    assert_eq!(u.carrier().cardinality(&profile_closed(0)), 1);
    assert_eq!(n.carrier().cardinality(&profile_closed(0)), 0);
    let open0 = coloured_operads::seqcore::Profile::new(vec![], Colour::Open);
    assert_eq!(u.carrier().cardinality(&open0), 0);
    assert_eq!(u.carrier().cardinality(&profile_open(3)), 1);
}

#[test]
fn builtins_pass() {
    for unital in [true, false] {
        let r = check_operad_axioms(&builtin_act(unital, 6));
        assert!(r.passed(), "{r}");
        let r = check_operad_axioms(&builtin_as(unital, 6));
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn restriction_is_as() {
    let act = builtin_act(true, 6);
    assert!(act
        .restriction_to_colour(Colour::Closed)
        .same_tables(&builtin_as(false, 6)));
    let act = builtin_act(false, 6);
    assert!(act
        .restriction_to_colour(Colour::Closed)
        .same_tables(&builtin_as(true, 6)));
}

#[test]
fn as_compose_two_two() {
    let a = builtin_as(true, 4);
    assert_eq!(
        a.compose(&star_closed(2), 1, &star_closed(2)),
        Some(star_closed(3))
    );
}

#[test]
fn corrupted_composite_reported() {
    let mut a = builtin_act(false, 4);
    a.remove_compose(&star_open(2), 2, &star_open(2)).unwrap();
    let r = check_operad_axioms(&a);
    assert_eq!(r.violations.len(), 1, "{r}");
    assert_eq!(r.violations[0].axiom, "defined");
    assert!(r.violations[0].instance.contains("*2;o"));
}

#[test]
fn end_counts() {
    let fam = Family::two(2, 1).unwrap();
    let end = endomorphism_operad(&fam, 3, 100_000).unwrap();
    // 2^2 self-maps of a two-element set, counted independently
    let mut count = 0;
    for a in 0..2u8 {
        for b in 0..2u8 {
            let _ = (a, b);
            count += 1;
        }
    }
    assert_eq!(end.carrier().cardinality(&profile_closed(1)), count);
    let r = check_operad_axioms(&end);
    assert!(r.passed(), "{r}");
}

#[test]
fn end_terminal() {
    let fam = Family::two(1, 1).unwrap();
    let end = endomorphism_operad(&fam, 3, 100_000).unwrap();
    for p in end.carrier().profiles() {
        assert_eq!(end.carrier().cardinality(p), 1);
    }
    assert!(check_operad_axioms(&end).passed());
}

#[test]
fn end_cap_refused() {
    let fam = Family::two(3, 3).unwrap();
    assert!(matches!(
        endomorphism_operad(&fam, 4, 1000),
        Err(Error::SizeCap { .. })
    ));
}

#[test]
fn induced_over_act_pass() {
    let act = builtin_act(false, 5);
    let id = OperadMap::identity(&act);
    let r = check_infbimodule_axioms(&induced_infbimodule(&id));
    assert!(r.passed(), "{r}");
    let r = check_bimodule_axioms(&induced_bimodule(&id));
    assert!(r.passed(), "{r}");
}

#[test]
fn corrupted_right_action_reported() {
    let (act, data) = act_into_end(3, false);
    let fam = data.family();
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let seeds = vec![
        random_fn(&mut rng, &fam, profile_closed(1)),
        random_fn(&mut rng, &fam, profile_closed(1)),
    ];
    let mut m = generated_infbimodule(&act, &|e| data.image(e), &fam, &seeds, 4, 50_000).unwrap();
    assert!(check_infbimodule_axioms(&m).passed());
    let ix = m.indexed().clone();
    let (x, i, a) = m
        .right_triples()
        .into_iter()
        .find(|&(x, i, a)| {
            let z = m.right_id(x, i, a).unwrap();
            ix.at_profile(ix.profile(z)).len() > 1
        })
        .expect("a profile with two elements");
    let z = m.right_id(x, i, a).unwrap();
    let other = *ix
        .at_profile(ix.profile(z))
        .iter()
        .find(|&&w| w != z)
        .unwrap();
    m.set_right_id(x, i, a, other);
    assert!(!check_infbimodule_axioms(&m).passed());
}

fn act_into_end(seed: u64, unital: bool) -> (FiniteOperad, ActionData) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = ActionData::random(&mut rng, 2, 2, unital);
    (builtin_act(unital, 4), data)
}

#[test]
fn generated_infbimodule_passes() {
    for seed in 0..5 {
        let (act, data) = act_into_end(seed, false);
        let fam = data.family();
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let seeds = vec![
            random_fn(&mut rng, &fam, profile_closed(1)),
            random_fn(&mut rng, &fam, profile_open(0)),
        ];
        let m = generated_infbimodule(&act, &|e| data.image(e), &fam, &seeds, 4, 50_000).unwrap();
        let r = check_infbimodule_axioms(&m);
        assert!(r.passed(), "seed {seed}: {r}");
    }
}

#[test]
fn generated_bimodule_passes() {
    for seed in 0..3 {
        let (act, data) = act_into_end(seed, false);
        let fam = data.family();
        let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
        let seeds = vec![random_fn(&mut rng, &fam, profile_open(0))];
        let m = generated_bimodule(&act, &|e| data.image(e), &fam, &seeds, 3, 50_000).unwrap();
        let r = check_bimodule_axioms(&m);
        assert!(r.passed(), "seed {seed}: {r}");
    }
}

#[test]
fn missing_unit_named() {
    let act = builtin_act(false, 3);
    let mut stripped = act.clone();
    let carrier = stripped.carrier().clone();
    stripped = FiniteOperad::new(carrier);
    let b = induced_bimodule(&OperadMap::identity(&act));
    let b = BimoduleTables::load(&b.store()).unwrap();
    let mut over_missing = BimoduleTables::new(stripped, b.carrier().clone());
    let (g, r) = b.entries();
    for (a, ms, z) in g {
        over_missing.set_gamma(&a, &ms, &z.label).unwrap();
    }
    for (x, i, a, z) in r {
        over_missing.set_right(&x, i, &a, &z.label).unwrap();
    }
    let eta = SSeqMap::identity(act.carrier());
    match infbimodule_from_bimodule_map(&over_missing, &eta) {
        Err(Error::MissingUnit(c)) => assert!(c.contains("closed") || c.contains("open")),
        other => panic!("expected missing unit, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn infbimodule_from_identity_map() {
    let act = builtin_act(false, 4);
    let b = induced_bimodule(&OperadMap::identity(&act));
    let eta = SSeqMap::identity(act.carrier());
    let m = infbimodule_from_bimodule_map(&b, &eta).unwrap();
    assert!(check_infbimodule_axioms(&m).passed());
    assert!(m.same_tables(&induced_infbimodule(&OperadMap::identity(&act))));
}

#[test]
fn x_construction_reproduces_act() {
    let (o, b, alpha, beta) = as_pair(5);
    let input = XInput {
        o: &o,
        b: &b,
        alpha: &alpha,
        beta: &beta,
    };
    assert!(check_assumption_13(&input).passed());
    let (x, eta) = x_construction(&input).unwrap();
    let act = builtin_act(true, 5);
    assert!(check_operad_axioms(&x).passed());
    // relabel X into Act through η and compare every table entry
    let map = OperadMap::verify(&act, &x, &eta).unwrap();
    let _ = map;
    let mut back = SSeqMap::new();
    for (src, lbl) in eta.iter() {
        back.set(
            Elem::new(src.profile.clone(), lbl.clone()),
            src.label.clone(),
        );
    }
    let inv = OperadMap::verify(&x, &act, &back).unwrap();
    let _ = inv;
    assert_eq!(x.table_len(), act.table_len());
}

#[test]
fn doubled_as_is_bimodule() {
    let r = check_bimodule_axioms(&doubled_as(4));
    assert!(r.passed(), "{r}");
}

#[test]
fn assumption_13_mutation_names_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..5 {
        let (o, _, alpha, beta) = as_pair(4);
        let mut b = doubled_as(4);
        let n = rand::Rng::gen_range(&mut rng, 0..=2usize);
        let x = Elem::new(profile_closed(n), format!("*{n}'"));
        let left = rand::Rng::gen_bool(&mut rng, 0.5);
        let args = if left {
            [star_closed(0), x.clone()]
        } else {
            [x.clone(), star_closed(0)]
        };
        b.set_gamma(&star_closed(2), &args, &format!("*{n}"))
            .unwrap();
        let input = XInput {
            o: &o,
            b: &b,
            alpha: &alpha,
            beta: &beta,
        };
        let rep = check_assumption_13(&input);
        assert_eq!(rep.violations.len(), 1, "{rep}");
        let side = if left {
            "unit-13-left"
        } else {
            "unit-13-right"
        };
        assert_eq!(rep.violations[0].axiom, side);
        assert!(rep.violations[0].instance.contains(&x.to_string()));
        match x_construction(&input) {
            Err(Error::UnitAssumption { side: s, witness }) => {
                assert_eq!(s, if left { "left" } else { "right" });
                assert!(witness.contains(&x.to_string()));
            }
            other => panic!("expected unit failure, got {:?}", other.map(|_| ())),
        }
        let (xo, _) = x_construction_unchecked(&input).unwrap();
        let r = check_operad_axioms(&xo);
        assert!(!r.passed());
    }
}

#[test]
fn m_star_collapses_closed() {
    let fam = Family::two(2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let data = ActionData::random(&mut rng, 2, 2, true);
    let act = builtin_act(false, 3);
    let unital = builtin_act(true, 3);
    let mut seeds: Vec<EndFn> = unital
        .carrier()
        .elems()
        .iter()
        .map(|e| data.image(e))
        .collect();
    seeds.push(random_fn(&mut rng, &fam, profile_open(1)));
    let m = generated_bimodule(&act, &|e| data.image(e), &fam, &seeds, 3, 50_000).unwrap();
    assert!(check_bimodule_axioms(&m).passed());
    let mut eta = SSeqMap::new();
    for e in unital.carrier().elems() {
        eta.set(e.clone(), data.image(&e).label());
    }
    let ms = m_star(&m, &eta).unwrap();
    for n in 0..=3 {
        assert_eq!(ms.carrier().cardinality(&profile_closed(n)), 1);
    }
    for n in 0..3 {
        assert_eq!(
            ms.carrier().elements(&profile_open(n)),
            m.carrier().elements(&profile_open(n))
        );
    }
    assert!(check_bimodule_axioms(&ms).passed());
    let mss = m_star(&ms, &eta).unwrap();
    assert!(mss.same_tables(&ms));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn induced_from_random_actions_pass(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = ActionData::random(&mut rng, 2, 2, false);
        let act = builtin_act(false, 3);
        let fam = data.family();
        let seeds: Vec<EndFn> = act.carrier().elems().iter().map(|e| data.image(e)).collect();
        let end = coloured_operads::algebra::endo::generated_operad(&fam, &seeds, 3, 50_000).unwrap();
        let mut f = SSeqMap::new();
        for e in act.carrier().elems() {
            f.set(e.clone(), data.image(&e).label());
        }
        let map = OperadMap::verify(&act, &end, &f).unwrap();
        let r = check_infbimodule_axioms(&induced_infbimodule(&map));
        prop_assert!(r.passed(), "{}", r);
        let r = check_bimodule_axioms(&induced_bimodule(&map));
        prop_assert!(r.passed(), "{}", r);
    }
}
