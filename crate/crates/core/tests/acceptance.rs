use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use coloured_operads::algebra::builtin::{builtin_act, builtin_as, star_closed};
use coloured_operads::algebra::modules::{check_bimodule_axioms, check_infbimodule_axioms};
use coloured_operads::algebra::operad::{check_operad_axioms, FiniteOperad};
use coloured_operads::algebra::xcons::{as_pair, check_assumption_13, x_construction, XInput};
use coloured_operads::cells::*;
use coloured_operads::cli::{run, suite, SuiteConfig};
use coloured_operads::corpus::{bimodule_corpus, infbimodule_corpus, xcons_corpus};
use coloured_operads::cosimp::*;
use coloured_operads::freecons::{
    adjunction_check_bimod, adjunction_check_ib, all_sequence_maps, FreeBimod, FreeIb,
};
use coloured_operads::seqcore::{
    profile_closed, profile_open, Colour, Elem, FiniteSSequence, Profile,
};
use coloured_operads::trees::{count_ptrees, enumerate_trees, Caps, Constraint};
use coloured_operads::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod oracles;
use oracles::*;

const C: Colour = Colour::Closed;
const O: Colour = Colour::Open;

fn within(start: Instant, limit: u64) {
    let took = start.elapsed();
    assert!(
        took < Duration::from_secs(limit),
        "took {took:?}, budget {limit}s"
    );
}

/// Profiles an operad of monoid actions (or of monoids) must have: one
/// operation per profile, closed arities from `lo`, open outputs with any
/// closed inputs followed by one open input.
fn expected_profiles(two_coloured: bool, lo: usize, max: usize) -> BTreeSet<Profile> {
    let mut out: BTreeSet<Profile> = (lo..=max).map(profile_closed).collect();
    if two_coloured {
        for k in 0..max {
            let mut inputs = vec![C; k];
            inputs.push(O);
            out.insert(Profile::new(inputs, O));
        }
    }
    out
}

/// Every colour-compatible composite is defined, lands at the grafted
/// profile, and nothing else is defined.
fn one_per_profile_tables(o: &FiniteOperad, want: &BTreeSet<Profile>, max: usize) {
    let got: BTreeSet<Profile> = o
        .carrier()
        .profiles()
        .filter(|p| o.carrier().cardinality(p) > 0)
        .cloned()
        .collect();
    assert_eq!(&got, want);
    for p in want {
        assert_eq!(o.carrier().cardinality(p), 1, "{p}");
    }
    let elems = o.carrier().elems();
    let mut expected = 0;
    for x in &elems {
        for y in &elems {
            for i in 1..=x.arity() {
                let ok = x.profile.inputs[i - 1] == y.output() && x.arity() + y.arity() - 1 <= max;
                let got = o.compose(x, i, y);
                if ok {
                    expected += 1;
                    let z = got.unwrap_or_else(|| panic!("{x} o_{i} {y} undefined"));
                    assert_eq!(z.profile, x.profile.graft(i, &y.profile), "{x} o_{i} {y}");
                } else {
                    assert!(got.is_none(), "{x} o_{i} {y}");
                }
            }
        }
    }
    assert_eq!(o.table_len(), expected);
}

#[test]
fn criterion_01_builtin_validity() {
    let start = Instant::now();
    for unital in [true, false] {
        let act = builtin_act(unital, 6);
        let r = check_operad_axioms(&act);
        assert!(r.passed(), "{r}");
        let lo = if unital { 0 } else { 1 };
        one_per_profile_tables(&act, &expected_profiles(true, lo, 6), 6);
        assert_eq!(act.unit(C), Some(star_closed(1)));
        assert_eq!(act.unit(O).map(|e| e.profile), Some(profile_open(0)));

        let as_op = builtin_as(!unital, 6);
        let r = check_operad_axioms(&as_op);
        assert!(r.passed(), "{r}");
        one_per_profile_tables(&as_op, &expected_profiles(false, lo, 6), 6);
        // the closed part of the action operad is the associative operad
        assert!(act.restriction_to_colour(C).same_tables(&as_op));
    }
    within(start, 1);
}

#[test]
fn criterion_02_infbimodules_give_cosimplicial_pairs() {
    let start = Instant::now();
    let corpus = infbimodule_corpus(25, 2024, 3, 4).unwrap();
    assert_eq!(corpus.len(), 25);
    for (k, m) in corpus.iter().enumerate() {
        assert!(check_infbimodule_axioms(m).passed(), "entry {k}");
        let p = derive_pair_from_infbimodule(m).unwrap();
        let r = check_semicosimplicial(&p.closed);
        assert!(r.passed(), "entry {k}: {r}");
        let r = check_semicosimplicial(&p.open);
        assert!(r.passed(), "entry {k}: {r}");
        // h against every coface, level by level
        for n in 0..p.open.max_level() {
            for x in 0..p.closed.size(n) {
                for i in 0..=n + 1 {
                    assert_eq!(
                        p.h[n + 1][p.closed.d(n, i, x)],
                        p.open.d(n, i, p.h[n][x]),
                        "entry {k}, level {n}, d^{i}"
                    );
                }
            }
        }
        assert!(p.check().passed());
        let back = infbimodule_from_pair(&p).unwrap();
        assert!(back.same_tables(m), "entry {k}");
    }
    within(start, 30);
}

#[test]
fn criterion_03_bimodules_give_box_monoids() {
    let start = Instant::now();
    let corpus = bimodule_corpus(25, 2024, 3, 3).unwrap();
    for (k, (m, eta)) in corpus.iter().enumerate() {
        assert!(check_bimodule_axioms(m).passed(), "entry {k}");
        assert!(check_structure_map(m, eta).unwrap().passed(), "entry {k}");
        let (mo, md, h) = derive_monoid_from_bimodule(m, eta).unwrap();
        let r = check_box_monoid(&mo).unwrap();
        assert!(r.passed(), "entry {k}: {r}");
        let r = check_box_module(&mo, &md).unwrap();
        assert!(r.passed(), "entry {k}: {r}");
        assert!(check_module_map(&mo, &md, &h).passed(), "entry {k}");
    }
    let data = LoopData::new(3, &[0, 1]).unwrap();
    let (mo, md, h) = loops_example(&data, 4).unwrap();
    for n in 0..=4 {
        assert_eq!(mo.x.size(n), 3usize.pow(n as u32));
        assert_eq!(md.a.size(n), 2 * 3usize.pow(n as u32));
    }
    assert!(check_box_monoid(&mo).unwrap().passed());
    assert!(check_box_module(&mo, &md).unwrap().passed());
    assert!(check_module_map(&mo, &md, &h).passed());
    within(start, 60);
}

#[test]
fn criterion_04_box_product_laws() {
    let start = Instant::now();
    let inputs: Vec<SemiCosimplicialSet> = infbimodule_corpus(10, 404, 2, 5)
        .unwrap()
        .iter()
        .map(|m| derive_pair_from_infbimodule(m).unwrap().closed.truncate(5))
        .collect();
    let e = SemiCosimplicialSet::point(5);
    for (k, x) in inputs.iter().enumerate() {
        assert_eq!(x.max_level(), 5);
        let r = check_unit_laws(x).unwrap();
        assert!(r.passed(), "input {k}: {r}");
        let sizes: Vec<usize> = (0..=5).map(|n| x.size(n)).collect();
        assert_eq!(component_counts(&e, x), sizes);
        assert_eq!(component_counts(x, &e), sizes);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(405);
    let small: Vec<SemiCosimplicialSet> = inputs.iter().map(|x| x.truncate(3)).collect();
    for _ in 0..10 {
        let pick = |rng: &mut ChaCha8Rng| small[rng.gen_range(0..small.len())].clone();
        let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let xy = box_product(&x, &y).unwrap().set;
        let yz = box_product(&y, &z).unwrap().set;
        let left = box_product(&xy, &z).unwrap().set;
        let right = box_product(&x, &yz).unwrap().set;
        for n in 0..=3 {
            assert_eq!(left.size(n), right.size(n), "level {n}");
        }
        assert_eq!(
            component_counts(&xy, &z),
            (0..=3).map(|n| left.size(n)).collect::<Vec<_>>()
        );
    }
    let ee = box_product(&e, &e).unwrap().set;
    assert_eq!((0..=5).map(|n| ee.size(n)).collect::<Vec<_>>(), vec![1; 6]);
    assert_eq!(component_counts(&e, &e), vec![1; 6]);
    within(start, 30);
}

#[test]
fn criterion_05_free_construction_adjunction() {
    let start = Instant::now();
    let act = builtin_act(false, 3);
    let mut m = FiniteSSequence::two_coloured(3);
    m.insert(profile_closed(1), "m").unwrap();
    m.insert(profile_open(1), "w").unwrap();
    for seed in 0..10 {
        let n = infbimodule_corpus(1, 500 + seed, 2, 3).unwrap().remove(0);
        let r = adjunction_check_ib(&act, &m, &n).unwrap();
        assert_eq!(r.free_maps, r.sequence_maps, "seed {seed}");
        assert!(r.triangle.passed(), "seed {seed}: {}", r.triangle);
        let (nb, _) = bimodule_corpus(1, 600 + seed, 2, 3).unwrap().remove(0);
        let r = adjunction_check_bimod(&act, &m, &nb).unwrap();
        assert_eq!(r.free_maps, r.sequence_maps, "seed {seed}");
        assert!(r.triangle.passed(), "seed {seed}: {}", r.triangle);
    }

    // every cut order folds to the same element, for every generator map
    let free = FreeIb::new(&act, &m, 3).unwrap();
    let freeb = FreeBimod::new(&act, &m, 3).unwrap();
    let mut folds = 0;
    for seed in 0..2 {
        let n = infbimodule_corpus(1, 700 + seed, 2, 3).unwrap().remove(0);
        for h in all_sequence_maps(&m, n.carrier()) {
            for x in free.all() {
                let orders = free.cut_orders(x);
                let v0 = free.fold_with_order(&h, &n, x, &orders[0]).unwrap();
                for o in &orders[1..] {
                    assert_eq!(free.fold_with_order(&h, &n, x, o).unwrap(), v0);
                    folds += 1;
                }
            }
        }
        let (nb, _) = bimodule_corpus(1, 800 + seed, 2, 3).unwrap().remove(0);
        for h in all_sequence_maps(&m, nb.carrier()) {
            for x in freeb.all() {
                let orders = freeb.cut_orders(x);
                let v0 = freeb.fold_with_order(&h, &nb, x, &orders[0]).unwrap();
                for o in &orders[1..] {
                    assert_eq!(freeb.fold_with_order(&h, &nb, x, o).unwrap(), v0);
                    folds += 1;
                }
            }
        }
    }
    assert!(folds > 0);
    within(start, 120);
}

#[test]
fn criterion_06_tree_counts() {
    let start = Instant::now();
    let small = Caps {
        max_arity: 3,
        max_vertices: 3,
        max_leaves: 8,
    };
    let table = shape_counts(5, 3, 3);
    for n in 0..=5 {
        let closed: u64 = (0..=3).map(|v| table[n][v]).sum();
        let all: u64 = (0..=3).map(|v| table[n][v] << (n + v)).sum();
        assert_eq!(
            enumerate_trees(n, &Constraint::ClosedOnly, small)
                .unwrap()
                .len() as u64,
            closed
        );
        assert_eq!(
            enumerate_trees(n, &Constraint::All, small).unwrap().len() as u64,
            all
        );
    }
    for n in 1..=5 {
        let caps = Caps::default();
        assert_eq!(
            enumerate_trees(n, &Constraint::Binary, caps).unwrap().len() as u64,
            catalan(n - 1)
        );
        assert_eq!(
            enumerate_trees(n, &Constraint::MinArity2, caps)
                .unwrap()
                .len() as u64,
            schroeder(n)
        );
        assert_eq!(
            enumerate_trees(n, &Constraint::TreeO, caps).unwrap().len() as u64,
            schroeder(n)
        );
    }
    let marked = Caps {
        max_arity: 3,
        max_vertices: 4,
        max_leaves: 8,
    };
    for m in 0..=5 {
        let p = profile_closed(m);
        let got = enumerate_trees(m, &Constraint::Pearl(p.clone()), marked).unwrap();
        assert_eq!(got.len() as u64, pearl_oracle(m, marked), "pearl m={m}");
        let got = enumerate_trees(m, &Constraint::Section(p), marked).unwrap();
        assert_eq!(got.len() as u64, section_oracle(m, marked), "section m={m}");
    }
    for m in 0..=5 {
        for n in 0..=5 {
            assert_eq!(count_ptrees(m, n) as u64, tr_oracle(m, n), "tr_{m}^{n}");
        }
    }
    within(start, 10);
}

#[test]
fn criterion_07_polytopes() {
    let start = Instant::now();
    assert_eq!(wa_face_poset(4, C).unwrap().f_vector(), vec![5, 5, 1]);
    assert_eq!(wa_face_poset(5, C).unwrap().f_vector(), vec![14, 21, 9, 1]);
    let mut counts = TreeCounts::new();
    for n in 2..=6 {
        for colour in [C, O] {
            let p = wa_face_poset(n, colour).unwrap();
            let expect: Vec<u64> = (0..=n - 2).map(|d| counts.trees(n, n - 1 - d)).collect();
            let got: Vec<u64> = p.f_vector().iter().map(|&c| c as u64).collect();
            assert_eq!(got, expect, "n={n} {colour:?}");
            let alt: i64 = expect
                .iter()
                .enumerate()
                .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
                .sum();
            assert_eq!(alt, 1, "n={n} {colour:?}");
            assert_eq!(p.euler_characteristic(), 1, "n={n} {colour:?}");
            assert!(check_face_poset(&p).passed());
        }
    }
    within(start, 10);
}

/// A point related to `a` by the literal quotient-cube relation: everything
/// before a shared 1 is arbitrary.
fn tilde_partner(rng: &mut ChaCha8Rng, a: &[Q]) -> Vec<Q> {
    let one = Q::from_integer(1);
    let ones: Vec<usize> = (0..a.len()).filter(|&i| a[i] == one).collect();
    if ones.is_empty() {
        return a.to_vec();
    }
    let cut = ones[rng.gen_range(0..ones.len())];
    let mut b = a.to_vec();
    for t in &mut b[..cut] {
        *t = random_unit(rng);
    }
    b
}

#[test]
fn criterion_08_exact_point_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);

    // simplices and prisms
    let r = check_blacktriangle_relations(3, 200, 81).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.checked >= 1000, "{}", r.checked);
    let r = check_shadow(5, 200, 82).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.checked >= 1000);
    for _ in 0..1000 {
        let n = rng.gen_range(0..6);
        let x = SimplexPoint::random(&mut rng, &profile_closed(n));
        let bx = barycentric(x.coords());
        let i = rng.gen_range(0..=n + 1);
        let mut expect = bx.clone();
        expect.insert(i, Q::from_integer(0));
        assert_eq!(barycentric(shadow_coface(&x, i).unwrap().coords()), expect);
    }

    // cubes
    for closed_only in [false, true] {
        let r = check_square_relations(4, 200, 83, closed_only).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.checked >= 1000, "{}", r.checked);
    }

    // quotient cubes: relations, well-definedness, and the relation itself
    let r = check_tilde_relations(3, 200, 84).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.checked >= 1000, "{}", r.checked);
    let r = check_tilde_well_defined(6, 1000, 85).unwrap();
    assert!(r.passed(), "{r}");
    for _ in 0..1000 {
        let n = rng.gen_range(0..7);
        let mut a = TildeCubePoint::random(&mut rng, n).coords().to_vec();
        if n > 0 && rng.gen_bool(0.5) {
            let k = rng.gen_range(0..n);
            a[k] = Q::from_integer(1);
        }
        let b = tilde_partner(&mut rng, &a);
        assert!(tilde_related(&a, &b));
        let ra = tilde_cube_normalize(&TildeCubePoint::new(a.clone()).unwrap());
        let rb = tilde_cube_normalize(&TildeCubePoint::new(b.clone()).unwrap());
        assert_eq!(ra, rb, "{a:?} {b:?}");
        assert!(tilde_related(&a, ra.coords()));
    }

    // edge lengths: the quotient and its representatives
    let r = check_penta(5, 1000, 86).unwrap();
    assert!(r.passed(), "{r}");
    let trees: Vec<_> = (2..=5).flat_map(|n| bv_trees(n, O).unwrap()).collect();
    let mut related = 0;
    for _ in 0..1000 {
        let t = &trees[rng.gen_range(0..trees.len())];
        let a = BvPoint::random(&mut rng, t);
        if !a.is_normalized() {
            continue;
        }
        let ra = penta_normalize(&a);
        assert!(penta_related(&a, &ra), "{a} -> {ra}");
        assert_eq!(penta_normalize(&ra), ra);
        // move every released coordinate and land on the same representative
        let mut ls = a.lengths().to_vec();
        for e in penta_free_edges(&a) {
            ls[e] = random_unit(&mut rng);
        }
        if let Ok(b) = BvPoint::new(t.clone(), ls) {
            if b.is_normalized() && penta_related(&a, &b) {
                assert_eq!(penta_normalize(&b), ra, "{a} {b}");
                related += 1;
            }
        }
    }
    assert!(related > 100, "{related}");
    within(start, 10);
}

#[test]
fn criterion_09_construction_from_a_multiplicative_operad() {
    let start = Instant::now();
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
    // eta is a bijection carrying every table entry of Act onto one of X
    let images: BTreeSet<Elem> = act
        .carrier()
        .elems()
        .iter()
        .map(|e| eta.get(e).unwrap())
        .collect();
    assert_eq!(images.len(), act.carrier().total());
    assert_eq!(x.carrier().total(), act.carrier().total());
    for (p, q, i, r) in act.entries().into_iter().map(|(p, i, q, r)| (p, q, i, r)) {
        let got = x.compose(&eta.get(&p).unwrap(), i, &eta.get(&q).unwrap());
        assert_eq!(got, eta.get(&r), "{p} o_{i} {q}");
    }
    assert_eq!(x.table_len(), act.table_len());
    for c in [C, O] {
        assert_eq!(x.unit(c), act.unit(c).and_then(|u| eta.get(&u)));
    }

    // a mutation breaking the unit condition is named with its witness
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let n = rng.gen_range(0..=2usize);
    let left = rng.gen_bool(0.5);
    let (o, _, alpha, beta) = as_pair(4);
    let mut b = doubled_as(4);
    let w = Elem::new(profile_closed(n), format!("*{n}'"));
    let args = if left {
        [star_closed(0), w.clone()]
    } else {
        [w.clone(), star_closed(0)]
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
    assert!(!rep.passed());
    assert!(
        rep.violations
            .iter()
            .all(|v| v.instance.contains(&w.to_string())),
        "{rep}"
    );
    match x_construction(&input) {
        Err(Error::UnitAssumption { witness, .. }) => assert!(witness.contains(&w.to_string())),
        other => panic!("expected a unit failure, got {:?}", other.map(|_| ())),
    }

    // whenever the condition holds the output is an operad
    let corpus = xcons_corpus(10, 99, 2, 3).unwrap();
    assert_eq!(corpus.len(), 10);
    let mut sizes = BTreeMap::new();
    for (o, b, alpha, beta) in &corpus {
        let input = XInput { o, b, alpha, beta };
        assert!(check_assumption_13(&input).passed());
        let (x, _) = x_construction(&input).unwrap();
        let r = check_operad_axioms(&x);
        assert!(r.passed(), "{r}");
        *sizes.entry(x.carrier().total()).or_insert(0) += 1;
    }
    assert!(sizes.len() > 1, "corpus is not varied: {sizes:?}");
    within(start, 10);
}

#[test]
fn criterion_10_determinism() {
    let cfg = SuiteConfig {
        seed: 7,
        ..SuiteConfig::default()
    };
    let a = suite(&cfg);
    let b = suite(&cfg);
    assert!(a.passed(), "{}", a.render_text());
    assert_eq!(a.render_text(), b.render_text());
    assert_eq!(a.render_json(), b.render_json());
    let args = ["opcheck", "suite", "--all", "--seed", "7"];
    let x = run(args);
    let y = run(args);
    assert_eq!(x.code, 0);
    assert_eq!(x.stdout, y.stdout);
    assert_eq!(x.stdout, a.render_text());
}
