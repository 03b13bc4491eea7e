use coloured_operads::cells::*;
use coloured_operads::seqcore::{profile_closed, profile_open, Colour};
use coloured_operads::trees::{enumerate_trees, Caps, Constraint, Tree};
use coloured_operads::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod oracles;
use oracles::*;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn qs(v: &[(i64, i64)]) -> Vec<Q> {
    v.iter().map(|&(n, d)| q(n, d)).collect()
}

const C: Colour = Colour::Closed;
const O: Colour = Colour::Open;

// ---- simplices and prisms

#[test]
fn blacktriangle_examples() {
    let p = SimplexPoint::closed(qs(&[(1, 2)])).unwrap();
    let out = blacktriangle_apply(IbGen::Left { op: C, slot: 2 }, &p).unwrap();
    assert_eq!(out.coords(), qs(&[(0, 1), (1, 2)]).as_slice());

    let p = SimplexPoint::closed(qs(&[(1, 3), (2, 3)])).unwrap();
    let out = blacktriangle_apply(IbGen::Left { op: O, slot: 1 }, &p).unwrap();
    assert_eq!(
        out,
        SimplexPoint::open(qs(&[(1, 3), (2, 3)]), q(1, 1)).unwrap()
    );

    let p = SimplexPoint::open(vec![], q(2, 5)).unwrap();
    let out = blacktriangle_apply(IbGen::Right { slot: 1, op: O }, &p).unwrap();
    assert_eq!(out, SimplexPoint::open(qs(&[(1, 1)]), q(2, 5)).unwrap());

    let p = SimplexPoint::closed(qs(&[(1, 4), (3, 4)])).unwrap();
    let out = blacktriangle_apply(IbGen::Right { slot: 2, op: C }, &p).unwrap();
    assert_eq!(out.coords(), qs(&[(1, 4), (3, 4), (3, 4)]).as_slice());
    let out = blacktriangle_apply(IbGen::Left { op: C, slot: 1 }, &p).unwrap();
    assert_eq!(out.coords(), qs(&[(1, 4), (3, 4), (1, 1)]).as_slice());
}

#[test]
fn blacktriangle_rejects_bad_profiles() {
    let closed = SimplexPoint::closed(qs(&[(1, 2)])).unwrap();
    let open = SimplexPoint::open(qs(&[(1, 2)]), q(1, 2)).unwrap();
    for (g, p) in [
        (IbGen::Left { op: O, slot: 2 }, &closed),
        (IbGen::Left { op: O, slot: 1 }, &open),
        (IbGen::Left { op: C, slot: 1 }, &open),
        (IbGen::Right { slot: 2, op: C }, &open),
        (IbGen::Right { slot: 3, op: C }, &closed),
    ] {
        assert!(
            matches!(blacktriangle_apply(g, p), Err(Error::ColourMismatch(_))),
            "{g} at {p}"
        );
    }
    assert!(SimplexPoint::closed(qs(&[(1, 2), (1, 3)])).is_err());
    assert!(SimplexPoint::closed(qs(&[(3, 2)])).is_err());
}

#[test]
fn hand_derived_relations_hold() {
    // *2∘_2 x then −∘^1*2 equals *2∘_2 applied twice: both are *3∘_3 x.
    let x = SimplexPoint::closed(qs(&[(1, 3), (1, 2)])).unwrap();
    let a = blacktriangle_apply(
        IbGen::Right { slot: 1, op: C },
        &blacktriangle_apply(IbGen::Left { op: C, slot: 2 }, &x).unwrap(),
    )
    .unwrap();
    let b = blacktriangle_apply(
        IbGen::Left { op: C, slot: 2 },
        &blacktriangle_apply(IbGen::Left { op: C, slot: 2 }, &x).unwrap(),
    )
    .unwrap();
    assert_eq!(a, b);
    // *2;o∘_1 x then −∘^{n+1}*2;o equals *2;o∘_1 (*2∘_1 x).
    let a = blacktriangle_apply(
        IbGen::Right { slot: 3, op: O },
        &blacktriangle_apply(IbGen::Left { op: O, slot: 1 }, &x).unwrap(),
    )
    .unwrap();
    let b = blacktriangle_apply(
        IbGen::Left { op: O, slot: 1 },
        &blacktriangle_apply(IbGen::Left { op: C, slot: 1 }, &x).unwrap(),
    )
    .unwrap();
    assert_eq!(a, b);
}

#[test]
fn relation_checks_pass_and_are_not_vacuous() {
    let counts = blacktriangle_relation_counts(3).unwrap();
    assert_eq!(counts.len(), 4);
    assert!(counts.iter().all(|(_, c)| *c > 10), "{counts:?}");
    let r = check_blacktriangle_relations(3, 200, 1).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.checked > 1000);
    let r = check_tilde_relations(3, 200, 2).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.checked > 0);
    let r = check_square_relations(4, 200, 3, false).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.checked > 1000);
    let r = check_square_relations(4, 200, 4, true).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.checked > 0);
}

#[test]
fn closed_shadow_is_the_standard_cosimplicial_simplex() {
    // coface i inserts a zero barycentric coordinate at position i
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(0..5);
        let x = SimplexPoint::random(&mut rng, &profile_closed(n));
        let bx = barycentric(x.coords());
        for i in 0..=n + 1 {
            let y = shadow_coface(&x, i).unwrap();
            let mut expect = bx.clone();
            expect.insert(i, q(0, 1));
            assert_eq!(barycentric(y.coords()), expect, "d^{i} at {x}");
        }
        assert!(shadow_coface(&x, n + 2).is_err());
    }
}

#[test]
fn shadow_satisfies_cosimplicial_identities() {
    let r = check_shadow(4, 50, 5).unwrap();
    assert!(r.passed(), "{r}");
    assert!(r.checked > 1000);
}

#[test]
fn open_shadow_keeps_prism_coordinate() {
    let x = SimplexPoint::open(qs(&[(1, 5)]), q(2, 7)).unwrap();
    for i in 0..=2 {
        assert_eq!(shadow_coface(&x, i).unwrap().prism(), Some(q(2, 7)));
    }
    let top = shadow_coface(&x, 2).unwrap();
    assert_eq!(top.coords(), qs(&[(1, 5), (1, 1)]).as_slice());
}

// ---- cubes

#[test]
fn square_examples() {
    let unit = CubePoint::new(C, vec![]).unwrap();
    assert_eq!(
        square_right(&unit, 1, C).unwrap().coords(),
        qs(&[(0, 1)]).as_slice()
    );
    let a = CubePoint::new(C, qs(&[(1, 2)])).unwrap();
    let b = CubePoint::new(C, qs(&[(1, 3)])).unwrap();
    let ab = square_left(C, &a, &b).unwrap();
    assert_eq!(ab.coords(), qs(&[(1, 2), (1, 1), (1, 3)]).as_slice());
    assert_eq!(ab.profile(), profile_closed(4));
    let t = CubePoint::new(O, qs(&[(3, 4)])).unwrap();
    assert_eq!(t.profile(), profile_open(1));
    assert_eq!(
        square_right(&t, 2, O).unwrap().coords(),
        qs(&[(3, 4), (0, 1)]).as_slice()
    );
    assert_eq!(square_left(O, &a, &t).unwrap().colour(), O);
    assert!(square_left(C, &a, &t).is_err());
    assert!(square_left(O, &t, &t).is_err());
    assert!(square_right(&t, 2, C).is_err());
}

// ---- quotient cubes

fn tilde(v: &[(i64, i64)]) -> TildeCubePoint {
    TildeCubePoint::new(qs(v)).unwrap()
}

#[test]
fn tilde_examples() {
    let n = tilde_cube_normalize(&tilde(&[(3, 10), (1, 1), (7, 10)]));
    assert_eq!(n.coords(), qs(&[(1, 1), (1, 1), (7, 10)]).as_slice());
    assert!(n.is_normalized());
    let p = tilde(&[(1, 2), (1, 2)]);
    assert_eq!(tilde_cube_normalize(&p).coords(), p.coords());
    let r = tilde_cube_apply(TildeGen::PrependOne, &tilde(&[(1, 2)])).unwrap();
    assert_eq!(r.coords(), qs(&[(1, 1), (1, 2)]).as_slice());
    let r = tilde_cube_apply(TildeGen::InsertZero(1), &tilde(&[(1, 1), (1, 2)])).unwrap();
    assert_eq!(r.coords(), qs(&[(1, 1), (1, 1), (1, 2)]).as_slice());
    let r = tilde_cube_apply(TildeGen::AppendZero, &tilde(&[(1, 2)])).unwrap();
    assert_eq!(r.coords(), qs(&[(1, 2), (0, 1)]).as_slice());
    assert!(tilde_cube_apply(TildeGen::InsertZero(2), &tilde(&[(1, 2)])).is_err());
    assert!(TildeCubePoint::new(qs(&[(5, 4)])).is_err());
}

#[test]
fn tilde_representatives_decide_the_relation_on_a_grid() {
    let grid = [q(0, 1), q(1, 2), q(1, 1)];
    for n in 0..=4u32 {
        let pts: Vec<Vec<Q>> = (0..3usize.pow(n))
            .map(|mut k| {
                (0..n)
                    .map(|_| {
                        let t = grid[k % 3];
                        k /= 3;
                        t
                    })
                    .collect()
            })
            .collect();
        for a in &pts {
            for b in &pts {
                let ra = tilde_cube_normalize(&TildeCubePoint::new(a.clone()).unwrap());
                let rb = tilde_cube_normalize(&TildeCubePoint::new(b.clone()).unwrap());
                assert_eq!(ra == rb, tilde_related(a, b), "{a:?} {b:?}");
            }
        }
    }
}

#[test]
fn tilde_well_defined_at_random_points() {
    let r = check_tilde_well_defined(6, 1000, 9).unwrap();
    assert!(r.passed(), "{r}");
}

// ---- trees with lengths

fn parse(code: &str) -> Tree {
    Tree::parse(code).unwrap().0
}

fn bv(code: &str, ls: &[(i64, i64)]) -> BvPoint {
    BvPoint::new(parse(code), qs(ls)).unwrap()
}

#[test]
fn bv_zero_edges_contract() {
    let p = bv("2c 2c |c |c |c", &[(0, 1)]);
    let n = bv_normalize(&p);
    assert_eq!(n.tree(), &Tree::closed_corolla(3));
    assert!(n.lengths().is_empty());
    let p = bv("2c 2c 2c |c |c |c |c", &[(1, 2), (0, 1)]);
    let n = bv_normalize(&p);
    assert_eq!(n.tree().code(), "2c 3c |c |c |c |c");
    assert_eq!(n.lengths(), qs(&[(1, 2)]).as_slice());
    assert!(n.is_normalized());
}

#[test]
fn bv_compose_grafts_with_length_one() {
    let c2 = BvPoint::corolla(&[C, C], C).unwrap();
    let r = bv_compose(&c2, 2, &c2).unwrap();
    assert_eq!(r.tree().code(), "2c |c 2c |c |c");
    assert_eq!(r.lengths(), &[q(1, 1)]);
    let o2 = BvPoint::corolla(&[C, O], O).unwrap();
    let r = bv_compose(&o2, 2, &o2).unwrap();
    assert_eq!(r.tree().code(), "2o |c 2o |c |o");
    assert!(matches!(
        bv_compose(&o2, 1, &o2),
        Err(Error::ColourMismatch(_))
    ));
    assert!(bv_compose(&c2, 3, &c2).is_err());
    assert_eq!(bv_compose(&c2, 1, &BvPoint::unit(C)).unwrap(), c2);
    assert_eq!(bv_compose(&BvPoint::unit(C), 1, &c2).unwrap(), c2);
}

#[test]
fn bv_rejects_malformed_points() {
    assert!(BvPoint::new(Tree::closed_corolla(1), vec![]).is_err());
    assert!(BvPoint::new(parse("2c 2c |c |c |c"), vec![]).is_err());
    assert!(BvPoint::new(parse("2c 2c |c |c |c"), qs(&[(3, 2)])).is_err());
    assert!(BvPoint::new(parse("2o |o |c"), vec![]).is_err());
}

fn small_points(rng: &mut ChaCha8Rng) -> Vec<BvPoint> {
    let mut out = vec![BvPoint::unit(C)];
    for n in 2..=4 {
        for t in bv_trees(n, C).unwrap() {
            if t.vertex_count() <= 3 {
                out.push(bv_normalize(&BvPoint::random(rng, &t)));
            }
        }
    }
    out
}

#[test]
fn bv_compose_is_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let pool = small_points(&mut rng);
    let small: Vec<&BvPoint> = pool.iter().collect();
    let mut checked = 0;
    for x in &small {
        let lx = x.tree().leaves();
        for y in &small {
            let ly = y.tree().leaves();
            for z in &small {
                for i in 1..=lx {
                    // sequential
                    for j in 1..=ly {
                        let l = bv_compose(&bv_compose(x, i, y).unwrap(), i + j - 1, z).unwrap();
                        let r = bv_compose(x, i, &bv_compose(y, j, z).unwrap()).unwrap();
                        assert_eq!(l, r, "{x} {i} {y} {j} {z}");
                        checked += 1;
                    }
                    // parallel
                    for j in i + 1..=lx {
                        let l = bv_compose(&bv_compose(x, i, y).unwrap(), j + ly - 1, z).unwrap();
                        let r = bv_compose(&bv_compose(x, j, z).unwrap(), i, y).unwrap();
                        assert_eq!(l, r, "{x} {i} {y} {j} {z}");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
}

// ---- the quotient by free coordinates

#[test]
fn penta_examples() {
    let p = bv("2o 2c |c |c |o", &[(1, 2)]);
    assert_eq!(penta_normalize(&p), p);
    let p = bv("2o 2c 2c |c |c |c |o", &[(1, 1), (1, 2)]);
    assert_eq!(
        penta_normalize(&p),
        bv("2o 2c 2c |c |c |c |o", &[(1, 1), (1, 1)])
    );
    assert_eq!(penta_free_edges(&p), vec![1]);
    // open edges are never released, even above a closed 1
    let p = bv("2o |c 2o 2c |c |c |o", &[(1, 3), (1, 1)]);
    assert_eq!(penta_normalize(&p), p);
    let p = bv("2o 2c |c |c 2o |c |o", &[(1, 1), (1, 4)]);
    assert_eq!(penta_normalize(&p), p);
}

#[test]
fn penta_representatives_match_the_literal_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in 2..=5 {
        for t in bv_trees(n, O).unwrap() {
            for _ in 0..20 {
                let a = BvPoint::random(&mut rng, &t);
                let ra = penta_normalize(&a);
                if !a.is_normalized() {
                    continue;
                }
                assert!(penta_related(&a, &ra), "{a} -> {ra}");
                let b = BvPoint::random(&mut rng, &t);
                if b.is_normalized() && penta_related(&a, &b) {
                    assert_eq!(ra, penta_normalize(&b), "{a} {b}");
                }
            }
        }
    }
}

#[test]
fn penta_checker_passes() {
    let r = check_penta(5, 1000, 41).unwrap();
    assert!(r.passed(), "{r}");
}

// ---- face posets

#[test]
fn pentagon_and_three_dimensional_associahedron() {
    assert_eq!(wa_face_poset(2, C).unwrap().f_vector(), vec![1]);
    assert_eq!(wa_face_poset(4, C).unwrap().f_vector(), vec![5, 5, 1]);
    let p = wa_face_poset(5, C).unwrap();
    assert_eq!(p.f_vector(), vec![14, 21, 9, 1]);
    assert_eq!(p.euler_characteristic(), 1);
}

#[test]
fn f_vectors_match_counting_oracle() {
    let mut counts = TreeCounts::new();
    for n in 2..=7 {
        for colour in [C, O] {
            let p = wa_face_poset(n, colour).unwrap();
            let expect: Vec<u64> = (0..=n - 2).map(|d| counts.trees(n, n - 1 - d)).collect();
            let got: Vec<u64> = p.f_vector().iter().map(|&c| c as u64).collect();
            assert_eq!(got, expect, "n={n} {colour:?}");
            assert_eq!(got[0], catalan(n - 1));
            if n <= 6 {
                assert_eq!(p.euler_characteristic(), 1);
            }
            let r = check_face_poset(&p);
            assert!(r.passed(), "{r}");
        }
    }
}

#[test]
fn face_poset_cover_counts() {
    // each face of dimension d < top lies in faces reached by contracting
    // one of its inner edges; the vertices of the pentagon have two each
    let p = wa_face_poset(4, C).unwrap();
    for (f, up) in p.faces.iter().zip(&p.covers) {
        assert_eq!(up.len(), f.tree.inner_edges(), "{}", f.code);
    }
    let v: Vec<usize> = p
        .faces
        .iter()
        .zip(&p.covers)
        .filter(|(f, _)| f.dim == 0)
        .map(|(_, u)| u.len())
        .collect();
    assert_eq!(v, vec![2; 5]);
}

#[test]
fn face_poset_exports() {
    let p = wa_face_poset(3, O).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
    assert_eq!(doc["f_vector"], serde_json::json!([2, 1]));
    assert_eq!(doc["faces"].as_array().unwrap().len(), 3);
    assert_eq!(doc["colour"], "open");
    let dot = p.to_dot();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 2);
}

#[test]
fn face_poset_bounds() {
    assert!(matches!(wa_face_poset(1, C), Err(Error::Precondition(_))));
    assert!(matches!(
        wa_face_poset(FACE_CAP + 1, C),
        Err(Error::SizeCap { .. })
    ));
}

// ---- subdivision

#[test]
fn subdivision_cells_bookkeeping() {
    let mut counts = TreeCounts::new();
    for n in 2..=6 {
        let cells = subdivision_cells(n, C).unwrap();
        let oracle: u64 = (1..n).map(|v| counts.trees(n, v)).sum();
        assert_eq!(cells.len() as u64, oracle);
        let caps = Caps {
            max_arity: n,
            max_vertices: n,
            max_leaves: n,
        };
        assert_eq!(
            cells.len(),
            enumerate_trees(n, &Constraint::MinArity2, caps)
                .unwrap()
                .len()
        );
        let corolla = cells.iter().find(|c| c.tree.vertex_count() == 1).unwrap();
        assert_eq!((corolla.dim_chi, corolla.dim_lambda), (1, n - 2));
        for c in cells
            .iter()
            .filter(|c| c.tree.arities().iter().all(|&a| a == 2))
        {
            assert_eq!(c.dim_lambda, 0);
            assert_eq!(c.dim_chi, n - 1);
        }
        for colour in [C, O] {
            let audit = subdivision_audit(n, colour).unwrap();
            assert!(audit.report.passed(), "{}", audit.report);
            assert_eq!(audit.max_total, n - 1);
            assert_eq!(audit.full_dimensional, audit.cells);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tilde_normalize_idempotent_and_compatible(seed in any::<u64>(), n in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = TildeCubePoint::random(&mut rng, n);
        let np = tilde_cube_normalize(&p);
        prop_assert_eq!(tilde_cube_normalize(&np), np.clone());
        for i in 1..=n {
            prop_assert_eq!(
                tilde_cube_apply(TildeGen::InsertZero(i), &np).unwrap(),
                tilde_cube_apply(TildeGen::InsertZero(i), &p).unwrap()
            );
        }
    }

    #[test]
    fn bv_normalize_idempotent(seed in any::<u64>(), n in 2usize..6, open in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trees = bv_trees(n, if open { O } else { C }).unwrap();
        let t = &trees[rng.gen_range(0..trees.len())];
        let p = BvPoint::random(&mut rng, t);
        let np = bv_normalize(&p);
        prop_assert!(np.is_normalized());
        prop_assert_eq!(np.tree().leaves(), n);
        prop_assert_eq!(bv_normalize(&np), np);
    }

    #[test]
    fn penta_free_moves_keep_representative(seed in any::<u64>(), n in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trees = bv_trees(n, O).unwrap();
        let t = &trees[rng.gen_range(0..trees.len())];
        let p = bv_normalize(&BvPoint::random(&mut rng, t));
        let r = penta_normalize(&p);
        prop_assert_eq!(penta_normalize(&r), r.clone());
        for e in penta_free_edges(&p) {
            let mut lengths = p.lengths().to_vec();
            lengths[e] = Q::new(rng.gen_range(1..=5), 5);
            let moved = BvPoint::new(p.tree().clone(), lengths).unwrap();
            prop_assert_eq!(penta_normalize(&moved), r.clone());
        }
    }
}
