use std::collections::BTreeSet;

use coloured_operads::seqcore::{Colour, Profile};
use coloured_operads::trees::*;
use proptest::prelude::*;

mod oracles;
use oracles::*;

#[test]
fn join_and_distance() {
    let c = Tree::closed_corolla(2);
    assert_eq!(c.join(0, 0), 0);
    assert_eq!(c.distance(0, 0), 0);
    let t = c.graft(1, &Tree::closed_corolla(2)).unwrap();
    assert_eq!(t.distance(1, 0), 1);
    assert_eq!(t.join(1, 0), 0);
    let u = t.graft(3, &Tree::closed_corolla(2)).unwrap();
    assert_eq!(u.distance(1, 2), 2);
    assert_eq!(u.join(1, 2), 0);
}

#[test]
fn graft_then_contract_is_composition() {
    let t = Tree::closed_corolla(2)
        .graft(1, &Tree::closed_corolla(2))
        .unwrap();
    assert_eq!(t.contract(1).unwrap(), Tree::closed_corolla(3));
    assert!(Tree::closed_corolla(2)
        .graft(3, &Tree::closed_corolla(1))
        .is_err());
    assert!(Tree::closed_corolla(2)
        .graft(0, &Tree::closed_corolla(1))
        .is_err());
    assert!(Tree::closed_corolla(2).contract(0).is_err());
    let open = Tree::corolla(&[Colour::Open], Colour::Open);
    assert!(Tree::closed_corolla(2).graft(1, &open).is_err());
}

#[test]
fn contract_and_graft_commute() {
    let caps = Caps {
        max_arity: 3,
        max_vertices: 4,
        max_leaves: 8,
    };
    let small: Vec<Tree> = (0..=3)
        .flat_map(|n| enumerate_trees(n, &Constraint::ClosedOnly, caps).unwrap())
        .map(|m| m.tree)
        .filter(|t| t.vertex_count() <= 4)
        .collect();
    let s = Tree::closed_corolla(2);
    let mut checked = 0;
    for t in small.iter().filter(|t| t.vertex_count() >= 2) {
        let paths = t.paths();
        for v in 1..t.vertex_count() {
            let c = t.contract(v).unwrap();
            assert_eq!(c.vertex_count(), t.vertex_count() - 1);
            assert_eq!(c.leaves(), t.leaves());
            for i in 1..=t.leaves() {
                let a = c.graft(i, &s).unwrap();
                let g = t.graft(i, &s).unwrap();
                let gv = g.paths().iter().position(|p| *p == paths[v]).unwrap();
                let b = g.contract(gv).unwrap();
                assert_eq!(a, b, "{t} at {v}, leaf {i}");
                checked += 1;
            }
        }
    }
    assert!(checked > 50);
}

#[test]
fn code_round_trip() {
    let caps = Caps {
        max_arity: 3,
        max_vertices: 3,
        max_leaves: 8,
    };
    let p = Profile::parse("c,o;o").unwrap();
    for m in enumerate_trees(2, &Constraint::Section(p.clone()), caps).unwrap() {
        let (t, marks) = Tree::parse(&m.code()).unwrap();
        assert_eq!(t, m.tree);
        assert_eq!(marks, m.marks);
    }
    assert_eq!(Tree::closed_corolla(2).code(), "2c |c |c");
    assert!(Tree::parse("2c |c").is_err());
    assert!(Tree::parse("2x |c |c").is_err());
}

#[test]
fn all_and_closed_counts() {
    let caps = Caps {
        max_arity: 3,
        max_vertices: 3,
        max_leaves: 8,
    };
    let table = shape_counts(5, 3, 3);
    for n in 0..=5 {
        let closed: u64 = (0..=3).map(|v| table[n][v]).sum();
        let all: u64 = (0..=3).map(|v| table[n][v] << (n + v)).sum();
        let got_c = enumerate_trees(n, &Constraint::ClosedOnly, caps).unwrap();
        let got_a = enumerate_trees(n, &Constraint::All, caps).unwrap();
        assert_eq!(got_c.len() as u64, closed, "closed n={n}");
        assert_eq!(got_a.len() as u64, all, "all n={n}");
    }
}

#[test]
fn binary_and_min_arity_counts() {
    let caps = Caps::default();
    for n in 1..=5 {
        let b = enumerate_trees(n, &Constraint::Binary, caps).unwrap();
        assert_eq!(b.len() as u64, catalan(n - 1), "binary n={n}");
        let s = enumerate_trees(n, &Constraint::MinArity2, caps).unwrap();
        assert_eq!(s.len() as u64, schroeder(n), "min arity n={n}");
        let o = enumerate_trees(n, &Constraint::TreeO, caps).unwrap();
        assert_eq!(o.len() as u64, schroeder(n), "tree_o n={n}");
    }
    let four = enumerate_trees(4, &Constraint::Binary, caps).unwrap();
    assert_eq!(four.len(), 5);
}

#[test]
fn tree_o_colouring_rule() {
    let one = enumerate_trees(1, &Constraint::TreeO, Caps::default()).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].tree, Tree::corolla(&[Colour::Open], Colour::Open));
    for n in 2..=5 {
        for m in enumerate_trees(n, &Constraint::TreeO, Caps::default()).unwrap() {
            let t = &m.tree;
            assert_eq!(t.colour(), Colour::Open);
            let mut leaves = vec![Colour::Closed; n - 1];
            leaves.push(Colour::Open);
            assert_eq!(t.leaf_colours(), leaves);
            for v in t.vertices() {
                let Tree::Vertex { out, inputs } = v else {
                    unreachable!()
                };
                assert!(inputs.len() >= 2);
                let k = inputs.len();
                for (i, s) in inputs.iter().enumerate() {
                    let want = if *out == Colour::Open && i + 1 == k {
                        Colour::Open
                    } else {
                        Colour::Closed
                    };
                    assert_eq!(s.colour(), want);
                }
            }
        }
    }
}

#[test]
fn pearl_and_section_counts() {
    let caps = Caps {
        max_arity: 3,
        max_vertices: 4,
        max_leaves: 8,
    };
    for m in 0..=5 {
        let p = Profile::new(vec![Colour::Closed; m], Colour::Closed);
        let got = enumerate_trees(m, &Constraint::Pearl(p.clone()), caps).unwrap();
        assert_eq!(got.len() as u64, pearl_oracle(m, caps), "pearl m={m}");
        let got = enumerate_trees(m, &Constraint::Section(p), caps).unwrap();
        assert_eq!(got.len() as u64, section_oracle(m, caps), "section m={m}");
    }
}

#[test]
fn pearl_normal_form() {
    let caps = Caps {
        max_arity: 3,
        max_vertices: 4,
        max_leaves: 8,
    };
    for p in ["c,c;c", "c,o;o", "c,c,o;o", "o;o", ";c"] {
        let p = Profile::parse(p).unwrap();
        for mk in enumerate_trees(p.arity(), &Constraint::Pearl(p.clone()), caps).unwrap() {
            let t = &mk.tree;
            let pearl = *mk.marks.iter().next().unwrap();
            let parents = t.parents();
            let below: Vec<_> = (0..t.vertex_count())
                .filter(|&v| t.join(v, pearl) == v && v != pearl)
                .collect();
            assert!(below.len() <= 1, "{mk}");
            let mut above_slots = BTreeSet::new();
            for v in 0..t.vertex_count() {
                if parents[v] == Some(pearl) {
                    assert!(above_slots.insert(t.paths()[v].clone()));
                    assert!(
                        t.arities()[v] == 0
                            || matches!(t.vertices()[v], Tree::Vertex { inputs, .. } if inputs.iter().all(|c| matches!(c, Tree::Leaf(_))))
                    );
                }
            }
        }
    }
}

#[test]
fn section_normal_form() {
    let caps = Caps {
        max_arity: 3,
        max_vertices: 4,
        max_leaves: 8,
    };
    for p in ["c,c;c", "c,o;o", "o;o", ";c", "c;c"] {
        let p = Profile::parse(p).unwrap();
        for mk in enumerate_trees(p.arity(), &Constraint::Section(p.clone()), caps).unwrap() {
            let t = &mk.tree;
            let parents = t.parents();
            for v in 0..t.vertex_count() {
                if mk.marks.contains(&v) {
                    continue;
                }
                let under_pearl = mk.marks.iter().any(|&q| t.join(v, q) == v);
                let Tree::Vertex { inputs, .. } = t.vertices()[v] else {
                    unreachable!()
                };
                if under_pearl {
                    assert_eq!(v, 0, "{mk}");
                    assert!(
                        inputs.iter().enumerate().all(|(i, _)| {
                            let child = (0..t.vertex_count())
                                .find(|&w| parents[w] == Some(0) && t.paths()[w] == vec![i]);
                            child.is_some_and(|w| mk.marks.contains(&w))
                        }),
                        "{mk}"
                    );
                } else if !mk.marks.is_empty() {
                    assert!(mk.marks.contains(&parents[v].unwrap()), "{mk}");
                    assert!(inputs.iter().all(|c| matches!(c, Tree::Leaf(_))), "{mk}");
                }
            }
        }
    }
}

#[test]
fn tr_table() {
    assert_eq!(count_ptrees(0, 0), 1);
    for n in 0..=5 {
        assert_eq!(count_ptrees(n, n), 1, "tr_{n}^{n}");
    }
    for m in 0..=5 {
        for n in 0..=5 {
            assert_eq!(count_ptrees(m, n) as u64, tr_oracle(m, n), "tr_{m}^{n}");
        }
    }
}

#[test]
fn caps_enforced() {
    let caps = Caps {
        max_leaves: 3,
        ..Caps::default()
    };
    assert!(enumerate_trees(4, &Constraint::Binary, caps).is_err());
    let p = Profile::parse("c,c;c").unwrap();
    assert!(enumerate_trees(3, &Constraint::Pearl(p), Caps::default()).is_err());
}

proptest! {
    #[test]
    fn enumeration_sorted_unique(n in 1usize..=5) {
        let list = enumerate_trees(n, &Constraint::MinArity2, Caps::default()).unwrap();
        for w in list.windows(2) {
            let a = (w[0].tree.vertex_count(), w[0].code());
            let b = (w[1].tree.vertex_count(), w[1].code());
            prop_assert!(a < b);
        }
    }

    #[test]
    fn graft_adds_leaves(a in 1usize..4, b in 0usize..4, i in 1usize..4) {
        let t = Tree::closed_corolla(a);
        let s = Tree::closed_corolla(b);
        if i <= a {
            let g = t.graft(i, &s).unwrap();
            prop_assert_eq!(g.leaves(), a + b - 1);
            prop_assert_eq!(g.vertex_count(), 2);
            prop_assert_eq!(g.contract(1).unwrap(), Tree::closed_corolla(a + b - 1));
        }
    }
}
