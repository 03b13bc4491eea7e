//! Planar rooted trees with coloured edges, pearls and sections.
//!
//! A tree is a trunk edge carrying either a bare leaf or a vertex with an
//! ordered list of input subtrees. Vertices are numbered in preorder from
//! the root; a vertex's edge is its output edge.
//!
//! Canonical code: the preorder token list, space separated. A vertex with
//! `k` inputs whose output edge has colour `x` is `kx`; a leaf of colour `x`
//! is `|x`; a marked vertex is prefixed with `*`. So the closed 2-corolla is
//! `2c |c |c` and a pearl 1-corolla over an open edge is `*1o |o`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::seqcore::{Colour, Profile};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    Leaf(Colour),
    Vertex { out: Colour, inputs: Vec<Tree> },
}

pub type VertexId = usize;

impl Tree {
    pub fn leaf(c: Colour) -> Tree {
        Tree::Leaf(c)
    }

    /// Corolla with the given input colours.
    pub fn corolla(inputs: &[Colour], out: Colour) -> Tree {
        Tree::Vertex {
            out,
            inputs: inputs.iter().map(|&c| Tree::Leaf(c)).collect(),
        }
    }

    pub fn closed_corolla(n: usize) -> Tree {
        Tree::corolla(&vec![Colour::Closed; n], Colour::Closed)
    }

    pub fn colour(&self) -> Colour {
        match self {
            Tree::Leaf(c) => *c,
            Tree::Vertex { out, .. } => *out,
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Vertex { inputs, .. } => inputs.iter().map(Tree::leaves).sum(),
        }
    }

    pub fn leaf_colours(&self) -> Vec<Colour> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Colour>) {
        match self {
            Tree::Leaf(c) => out.push(*c),
            Tree::Vertex { inputs, .. } => inputs.iter().for_each(|t| t.collect_leaves(out)),
        }
    }

    pub fn profile(&self) -> Profile {
        Profile::new(self.leaf_colours(), self.colour())
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Vertex { inputs, .. } => 1 + inputs.iter().map(Tree::vertex_count).sum::<usize>(),
        }
    }

    /// Edges between two vertices.
    pub fn inner_edges(&self) -> usize {
        self.vertex_count().saturating_sub(1)
    }

    /// Subtree rooted at each vertex, in preorder.
    pub fn vertices(&self) -> Vec<&Tree> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a Tree, out: &mut Vec<&'a Tree>) {
            if let Tree::Vertex { inputs, .. } = t {
                out.push(t);
                inputs.iter().for_each(|c| go(c, out));
            }
        }
        go(self, &mut out);
        out
    }

    /// Number of inputs of each vertex, in preorder.
    pub fn arities(&self) -> Vec<usize> {
        self.vertices()
            .iter()
            .map(|v| match v {
                Tree::Vertex { inputs, .. } => inputs.len(),
                Tree::Leaf(_) => unreachable!(),
            })
            .collect()
    }

    /// Parent of each vertex (the root has none).
    pub fn parents(&self) -> Vec<Option<VertexId>> {
        let mut out = Vec::new();
        fn go(t: &Tree, parent: Option<VertexId>, out: &mut Vec<Option<VertexId>>) {
            if let Tree::Vertex { inputs, .. } = t {
                let me = out.len();
                out.push(parent);
                inputs.iter().for_each(|c| go(c, Some(me), out));
            }
        }
        go(self, None, &mut out);
        out
    }

    /// Child-index path from the root to each vertex.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        fn go(t: &Tree, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if let Tree::Vertex { inputs, .. } = t {
                out.push(path.clone());
                for (i, c) in inputs.iter().enumerate() {
                    path.push(i);
                    go(c, path, out);
                    path.pop();
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    fn depths(&self) -> Vec<usize> {
        self.paths().iter().map(Vec::len).collect()
    }

    /// First vertex shared by the two root paths.
    pub fn join(&self, v1: VertexId, v2: VertexId) -> VertexId {
        let parents = self.parents();
        let depth = self.depths();
        let (mut a, mut b) = (v1, v2);
        while depth[a] > depth[b] {
            a = parents[a].expect("non-root");
        }
        while depth[b] > depth[a] {
            b = parents[b].expect("non-root");
        }
        while a != b {
            a = parents[a].expect("non-root");
            b = parents[b].expect("non-root");
        }
        a
    }

    /// Edge count of the path through the join.
    pub fn distance(&self, v1: VertexId, v2: VertexId) -> usize {
        let depth = self.depths();
        let j = self.join(v1, v2);
        depth[v1] + depth[v2] - 2 * depth[j]
    }

    /// Replace leaf `i` (1-based) by `s`; colours must agree.
    pub fn graft(&self, i: usize, s: &Tree) -> Result<Tree> {
        let n = self.leaves();
        if i == 0 || i > n {
            return Err(Error::Precondition(format!(
                "leaf {i} out of range 1..={n}"
            )));
        }
        let mut k = i;
        let mut out = self.clone();
        graft_at(&mut out, &mut k, s)?;
        Ok(out)
    }

    /// Merge vertex `v` (not the root) into its parent.
    pub fn contract(&self, v: VertexId) -> Result<Tree> {
        let paths = self.paths();
        let path = paths
            .get(v)
            .filter(|p| !p.is_empty())
            .ok_or_else(|| Error::Precondition(format!("vertex {v} has no inner output edge")))?;
        let mut out = self.clone();
        let (last, up) = path.split_last().expect("nonempty");
        let parent = out.at_path_mut(up);
        let Tree::Vertex { inputs, .. } = parent else {
            unreachable!()
        };
        let Tree::Vertex { inputs: inner, .. } = inputs.remove(*last) else {
            unreachable!()
        };
        for (k, t) in inner.into_iter().enumerate() {
            inputs.insert(last + k, t);
        }
        Ok(out)
    }

    pub fn at_path(&self, path: &[usize]) -> &Tree {
        path.iter().fold(self, |t, &i| match t {
            Tree::Vertex { inputs, .. } => &inputs[i],
            Tree::Leaf(_) => panic!("path through a leaf"),
        })
    }

    pub fn at_path_mut(&mut self, path: &[usize]) -> &mut Tree {
        path.iter().fold(self, |t, &i| match t {
            Tree::Vertex { inputs, .. } => &mut inputs[i],
            Tree::Leaf(_) => panic!("path through a leaf"),
        })
    }

    pub fn code(&self) -> String {
        self.code_marked(&BTreeSet::new())
    }

    /// Code with the vertices in `marks` prefixed by `*`.
    pub fn code_marked(&self, marks: &BTreeSet<VertexId>) -> String {
        let mut toks = Vec::new();
        let mut next = 0;
        fn go(t: &Tree, marks: &BTreeSet<VertexId>, next: &mut usize, toks: &mut Vec<String>) {
            match t {
                Tree::Leaf(c) => toks.push(format!("|{}", c.short())),
                Tree::Vertex { out, inputs } => {
                    let star = if marks.contains(next) { "*" } else { "" };
                    *next += 1;
                    toks.push(format!("{star}{}{}", inputs.len(), out.short()));
                    inputs.iter().for_each(|c| go(c, marks, next, toks));
                }
            }
        }
        go(self, marks, &mut next, &mut toks);
        toks.join(" ")
    }

    /// Inverse of [`Tree::code_marked`].
    pub fn parse(code: &str) -> Result<(Tree, BTreeSet<VertexId>)> {
        let toks: Vec<&str> = code.split_whitespace().collect();
        let mut pos = 0;
        let mut marks = BTreeSet::new();
        let mut next = 0;
        let t = parse_tokens(&toks, &mut pos, &mut marks, &mut next)?;
        if pos != toks.len() {
            return Err(Error::Schema {
                path: format!("token {pos}"),
                message: "trailing tokens".into(),
            });
        }
        Ok((t, marks))
    }
}

fn parse_tokens(
    toks: &[&str],
    pos: &mut usize,
    marks: &mut BTreeSet<VertexId>,
    next: &mut usize,
) -> Result<Tree> {
    let bad = |p: usize, m: &str| Error::Schema {
        path: format!("token {p}"),
        message: m.into(),
    };
    let tok = *toks.get(*pos).ok_or_else(|| bad(*pos, "unexpected end"))?;
    let here = *pos;
    *pos += 1;
    let colour_of = |s: &str| {
        s.chars()
            .last()
            .and_then(|c| Colour::parse(&c.to_string()))
            .ok_or_else(|| bad(here, "bad colour"))
    };
    if let Some(rest) = tok.strip_prefix('|') {
        if rest.len() != 1 {
            return Err(bad(here, "bad leaf"));
        }
        return Ok(Tree::Leaf(colour_of(rest)?));
    }
    let (marked, body) = match tok.strip_prefix('*') {
        Some(b) => (true, b),
        None => (false, tok),
    };
    if body.len() < 2 {
        return Err(bad(here, "bad vertex"));
    }
    let out = colour_of(body)?;
    let k: usize = body[..body.len() - 1]
        .parse()
        .map_err(|_| bad(here, "bad arity"))?;
    if marked {
        marks.insert(*next);
    }
    *next += 1;
    let mut inputs = Vec::with_capacity(k);
    for _ in 0..k {
        inputs.push(parse_tokens(toks, pos, marks, next)?);
    }
    Ok(Tree::Vertex { out, inputs })
}

fn graft_at(t: &mut Tree, k: &mut usize, s: &Tree) -> Result<bool> {
    match t {
        Tree::Leaf(c) => {
            *k -= 1;
            if *k == 0 {
                if *c != s.colour() {
                    return Err(Error::ColourMismatch(format!(
                        "leaf colour {} against trunk colour {}",
                        c.name(),
                        s.colour().name()
                    )));
                }
                *t = s.clone();
                return Ok(true);
            }
            Ok(false)
        }
        Tree::Vertex { inputs, .. } => {
            for c in inputs.iter_mut() {
                if graft_at(c, k, s)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// A tree with a set of marked vertices: one pearl, or a section.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Marked {
    pub tree: Tree,
    pub marks: BTreeSet<VertexId>,
}

impl Marked {
    pub fn code(&self) -> String {
        self.tree.code_marked(&self.marks)
    }

    fn key(&self) -> (usize, String) {
        (self.tree.vertex_count(), self.code())
    }
}

impl fmt::Display for Marked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// Every non-pearl vertex sits next to the pearl.
pub fn is_pearl_tree(t: &Tree, pearl: VertexId) -> bool {
    (0..t.vertex_count()).all(|v| v == pearl || t.distance(v, pearl) == 1)
}

/// Every path from a top (a leaf or a vertex without inputs) down to the
/// trunk meets exactly one marked vertex, and an unmarked vertex on a path
/// through a marked one is adjacent to it. A lone vertex without inputs and
/// without marks is the empty section.
pub fn is_section_tree(t: &Tree, marks: &BTreeSet<VertexId>) -> bool {
    let n = t.vertex_count();
    if n == 0 {
        return false;
    }
    let arities = t.arities();
    if n == 1 && arities[0] == 0 && marks.is_empty() {
        return true;
    }
    let parents = t.parents();
    let below = |mut v: VertexId| {
        let mut count = usize::from(marks.contains(&v));
        while let Some(p) = parents[v] {
            v = p;
            count += usize::from(marks.contains(&v));
        }
        count
    };
    // leaves hang off vertices; a leaf's path is its parent's path
    for v in 0..n {
        let leafy = match t.vertices()[v] {
            Tree::Vertex { inputs, .. } => inputs.iter().any(|c| matches!(c, Tree::Leaf(_))),
            Tree::Leaf(_) => false,
        };
        if (arities[v] == 0 || leafy) && below(v) != 1 {
            return false;
        }
    }
    for v in (0..n).filter(|v| !marks.contains(v)) {
        for &p in marks {
            let j = t.join(v, p);
            if (j == v || j == p) && t.distance(v, p) != 1 {
                return false;
            }
        }
    }
    true
}

/// Families that [`enumerate_trees`] knows how to list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// Every colouring, every arity up to the caps.
    All,
    /// Closed edges only.
    ClosedOnly,
    /// Closed, every vertex with at least two inputs; at one leaf, the
    /// closed 1-corolla.
    MinArity2,
    /// Closed, every vertex with exactly two inputs.
    Binary,
    /// Open trunk, colours forced vertex by vertex, at least two inputs per
    /// vertex; at one leaf, the open 1-corolla.
    TreeO,
    /// Pearl trees of the given profile.
    Pearl(Profile),
    /// Trees with section of the given profile.
    Section(Profile),
}

impl Constraint {
    pub fn parse(s: &str, profile: Option<&str>) -> Result<Constraint> {
        let prof = || {
            profile
                .ok_or_else(|| Error::Precondition(format!("constraint {s} needs a profile")))
                .and_then(Profile::parse)
        };
        Ok(match s {
            "all" => Constraint::All,
            "c_only" | "closed" => Constraint::ClosedOnly,
            "min_arity_2" => Constraint::MinArity2,
            "binary" => Constraint::Binary,
            "tree_o" => Constraint::TreeO,
            "pearl" => Constraint::Pearl(prof()?),
            "section" => Constraint::Section(prof()?),
            other => return Err(Error::Precondition(format!("unknown constraint {other}"))),
        })
    }
}

/// Bounds on enumeration. Families with arity 0 or 1 vertices are infinite
/// without a vertex bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_arity: usize,
    pub max_vertices: usize,
    pub max_leaves: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_arity: 6,
            max_vertices: 4,
            max_leaves: 8,
        }
    }
}

type Memo = HashMap<(usize, usize, Colour), Rc<Vec<Tree>>>;

struct Gen<'a> {
    colours: &'a [Colour],
    arity_ok: &'a dyn Fn(usize) -> bool,
    max_arity: usize,
    memo: Memo,
}

impl Gen<'_> {
    /// Trees with exactly `n` leaves and `v` vertices on a trunk of colour `c`.
    fn exact(&mut self, n: usize, v: usize, c: Colour) -> Rc<Vec<Tree>> {
        if let Some(r) = self.memo.get(&(n, v, c)) {
            return r.clone();
        }
        let mut out = Vec::new();
        if v == 0 {
            if n == 1 {
                out.push(Tree::Leaf(c));
            }
        } else {
            for k in 0..=self.max_arity {
                if !(self.arity_ok)(k) {
                    continue;
                }
                let mut acc = Vec::new();
                self.children(k, n, v - 1, &mut Vec::new(), &mut acc);
                for inputs in acc {
                    out.push(Tree::Vertex { out: c, inputs });
                }
            }
        }
        let r = Rc::new(out);
        self.memo.insert((n, v, c), r.clone());
        r
    }

    fn children(
        &mut self,
        k: usize,
        n: usize,
        v: usize,
        pre: &mut Vec<Tree>,
        acc: &mut Vec<Vec<Tree>>,
    ) {
        if k == 0 {
            if n == 0 && v == 0 {
                acc.push(pre.clone());
            }
            return;
        }
        for ni in 0..=n {
            for vi in 0..=v {
                if vi == 0 && ni != 1 {
                    continue;
                }
                for &c in self.colours {
                    let subs = self.exact(ni, vi, c);
                    for s in subs.iter() {
                        pre.push(s.clone());
                        self.children(k - 1, n - ni, v - vi, pre, acc);
                        pre.pop();
                    }
                }
            }
        }
    }
}

fn all_shapes(
    n: usize,
    colours: &[Colour],
    arity_ok: &dyn Fn(usize) -> bool,
    caps: Caps,
) -> Vec<Tree> {
    let mut g = Gen {
        colours,
        arity_ok,
        max_arity: caps.max_arity,
        memo: HashMap::new(),
    };
    let mut out = Vec::new();
    for v in 0..=caps.max_vertices {
        for &c in colours {
            out.extend(g.exact(n, v, c).iter().cloned());
        }
    }
    out
}

/// Forced colouring of a closed-shape tree with an open trunk.
fn colour_tree_o(t: &Tree, c: Colour) -> Tree {
    match t {
        Tree::Leaf(_) => Tree::Leaf(c),
        Tree::Vertex { inputs, .. } => {
            let k = inputs.len();
            Tree::Vertex {
                out: c,
                inputs: inputs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let ci = if c == Colour::Open && i + 1 == k {
                            Colour::Open
                        } else {
                            Colour::Closed
                        };
                        colour_tree_o(s, ci)
                    })
                    .collect(),
            }
        }
    }
}

/// Complete, duplicate-free list in canonical order: vertex count, then code.
pub fn enumerate_trees(n: usize, constraint: &Constraint, caps: Caps) -> Result<Vec<Marked>> {
    if n > caps.max_leaves {
        return Err(Error::SizeCap {
            what: "tree leaves".into(),
            needed: n as u128,
            cap: caps.max_leaves as u128,
        });
    }
    let closed = [Colour::Closed];
    let both = Colour::ALL;
    let plain = |ts: Vec<Tree>| -> Vec<Marked> {
        ts.into_iter()
            .map(|tree| Marked {
                tree,
                marks: BTreeSet::new(),
            })
            .collect()
    };
    let unbounded = Caps {
        max_vertices: n.saturating_sub(1).max(1),
        max_arity: caps.max_arity.max(n),
        ..caps
    };
    let mut out = match constraint {
        Constraint::All => plain(all_shapes(n, &both, &|_| true, caps)),
        Constraint::ClosedOnly => plain(all_shapes(n, &closed, &|_| true, caps)),
        Constraint::Binary => plain(all_shapes(n, &closed, &|k| k == 2, unbounded)),
        Constraint::MinArity2 | Constraint::TreeO => {
            let mut ts = if n == 1 {
                vec![Tree::closed_corolla(1)]
            } else {
                all_shapes(n, &closed, &|k| k >= 2, unbounded)
            };
            ts.retain(|t| t.vertex_count() > 0);
            if *constraint == Constraint::TreeO {
                ts = ts.iter().map(|t| colour_tree_o(t, Colour::Open)).collect();
            }
            plain(ts)
        }
        Constraint::Pearl(p) | Constraint::Section(p) => {
            if p.arity() != n {
                return Err(Error::Precondition(format!(
                    "profile {p} has arity {}, not {n}",
                    p.arity()
                )));
            }
            let pearl = matches!(constraint, Constraint::Pearl(_));
            marked_trees(p, &Colour::ALL, &|_| true, caps, pearl)
        }
    };
    out.sort_by_cached_key(Marked::key);
    out.dedup();
    Ok(out)
}

fn marked_trees(
    p: &Profile,
    colours: &[Colour],
    arity_ok: &dyn Fn(usize) -> bool,
    caps: Caps,
    pearl: bool,
) -> Vec<Marked> {
    let shapes = all_shapes(p.arity(), colours, arity_ok, caps);
    let mut out = Vec::new();
    for t in shapes.into_iter().filter(|t| t.profile() == *p) {
        let nv = t.vertex_count();
        if pearl {
            for v in (0..nv).filter(|&v| is_pearl_tree(&t, v)) {
                out.push(Marked {
                    tree: t.clone(),
                    marks: BTreeSet::from([v]),
                });
            }
        } else {
            for mask in 0u64..(1 << nv) {
                let marks: BTreeSet<VertexId> = (0..nv).filter(|v| mask >> v & 1 == 1).collect();
                if is_section_tree(&t, &marks) {
                    out.push(Marked {
                        tree: t.clone(),
                        marks,
                    });
                }
            }
        }
    }
    out
}

/// Closed pearl trees with `m` leaves and a pearl of arity `n`, every other
/// vertex having at least two inputs.
pub fn count_ptrees(m: usize, n: usize) -> usize {
    ptrees(m, n).len()
}

/// The trees counted by [`count_ptrees`], in canonical order.
pub fn ptrees(m: usize, n: usize) -> Vec<Marked> {
    // a pearl, one vertex below it and one above each of its inputs
    let caps = Caps {
        max_arity: (m + 1).max(n).max(2),
        max_vertices: n + 2,
        max_leaves: m,
    };
    let p = Profile::new(vec![Colour::Closed; m], Colour::Closed);
    let mut out: Vec<Marked> =
        marked_trees(&p, &[Colour::Closed], &|k| k >= 2 || k == n, caps, true)
            .into_iter()
            .filter(|mk| {
                let ar = mk.tree.arities();
                let pearl = *mk.marks.iter().next().expect("one pearl");
                ar[pearl] == n && ar.iter().enumerate().all(|(v, &k)| v == pearl || k >= 2)
            })
            .collect();
    out.sort_by_cached_key(Marked::key);
    out
}
