//! Finite semi-cosimplicial sets, the box product, monoids and modules for
//! it, and the passage between these and (infinitesimal) bimodules over the
//! operad of monoid actions.
//!
//! Levels of a pair built from a two-coloured structure: closed level `n` is
//! the closed arity-`n` part, open level `n` the open arity-`n + 1` part.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::algebra::builtin::{builtin_act, builtin_as, star_closed, star_open};
use crate::algebra::indexed::Id;
use crate::algebra::modules::{BimoduleTables, InfBimoduleTables};
use crate::error::{Error, Result};
use crate::report::AxiomReport;
use crate::seqcore::{
    profile_closed, profile_open, Colour, Elem, FiniteSSequence, Profile, SSeqMap,
};
use crate::unionfind::UnionFind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiCosimplicialSet {
    levels: Vec<Vec<String>>,
    /// `cofaces[n][i][x]` is `d^i x` at level `n + 1`, for `i` in `0..=n+1`.
    cofaces: Vec<Vec<Vec<usize>>>,
}

impl SemiCosimplicialSet {
    pub fn new(levels: Vec<Vec<String>>, cofaces: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Precondition("no levels".into()));
        }
        if cofaces.len() + 1 != levels.len() {
            return Err(Error::Precondition(format!(
                "{} levels need {} coface levels, got {}",
                levels.len(),
                levels.len() - 1,
                cofaces.len()
            )));
        }
        for (n, faces) in cofaces.iter().enumerate() {
            if faces.len() != n + 2 {
                return Err(Error::Precondition(format!(
                    "level {n} needs {} cofaces",
                    n + 2
                )));
            }
            for (i, f) in faces.iter().enumerate() {
                if f.len() != levels[n].len() || f.iter().any(|&y| y >= levels[n + 1].len()) {
                    return Err(Error::Precondition(format!(
                        "coface d^{i} at level {n} is not a map"
                    )));
                }
            }
        }
        Ok(SemiCosimplicialSet { levels, cofaces })
    }

    /// The constant one-point object.
    pub fn point(max_level: usize) -> Self {
        SemiCosimplicialSet {
            levels: vec![vec!["*".into()]; max_level + 1],
            cofaces: (0..max_level).map(|n| vec![vec![0]; n + 2]).collect(),
        }
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn size(&self, n: usize) -> usize {
        self.levels[n].len()
    }

    pub fn labels(&self, n: usize) -> &[String] {
        &self.levels[n]
    }

    pub fn label(&self, n: usize, x: usize) -> &str {
        &self.levels[n][x]
    }

    pub fn index(&self, n: usize, label: &str) -> Option<usize> {
        self.levels.get(n)?.iter().position(|l| l == label)
    }

    /// `d^i` on element `x` of level `n`.
    pub fn d(&self, n: usize, i: usize, x: usize) -> usize {
        self.cofaces[n][i][x]
    }

    pub fn set_coface(&mut self, n: usize, i: usize, x: usize, y: usize) {
        self.cofaces[n][i][x] = y;
    }

    /// `(d^0)^k` starting at level `n`.
    pub fn d0_pow(&self, n: usize, k: usize, x: usize) -> usize {
        (0..k).fold(x, |x, s| self.d(n + s, 0, x))
    }

    /// `k` successive top cofaces starting at level `n`.
    pub fn top_pow(&self, n: usize, k: usize, x: usize) -> usize {
        (0..k).fold(x, |x, s| self.d(n + s, n + s + 1, x))
    }

    /// `(d^i)^k` starting at level `n`.
    pub fn di_pow(&self, n: usize, i: usize, k: usize, x: usize) -> usize {
        (0..k).fold(x, |x, s| self.d(n + s, i, x))
    }

    /// Same object with every level sorted by label.
    pub fn canonical(&self) -> Self {
        let orders: Vec<Vec<usize>> = self
            .levels
            .iter()
            .map(|l| {
                let mut o: Vec<usize> = (0..l.len()).collect();
                o.sort_by(|&a, &b| l[a].cmp(&l[b]));
                o
            })
            .collect();
        let new_pos: Vec<Vec<usize>> = orders
            .iter()
            .map(|o| {
                let mut p = vec![0; o.len()];
                for (k, &old) in o.iter().enumerate() {
                    p[old] = k;
                }
                p
            })
            .collect();
        SemiCosimplicialSet {
            levels: orders
                .iter()
                .enumerate()
                .map(|(n, o)| o.iter().map(|&k| self.levels[n][k].clone()).collect())
                .collect(),
            cofaces: self
                .cofaces
                .iter()
                .enumerate()
                .map(|(n, faces)| {
                    faces
                        .iter()
                        .map(|f| {
                            orders[n]
                                .iter()
                                .map(|&old| new_pos[n + 1][f[old]])
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn truncate(&self, max_level: usize) -> Self {
        let m = max_level.min(self.max_level());
        SemiCosimplicialSet {
            levels: self.levels[..=m].to_vec(),
            cofaces: self.cofaces[..m].to_vec(),
        }
    }

    pub fn to_doc(&self) -> CosimpDoc {
        CosimpDoc {
            levels: self.levels.clone(),
            cofaces: self
                .cofaces
                .iter()
                .enumerate()
                .map(|(n, faces)| {
                    faces
                        .iter()
                        .map(|f| {
                            f.iter()
                                .enumerate()
                                .map(|(x, &y)| {
                                    (self.levels[n][x].clone(), self.levels[n + 1][y].clone())
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &CosimpDoc) -> Result<Self> {
        let levels = doc.levels.clone();
        let mut cofaces = Vec::new();
        for (n, faces) in doc.cofaces.iter().enumerate() {
            let mut lv = Vec::new();
            for (i, f) in faces.iter().enumerate() {
                let path = format!("$.cofaces[{n}][{i}]");
                let src = levels.get(n).ok_or_else(|| Error::Schema {
                    path: path.clone(),
                    message: "no such level".into(),
                })?;
                let dst = levels.get(n + 1).ok_or_else(|| Error::Schema {
                    path: path.clone(),
                    message: "no next level".into(),
                })?;
                let mut map = Vec::with_capacity(src.len());
                for x in src {
                    let y = f.get(x).ok_or_else(|| Error::Schema {
                        path: format!("{path}.{x}"),
                        message: "missing".into(),
                    })?;
                    let yi = dst
                        .iter()
                        .position(|l| l == y)
                        .ok_or_else(|| Error::Schema {
                            path: format!("{path}.{x}"),
                            message: format!("unknown target {y}"),
                        })?;
                    map.push(yi);
                }
                lv.push(map);
            }
            cofaces.push(lv);
        }
        SemiCosimplicialSet::new(levels, cofaces)
    }

    pub fn store(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("serializable")
    }

    pub fn load(document: &str) -> Result<Self> {
        let doc: CosimpDoc =
            serde_json::from_str(document).map_err(|e| Error::Json(e.to_string()))?;
        SemiCosimplicialSet::from_doc(&doc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosimpDoc {
    pub levels: Vec<Vec<String>>,
    pub cofaces: Vec<Vec<BTreeMap<String, String>>>,
}

/// `d^j d^i = d^i d^{j-1}` for all `i < j`.
pub fn check_semicosimplicial(x: &SemiCosimplicialSet) -> AxiomReport {
    let mut rep = AxiomReport::new();
    for n in 0..x.max_level().saturating_sub(1) {
        for j in 1..=n + 2 {
            for i in 0..j {
                for e in 0..x.size(n) {
                    let lhs = x.d(n + 1, j, x.d(n, i, e));
                    let rhs = x.d(n + 1, i, x.d(n, j - 1, e));
                    rep.expect(lhs == rhs, "cosimplicial", || {
                        format!(
                            "d^{j} d^{i} vs d^{i} d^{} at level {n} on {}",
                            j - 1,
                            x.label(n, e)
                        )
                    });
                }
            }
        }
    }
    rep.finish()
}

/// Level-wise map commuting with every coface.
pub fn check_cosimp_map(
    f: &[Vec<usize>],
    x: &SemiCosimplicialSet,
    y: &SemiCosimplicialSet,
) -> AxiomReport {
    let mut rep = AxiomReport::new();
    let top = x.max_level().min(y.max_level());
    if f.len() <= top {
        rep.record(
            "map-defined",
            format!("{} levels given, {} needed", f.len(), top + 1),
        );
        return rep.finish();
    }
    for n in 0..=top {
        if f[n].len() != x.size(n) || f[n].iter().any(|&v| v >= y.size(n)) {
            rep.record("map-defined", format!("level {n}"));
            return rep.finish();
        }
    }
    for n in 0..top {
        for i in 0..=n + 1 {
            for e in 0..x.size(n) {
                let a = f[n + 1][x.d(n, i, e)];
                let b = y.d(n, i, f[n][e]);
                rep.expect(a == b, "map-coface", || {
                    format!("d^{i} at level {n} on {}", x.label(n, e))
                });
            }
        }
    }
    rep.finish()
}

/// Closed part, open part, and the map `h` between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosimplicialPair {
    pub closed: SemiCosimplicialSet,
    pub open: SemiCosimplicialSet,
    pub h: Vec<Vec<usize>>,
}

impl CosimplicialPair {
    pub fn check(&self) -> AxiomReport {
        let mut rep = check_semicosimplicial(&self.closed);
        rep.merge(check_semicosimplicial(&self.open));
        rep.merge(check_cosimp_map(&self.h, &self.closed, &self.open));
        rep.finish()
    }
}

fn need(ix: &crate::algebra::indexed::Indexed, e: &Elem) -> Result<Id> {
    ix.id(e)
        .ok_or_else(|| Error::Precondition(format!("the acting operad lacks {e}")))
}

fn level_labels(seq: &FiniteSSequence, p: &Profile) -> Vec<String> {
    seq.elements(p).to_vec()
}

/// Cofaces and `h` read off the infinitesimal actions.
pub fn derive_pair_from_infbimodule(m: &InfBimoduleTables) -> Result<CosimplicialPair> {
    let max = m.max_arity();
    if max < 1 {
        return Err(Error::Precondition("maxArity must be at least 1".into()));
    }
    let ox = m.over().indexed();
    let two = need(ox, &star_closed(2))?;
    let two_o = need(ox, &star_open(2))?;
    let ix = m.indexed();
    let seq = m.carrier();
    let closed_levels: Vec<Vec<String>> = (0..=max)
        .map(|n| level_labels(seq, &profile_closed(n)))
        .collect();
    let open_levels: Vec<Vec<String>> = (0..max)
        .map(|n| level_labels(seq, &profile_open(n)))
        .collect();
    let id_c = |n: usize, x: usize| {
        ix.id_at(&profile_closed(n), &closed_levels[n][x])
            .expect("carrier")
    };
    let id_o = |n: usize, x: usize| {
        ix.id_at(&profile_open(n), &open_levels[n][x])
            .expect("carrier")
    };
    let pos_c = |n: usize, z: Option<Id>| -> Result<usize> {
        let z = z.ok_or_else(|| Error::Undefined(format!("action into closed level {n}")))?;
        Ok(closed_levels[n]
            .iter()
            .position(|l| *l == ix.elem(z).label)
            .expect("level"))
    };
    let pos_o = |n: usize, z: Option<Id>| -> Result<usize> {
        let z = z.ok_or_else(|| Error::Undefined(format!("action into open level {n}")))?;
        Ok(open_levels[n]
            .iter()
            .position(|l| *l == ix.elem(z).label)
            .expect("level"))
    };

    let mut closed_faces = Vec::new();
    for n in 0..max {
        let mut faces = Vec::new();
        for i in 0..=n + 1 {
            let mut f = Vec::new();
            for x in 0..closed_levels[n].len() {
                let id = id_c(n, x);
                let z = if i == 0 {
                    m.left_id(two, 2, id)
                } else if i == n + 1 {
                    m.left_id(two, 1, id)
                } else {
                    m.right_id(id, i, two)
                };
                f.push(pos_c(n + 1, z)?);
            }
            faces.push(f);
        }
        closed_faces.push(faces);
    }
    let mut open_faces = Vec::new();
    for n in 0..max.saturating_sub(1) {
        let mut faces = Vec::new();
        for i in 0..=n + 1 {
            let mut f = Vec::new();
            for x in 0..open_levels[n].len() {
                let id = id_o(n, x);
                let z = if i == 0 {
                    m.left_id(two_o, 2, id)
                } else if i == n + 1 {
                    m.right_id(id, n + 1, two_o)
                } else {
                    m.right_id(id, i, two)
                };
                f.push(pos_o(n + 1, z)?);
            }
            faces.push(f);
        }
        open_faces.push(faces);
    }
    let mut h = Vec::new();
    for n in 0..max {
        let mut f = Vec::new();
        for x in 0..closed_levels[n].len() {
            f.push(pos_o(n, m.left_id(two_o, 1, id_c(n, x)))?);
        }
        h.push(f);
    }
    Ok(CosimplicialPair {
        closed: SemiCosimplicialSet::new(closed_levels, closed_faces)?,
        open: SemiCosimplicialSet::new(open_levels, open_faces)?,
        h,
    })
}

/// `*k ∘_j x` for `x` at level `n`: top cofaces for the inputs after `x`,
/// then `d^0` for those before.
fn left_closed(x: &SemiCosimplicialSet, k: usize, j: usize, n: usize, e: usize) -> usize {
    let after = x.top_pow(n, k - j, e);
    x.d0_pow(n + k - j, j - 1, after)
}

fn closed_sequence(x: &SemiCosimplicialSet) -> Result<FiniteSSequence> {
    let mut seq = FiniteSSequence::new(&[Colour::Closed], x.max_level());
    for n in 0..=x.max_level() {
        for l in x.labels(n) {
            seq.insert(profile_closed(n), l.clone())?;
        }
    }
    Ok(seq)
}

/// Infinitesimal bimodule over the strict associative operad on a single
/// semi-cosimplicial set, level `n` in arity `n`.
pub fn as_infbimodule_from_set(x: &SemiCosimplicialSet) -> Result<InfBimoduleTables> {
    let max = x.max_level();
    if max < 2 {
        return Err(Error::Precondition("maxLevel must be at least 2".into()));
    }
    let over = builtin_as(true, max);
    let seq = closed_sequence(x)?;
    let mut m = InfBimoduleTables::new(over, seq);
    let ix = m.indexed().clone();
    let ox = m.over().indexed().clone();
    let at = |id: Id| {
        let n = ix.arity(id);
        (n, x.index(n, &ix.elem(id).label).expect("level"))
    };
    let id_of = |n: usize, e: usize| {
        ix.id_at(&profile_closed(n), x.label(n, e))
            .expect("carrier")
    };
    for (a, j, mid) in m.left_triples() {
        let (n, e) = at(mid);
        let k = ox.arity(a);
        let z = left_closed(x, k, j, n, e);
        m.set_left_id(a, j, mid, id_of(n + k - 1, z));
    }
    for (mid, i, a) in m.right_triples() {
        let (n, e) = at(mid);
        let k = ox.arity(a);
        m.set_right_id(mid, i, a, id_of(n + k - 1, x.di_pow(n, i, k - 1, e)));
    }
    Ok(m)
}

/// Inverse of [`derive_pair_from_infbimodule`] on structures whose only
/// profiles are the closed and open ones.
pub fn infbimodule_from_pair(p: &CosimplicialPair) -> Result<InfBimoduleTables> {
    let max = p.closed.max_level();
    if p.open.max_level() + 1 != max {
        return Err(Error::TypeViolation(format!(
            "open part must stop one level below the closed part ({} vs {max})",
            p.open.max_level()
        )));
    }
    if p.h.len() != max
        || p.h
            .iter()
            .enumerate()
            .any(|(n, f)| f.len() != p.closed.size(n))
    {
        return Err(Error::TypeViolation(
            "h is not defined on every open level".into(),
        ));
    }
    if max < 2 {
        return Err(Error::Precondition("maxLevel must be at least 2".into()));
    }
    let over = builtin_act(false, max);
    let mut seq = FiniteSSequence::two_coloured(max);
    for n in 0..=max {
        for l in p.closed.labels(n) {
            seq.insert(profile_closed(n), l.clone())?;
        }
    }
    for n in 0..max {
        for l in p.open.labels(n) {
            seq.insert(profile_open(n), l.clone())?;
        }
    }
    let mut m = InfBimoduleTables::new(over, seq);
    let ix = m.indexed().clone();
    let ox = m.over().indexed().clone();
    let at = |id: Id| {
        let e = ix.elem(id);
        match e.output() {
            Colour::Closed => (
                e.arity(),
                p.closed.index(e.arity(), &e.label).expect("level"),
            ),
            Colour::Open => (
                e.arity() - 1,
                p.open.index(e.arity() - 1, &e.label).expect("level"),
            ),
        }
    };
    let closed_id = |n: usize, e: usize| {
        ix.id_at(&profile_closed(n), p.closed.label(n, e))
            .expect("carrier")
    };
    let open_id = |n: usize, e: usize| {
        ix.id_at(&profile_open(n), p.open.label(n, e))
            .expect("carrier")
    };
    for (a, j, mid) in m.left_triples() {
        let k = ox.arity(a);
        let (n, e) = at(mid);
        let z = match (ox.output(a), ix.output(mid)) {
            (Colour::Closed, _) => closed_id(n + k - 1, left_closed(&p.closed, k, j, n, e)),
            (Colour::Open, Colour::Open) => open_id(n + k - 1, p.open.d0_pow(n, k - 1, e)),
            (Colour::Open, Colour::Closed) => {
                let inner = left_closed(&p.closed, k - 1, j, n, e);
                let lvl = n + k - 2;
                open_id(lvl, p.h[lvl][inner])
            }
        };
        m.set_left_id(a, j, mid, z);
    }
    for (mid, i, a) in m.right_triples() {
        let k = ox.arity(a);
        let (n, e) = at(mid);
        let z = match ix.output(mid) {
            Colour::Closed => closed_id(n + k - 1, p.closed.di_pow(n, i, k - 1, e)),
            Colour::Open if i == n + 1 => open_id(n + k - 1, p.open.top_pow(n, k - 1, e)),
            Colour::Open => open_id(n + k - 1, p.open.di_pow(n, i, k - 1, e)),
        };
        m.set_right_id(mid, i, a, z);
    }
    Ok(m)
}

/// The open family as an infinitesimal bimodule over the strict
/// associative operad, open level `n` in arity `n`.
pub fn mo_structure(m: &InfBimoduleTables) -> Result<InfBimoduleTables> {
    let pair = derive_pair_from_infbimodule(m)?;
    as_infbimodule_from_set(&pair.open)
}

/// `X ⊠ Y` with the class bookkeeping needed to map pairs to classes.
#[derive(Clone, Debug)]
pub struct BoxProduct {
    pub set: SemiCosimplicialSet,
    /// Per level, the class of `(p, x, y)`.
    class_of: Vec<HashMap<(usize, usize, usize), usize>>,
    /// Per level and class, its members in increasing order.
    members: Vec<Vec<Vec<(usize, usize, usize)>>>,
}

impl BoxProduct {
    pub fn class(&self, m: usize, p: usize, x: usize, y: usize) -> usize {
        self.class_of[m][&(p, x, y)]
    }

    pub fn members(&self, m: usize, c: usize) -> &[(usize, usize, usize)] {
        &self.members[m][c]
    }

    pub fn classes(&self, m: usize) -> usize {
        self.members[m].len()
    }
}

/// Level-wise quotient of the concatenations by `(x, d^0 y) ~ (d^{|x|+1} x, y)`.
pub fn box_product(x: &SemiCosimplicialSet, y: &SemiCosimplicialSet) -> Result<BoxProduct> {
    let max = x.max_level().min(y.max_level());
    let mut class_of = Vec::new();
    let mut members = Vec::new();
    let mut levels = Vec::new();
    for m in 0..=max {
        let mut all = Vec::new();
        for p in 0..=m {
            let q = m - p;
            for xi in 0..x.size(p) {
                for yi in 0..y.size(q) {
                    all.push((p, xi, yi));
                }
            }
        }
        let pos: HashMap<(usize, usize, usize), usize> =
            all.iter().enumerate().map(|(k, t)| (*t, k)).collect();
        let mut uf = UnionFind::new(all.len());
        if m >= 1 {
            for p in 0..m {
                let q = m - p - 1;
                for xi in 0..x.size(p) {
                    for yi in 0..y.size(q) {
                        let a = pos[&(p, xi, y.d(q, 0, yi))];
                        let b = pos[&(p + 1, x.d(p, p + 1, xi), yi)];
                        uf.union(a, b);
                    }
                }
            }
        }
        let (of, count) = uf.classes();
        let mut mem = vec![Vec::new(); count];
        let mut cls = HashMap::with_capacity(all.len());
        for (k, t) in all.iter().enumerate() {
            mem[of[k]].push(*t);
            cls.insert(*t, of[k]);
        }
        let labels: Vec<String> = mem
            .iter()
            .map(|ms: &Vec<(usize, usize, usize)>| {
                let (p, xi, yi) = ms[0];
                format!("({}|{})", x.label(p, xi), y.label(m - p, yi))
            })
            .collect();
        levels.push(labels);
        class_of.push(cls);
        members.push(mem);
    }
    let mut cofaces = Vec::new();
    for m in 0..max {
        let mut faces = Vec::new();
        for i in 0..=m + 1 {
            let mut f = Vec::with_capacity(members[m].len());
            for (c, ms) in members[m].iter().enumerate() {
                let mut target = None;
                for &(p, xi, yi) in ms {
                    let q = m - p;
                    let t = if i <= p {
                        class_of[m + 1][&(p + 1, x.d(p, i, xi), yi)]
                    } else {
                        class_of[m + 1][&(p, xi, y.d(q, i - p, yi))]
                    };
                    match target {
                        None => target = Some(t),
                        Some(s) if s != t => {
                            return Err(Error::IllDefinedCoface {
                                level: m,
                                face: i,
                                class: levels[m][c].clone(),
                            })
                        }
                        _ => {}
                    }
                }
                f.push(target.expect("classes are nonempty"));
            }
            faces.push(f);
        }
        cofaces.push(faces);
    }
    Ok(BoxProduct {
        set: SemiCosimplicialSet::new(levels, cofaces)?,
        class_of,
        members,
    })
}

/// Unit isomorphisms `e ⊠ X → X` and `X ⊠ e → X`: bijective on every
/// level and commuting with cofaces.
pub fn check_unit_laws(x: &SemiCosimplicialSet) -> Result<AxiomReport> {
    let e = SemiCosimplicialSet::point(x.max_level());
    let mut rep = AxiomReport::new();
    for (side, bx) in [
        ("left", box_product(&e, x)?),
        ("right", box_product(x, &e)?),
    ] {
        let mut f = Vec::new();
        for m in 0..=bx.set.max_level() {
            let mut level = Vec::new();
            for c in 0..bx.classes(m) {
                let (p, xi, yi) = bx.members(m, c)[0];
                let v = if side == "left" {
                    x.d0_pow(m - p, p, yi)
                } else {
                    x.top_pow(p, m - p, xi)
                };
                level.push(v);
            }
            let mut seen = level.clone();
            seen.sort_unstable();
            seen.dedup();
            rep.expect(
                seen.len() == level.len() && level.len() == x.size(m),
                "unit-bijective",
                || {
                    format!(
                        "{side} unit at level {m}: {} classes onto {} elements",
                        level.len(),
                        x.size(m)
                    )
                },
            );
            f.push(level);
        }
        let mut r = check_cosimp_map(&f, &bx.set, x);
        for v in &mut r.violations {
            v.axiom = format!("unit-{side}-{}", v.axiom);
        }
        rep.merge(r);
    }
    Ok(rep.finish())
}

/// `mult[p][q][x * |X^q| + y]`, defined for `p + q` within the bound.
pub type PairTable = Vec<Vec<Vec<usize>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxMonoid {
    pub x: SemiCosimplicialSet,
    pub mult: PairTable,
    /// The unit `e → X`, one element per level.
    pub unit: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxModule {
    pub a: SemiCosimplicialSet,
    pub act: PairTable,
}

fn pair_at(
    t: &PairTable,
    y: &SemiCosimplicialSet,
    p: usize,
    q: usize,
    xi: usize,
    yi: usize,
) -> usize {
    t[p][q][xi * y.size(q) + yi]
}

/// `t` is constant on box classes and commutes with the box cofaces.
fn check_pairing(
    rep: &mut AxiomReport,
    name: &str,
    t: &PairTable,
    x: &SemiCosimplicialSet,
    y: &SemiCosimplicialSet,
    z: &SemiCosimplicialSet,
) -> Result<()> {
    let bx = box_product(x, y)?;
    let max = bx.set.max_level().min(z.max_level());
    let mut on_class = Vec::new();
    for m in 0..=max {
        let mut level = Vec::new();
        for c in 0..bx.classes(m) {
            let ms = bx.members(m, c);
            let (p0, x0, y0) = ms[0];
            let v = pair_at(t, y, p0, m - p0, x0, y0);
            for &(p, xi, yi) in &ms[1..] {
                let w = pair_at(t, y, p, m - p, xi, yi);
                rep.expect(v == w, &format!("{name}-class"), || {
                    format!(
                        "({}|{}) and ({}|{}) at level {m}",
                        x.label(p0, x0),
                        y.label(m - p0, y0),
                        x.label(p, xi),
                        y.label(m - p, yi)
                    )
                });
            }
            level.push(v);
        }
        on_class.push(level);
    }
    let mut r = check_cosimp_map(&on_class, &bx.set.truncate(max), z);
    for v in &mut r.violations {
        v.axiom = format!("{name}-{}", v.axiom);
    }
    rep.merge(r);
    Ok(())
}

/// Monoid laws for `mult` on `X ⊠ X`.
pub fn check_box_monoid(mo: &BoxMonoid) -> Result<AxiomReport> {
    let x = &mo.x;
    let max = x.max_level();
    let mut rep = check_semicosimplicial(x);
    check_pairing(&mut rep, "mult", &mo.mult, x, x, x)?;
    // unit is a cosimplicial map from the point
    for n in 0..max {
        for i in 0..=n + 1 {
            rep.expect(x.d(n, i, mo.unit[n]) == mo.unit[n + 1], "unit-map", || {
                format!("d^{i} of the unit at level {n}")
            });
        }
    }
    for p in 0..=max {
        for q in 0..=max - p {
            for e in 0..x.size(q) {
                let l = pair_at(&mo.mult, x, p, q, mo.unit[p], e);
                rep.expect(l == x.d0_pow(q, p, e), "unit-left", || {
                    format!("unit_{p} · {}", x.label(q, e))
                });
            }
            for e in 0..x.size(p) {
                let r = pair_at(&mo.mult, x, p, q, e, mo.unit[q]);
                rep.expect(r == x.top_pow(p, q, e), "unit-right", || {
                    format!("{} · unit_{q}", x.label(p, e))
                });
            }
        }
    }
    for p in 0..=max {
        for q in 0..=max - p {
            for r in 0..=max - p - q {
                for a in 0..x.size(p) {
                    for b in 0..x.size(q) {
                        let ab = pair_at(&mo.mult, x, p, q, a, b);
                        for c in 0..x.size(r) {
                            let lhs = pair_at(&mo.mult, x, p + q, r, ab, c);
                            let bc = pair_at(&mo.mult, x, q, r, b, c);
                            let rhs = pair_at(&mo.mult, x, p, q + r, a, bc);
                            rep.expect(lhs == rhs, "mult-associative", || {
                                format!("{} · {} · {}", x.label(p, a), x.label(q, b), x.label(r, c))
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(rep.finish())
}

/// Left module laws for `act` over `mo`.
pub fn check_box_module(mo: &BoxMonoid, md: &BoxModule) -> Result<AxiomReport> {
    let x = &mo.x;
    let a = &md.a;
    let max = a.max_level().min(x.max_level());
    let mut rep = check_semicosimplicial(a);
    check_pairing(&mut rep, "act", &md.act, &x.truncate(max), a, a)?;
    for p in 0..=max {
        for q in 0..=max - p {
            for e in 0..a.size(q) {
                let l = pair_at(&md.act, a, p, q, mo.unit[p], e);
                rep.expect(l == a.d0_pow(q, p, e), "act-unit", || {
                    format!("unit_{p} · {}", a.label(q, e))
                });
            }
        }
    }
    for p in 0..=max {
        for q in 0..=max - p {
            for r in 0..=max - p - q {
                for s in 0..x.size(p) {
                    for t in 0..x.size(q) {
                        let st = pair_at(&mo.mult, x, p, q, s, t);
                        for u in 0..a.size(r) {
                            let lhs = pair_at(&md.act, a, p + q, r, st, u);
                            let tu = pair_at(&md.act, a, q, r, t, u);
                            let rhs = pair_at(&md.act, a, p, q + r, s, tu);
                            rep.expect(lhs == rhs, "act-associative", || {
                                format!("{} · {} · {}", x.label(p, s), x.label(q, t), a.label(r, u))
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(rep.finish())
}

/// `h` is a cosimplicial map and `h(x · y) = x · h(y)`.
pub fn check_module_map(mo: &BoxMonoid, md: &BoxModule, h: &[Vec<usize>]) -> AxiomReport {
    let x = &mo.x;
    let a = &md.a;
    let max = a.max_level().min(x.max_level());
    let mut rep = check_cosimp_map(h, &x.truncate(max), a);
    if !rep.passed() {
        return rep;
    }
    for p in 0..=max {
        for q in 0..=max - p {
            for s in 0..x.size(p) {
                for t in 0..x.size(q) {
                    let lhs = h[p + q][pair_at(&mo.mult, x, p, q, s, t)];
                    let rhs = pair_at(&md.act, a, p, q, s, h[q][t]);
                    rep.expect(lhs == rhs, "h-linear", || {
                        format!("h({} · {})", x.label(p, s), x.label(q, t))
                    });
                }
            }
        }
    }
    rep.finish()
}

/// Monoid, module and `h` read off a bimodule under the unital operad of
/// monoid actions; `eta` is the structure map from it.
pub fn derive_monoid_from_bimodule(
    m: &BimoduleTables,
    eta: &SSeqMap,
) -> Result<(BoxMonoid, BoxModule, Vec<Vec<usize>>)> {
    let max = m.max_arity();
    let ix = m.indexed();
    let ox = m.over().indexed();
    let two = need(ox, &star_closed(2))?;
    let two_o = need(ox, &star_open(2))?;
    let eta_at = |e: Elem| -> Result<Id> {
        let img = eta
            .get(&e)
            .ok_or_else(|| Error::InvalidMap(format!("η undefined at {e}")))?;
        ix.id(&img)
            .ok_or_else(|| Error::InvalidMap(format!("η({e}) = {img} not in the bimodule")))
    };
    let one_c = eta_at(star_closed(1))?;
    let one_o = eta_at(star_open(1))?;
    let seq = m.carrier();
    let cl: Vec<Vec<String>> = (0..=max)
        .map(|n| level_labels(seq, &profile_closed(n)))
        .collect();
    let op: Vec<Vec<String>> = (0..max)
        .map(|n| level_labels(seq, &profile_open(n)))
        .collect();
    let cid = |n: usize, x: usize| ix.id_at(&profile_closed(n), &cl[n][x]).expect("carrier");
    let oid = |n: usize, x: usize| ix.id_at(&profile_open(n), &op[n][x]).expect("carrier");
    let cpos = |n: usize, z: Option<Id>, what: &str| -> Result<usize> {
        let z = z.ok_or_else(|| Error::Undefined(format!("{what} into closed level {n}")))?;
        Ok(cl[n]
            .iter()
            .position(|l| *l == ix.elem(z).label)
            .expect("level"))
    };
    let opos = |n: usize, z: Option<Id>, what: &str| -> Result<usize> {
        let z = z.ok_or_else(|| Error::Undefined(format!("{what} into open level {n}")))?;
        Ok(op[n]
            .iter()
            .position(|l| *l == ix.elem(z).label)
            .expect("level"))
    };

    let mut cf = Vec::new();
    for n in 0..max {
        let mut faces = Vec::new();
        for i in 0..=n + 1 {
            let mut f = Vec::new();
            for x in 0..cl[n].len() {
                let id = cid(n, x);
                let z = if i == 0 {
                    m.gamma_id(two, &[one_c, id])
                } else if i == n + 1 {
                    m.gamma_id(two, &[id, one_c])
                } else {
                    m.right_id(id, i, two)
                };
                f.push(cpos(n + 1, z, "coface")?);
            }
            faces.push(f);
        }
        cf.push(faces);
    }
    let mut of = Vec::new();
    for n in 0..max.saturating_sub(1) {
        let mut faces = Vec::new();
        for i in 0..=n + 1 {
            let mut f = Vec::new();
            for x in 0..op[n].len() {
                let id = oid(n, x);
                let z = if i == 0 {
                    m.gamma_id(two_o, &[one_c, id])
                } else if i == n + 1 {
                    m.right_id(id, n + 1, two_o)
                } else {
                    m.right_id(id, i, two)
                };
                f.push(opos(n + 1, z, "coface")?);
            }
            faces.push(f);
        }
        of.push(faces);
    }
    let xs = SemiCosimplicialSet::new(cl.clone(), cf)?;
    let asys = SemiCosimplicialSet::new(op.clone(), of)?;

    let mut mult = vec![vec![Vec::new(); max + 1]; max + 1];
    for p in 0..=max {
        for q in 0..=max - p {
            let mut t = Vec::with_capacity(cl[p].len() * cl[q].len());
            for a in 0..cl[p].len() {
                for b in 0..cl[q].len() {
                    t.push(cpos(
                        p + q,
                        m.gamma_id(two, &[cid(p, a), cid(q, b)]),
                        "product",
                    )?);
                }
            }
            mult[p][q] = t;
        }
    }
    let amax = max - 1;
    let mut act = vec![vec![Vec::new(); amax + 1]; amax + 1];
    for p in 0..=amax {
        for q in 0..=amax - p {
            let mut t = Vec::with_capacity(cl[p].len() * op[q].len());
            for a in 0..cl[p].len() {
                for b in 0..op[q].len() {
                    t.push(opos(
                        p + q,
                        m.gamma_id(two_o, &[cid(p, a), oid(q, b)]),
                        "action",
                    )?);
                }
            }
            act[p][q] = t;
        }
    }
    let mut unit = Vec::new();
    for n in 0..=max {
        unit.push(cpos(n, Some(eta_at(star_closed(n))?), "unit")?);
    }
    let mut h = Vec::new();
    for n in 0..max {
        let mut f = Vec::new();
        for a in 0..cl[n].len() {
            f.push(opos(n, m.gamma_id(two_o, &[cid(n, a), one_o]), "h")?);
        }
        h.push(f);
    }
    Ok((
        BoxMonoid { x: xs, mult, unit },
        BoxModule { a: asys, act },
        h,
    ))
}

fn tuple_label(xs: &[usize], a: Option<usize>) -> String {
    let body: Vec<String> = xs.iter().map(usize::to_string).collect();
    match a {
        None => format!("({})", body.join(",")),
        Some(a) => format!("({};{a})", body.join(",")),
    }
}

fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..k).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// Loop data on a pointed set `{0, …, size-1}` (basepoint 0) relative to a
/// subset containing the basepoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopData {
    pub size: usize,
    pub sub: Vec<usize>,
}

impl LoopData {
    pub fn new(size: usize, sub: &[usize]) -> Result<Self> {
        let mut sub = sub.to_vec();
        sub.sort_unstable();
        sub.dedup();
        if !sub.contains(&0) {
            return Err(Error::Precondition(
                "the subset must contain the basepoint 0".into(),
            ));
        }
        if sub.iter().any(|&a| a >= size) {
            return Err(Error::Precondition("the subset must lie in the set".into()));
        }
        Ok(LoopData { size, sub })
    }

    fn closed(&self, n: usize) -> Vec<Vec<usize>> {
        tuples(n, self.size)
    }

    fn open(&self, n: usize) -> Vec<(Vec<usize>, usize)> {
        self.closed(n)
            .into_iter()
            .flat_map(|t| self.sub.iter().map(move |&a| (t.clone(), a)))
            .collect()
    }
}

/// Tuples with concatenation, the module of tuples ending in the subset,
/// and `h` appending the basepoint.
pub fn loops_example(
    data: &LoopData,
    max_level: usize,
) -> Result<(BoxMonoid, BoxModule, Vec<Vec<usize>>)> {
    let cl: Vec<Vec<Vec<usize>>> = (0..=max_level).map(|n| data.closed(n)).collect();
    let op: Vec<Vec<(Vec<usize>, usize)>> = (0..=max_level).map(|n| data.open(n)).collect();
    let cidx: Vec<HashMap<Vec<usize>, usize>> = cl
        .iter()
        .map(|l| l.iter().enumerate().map(|(k, t)| (t.clone(), k)).collect())
        .collect();
    let oidx: Vec<HashMap<(Vec<usize>, usize), usize>> = op
        .iter()
        .map(|l| l.iter().enumerate().map(|(k, t)| (t.clone(), k)).collect())
        .collect();
    let closed_face = |t: &[usize], i: usize| -> Vec<usize> {
        let n = t.len();
        let mut s = t.to_vec();
        if i == 0 {
            s.insert(0, 0);
        } else if i == n + 1 {
            s.push(0);
        } else {
            s.insert(i, t[i - 1]);
        }
        s
    };
    let mut cf = Vec::new();
    let mut of = Vec::new();
    for n in 0..max_level {
        cf.push(
            (0..=n + 1)
                .map(|i| {
                    cl[n]
                        .iter()
                        .map(|t| cidx[n + 1][&closed_face(t, i)])
                        .collect()
                })
                .collect(),
        );
        of.push(
            (0..=n + 1)
                .map(|i| {
                    op[n]
                        .iter()
                        .map(|(t, a)| {
                            let s = if i == n + 1 {
                                let mut s = t.clone();
                                s.push(*a);
                                s
                            } else {
                                closed_face(t, i)
                            };
                            oidx[n + 1][&(s, *a)]
                        })
                        .collect()
                })
                .collect(),
        );
    }
    let label_c = |l: &Vec<Vec<usize>>| l.iter().map(|t| tuple_label(t, None)).collect::<Vec<_>>();
    let xs = SemiCosimplicialSet::new(cl.iter().map(label_c).collect(), cf)?;
    let asys = SemiCosimplicialSet::new(
        op.iter()
            .map(|l| l.iter().map(|(t, a)| tuple_label(t, Some(*a))).collect())
            .collect(),
        of,
    )?;
    let mut mult = vec![vec![Vec::new(); max_level + 1]; max_level + 1];
    let mut act = vec![vec![Vec::new(); max_level + 1]; max_level + 1];
    for p in 0..=max_level {
        for q in 0..=max_level - p {
            let mut t = Vec::new();
            for a in &cl[p] {
                for b in &cl[q] {
                    let mut ab = a.clone();
                    ab.extend(b);
                    t.push(cidx[p + q][&ab]);
                }
            }
            mult[p][q] = t;
            let mut t = Vec::new();
            for a in &cl[p] {
                for (b, z) in &op[q] {
                    let mut ab = a.clone();
                    ab.extend(b);
                    t.push(oidx[p + q][&(ab, *z)]);
                }
            }
            act[p][q] = t;
        }
    }
    let unit = (0..=max_level).map(|n| cidx[n][&vec![0; n]]).collect();
    let h = (0..=max_level)
        .map(|n| cl[n].iter().map(|t| oidx[n][&(t.clone(), 0)]).collect())
        .collect();
    Ok((
        BoxMonoid { x: xs, mult, unit },
        BoxModule { a: asys, act },
        h,
    ))
}

/// The same data as a bimodule over the non-unital operad of monoid
/// actions, with its structure map from the unital one.
pub fn loops_bimodule(data: &LoopData, max_arity: usize) -> Result<(BimoduleTables, SSeqMap)> {
    let over = builtin_act(false, max_arity);
    let mut seq = FiniteSSequence::two_coloured(max_arity);
    for n in 0..=max_arity {
        for t in data.closed(n) {
            seq.insert(profile_closed(n), tuple_label(&t, None))?;
        }
    }
    for n in 0..max_arity {
        for (t, a) in data.open(n) {
            seq.insert(profile_open(n), tuple_label(&t, Some(a)))?;
        }
    }
    let mut b = BimoduleTables::new(over.clone(), seq);
    let ix = b.indexed().clone();
    let ox = over.indexed();
    let parse = |id: Id| -> (Vec<usize>, Option<usize>) {
        let l = &ix.elem(id).label;
        let inner = &l[1..l.len() - 1];
        let (xs, a) = match inner.split_once(';') {
            Some((xs, a)) => (xs, Some(a.parse().expect("digit"))),
            None => (inner, None),
        };
        let xs = xs
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().expect("digit"))
            .collect();
        (xs, a)
    };
    let lookup = |xs: &[usize], a: Option<usize>| -> Id {
        let p = match a {
            None => profile_closed(xs.len()),
            Some(_) => profile_open(xs.len()),
        };
        ix.id_at(&p, &tuple_label(xs, a)).expect("tuple in range")
    };
    for a in ox.ids() {
        let colours = ox.profile(a).inputs.clone();
        for ms in b.tuples(&colours, max_arity) {
            let mut xs = Vec::new();
            let mut last = None;
            for m in &ms {
                let (t, z) = parse(*m);
                xs.extend(t);
                last = z;
            }
            b.set_gamma_id(a, ms, lookup(&xs, last));
        }
    }
    for (m, i, a) in b.right_triples() {
        let (mut xs, z) = parse(m);
        let k = ox.arity(a);
        let rep = if i <= xs.len() {
            xs[i - 1]
        } else {
            z.expect("open slot")
        };
        for _ in 1..k {
            xs.insert(i - 1, rep);
        }
        b.set_right_id(m, i, a, lookup(&xs, z));
    }
    let mut eta = SSeqMap::new();
    for n in 0..=max_arity {
        eta.set(star_closed(n), tuple_label(&vec![0; n], None));
        if n >= 1 {
            eta.set(star_open(n), tuple_label(&vec![0; n - 1], Some(0)));
        }
    }
    Ok((b, eta))
}

/// Inclusion of the non-unital operad of monoid actions into the unital one.
pub fn act_inclusion(max_arity: usize) -> Result<crate::algebra::operad::OperadMap> {
    let src = builtin_act(false, max_arity);
    let tgt = builtin_act(true, max_arity);
    crate::algebra::operad::OperadMap::verify(&src, &tgt, &SSeqMap::identity(src.carrier()))
}

/// `eta` is a bimodule map from the unital operad into `m`.
pub fn check_structure_map(m: &BimoduleTables, eta: &SSeqMap) -> Result<AxiomReport> {
    let source = crate::algebra::modules::induced_bimodule(&act_inclusion(m.max_arity())?);
    Ok(crate::algebra::modules::check_bimodule_map(eta, &source, m))
}
