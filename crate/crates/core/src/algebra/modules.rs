//! Infinitesimal bimodules and bimodules over a finite operad, as tables.
//!
//! Infinitesimal: `a ∘_i m` (operad element with the module element in slot
//! `i`) and `m ∘^i a`. Bimodule: `γ(a; m_1, …, m_n)` and `m ∘^i a`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::indexed::{Id, Indexed};
use super::operad::{ElemDoc, FiniteOperad, OperadDoc, OperadMap, Step};
use crate::error::{Error, Result};
use crate::report::AxiomReport;
use crate::seqcore::{Colour, Elem, FiniteSSequence, Profile, SSeqMap, SequenceDoc};

#[derive(Clone, Debug)]
pub struct InfBimoduleTables {
    over: FiniteOperad,
    idx: Indexed,
    left: HashMap<(Id, u8, Id), Id>,
    right: HashMap<(Id, u8, Id), Id>,
}

fn lookup(idx: &Indexed, e: &Elem) -> Result<Id> {
    idx.id(e)
        .ok_or_else(|| Error::UnknownElement(e.to_string()))
}

fn result_id(idx: &Indexed, p: &Profile, label: &str) -> Result<Id> {
    idx.id_at(p, label)
        .ok_or_else(|| Error::UnknownElement(format!("{label}@{p}")))
}

impl InfBimoduleTables {
    pub fn new(over: FiniteOperad, carrier: FiniteSSequence) -> Self {
        InfBimoduleTables {
            over,
            idx: Indexed::new(carrier),
            left: HashMap::new(),
            right: HashMap::new(),
        }
    }

    pub fn over(&self) -> &FiniteOperad {
        &self.over
    }

    pub fn indexed(&self) -> &Indexed {
        &self.idx
    }

    pub fn carrier(&self) -> &FiniteSSequence {
        self.idx.seq()
    }

    pub fn max_arity(&self) -> usize {
        self.idx.max_arity()
    }

    pub fn set_left(&mut self, a: &Elem, i: usize, m: &Elem, result: &str) -> Result<()> {
        let ai = lookup(self.over.indexed(), a)?;
        let mi = lookup(&self.idx, m)?;
        if i == 0 || i > a.arity() || a.profile.inputs[i - 1] != m.output() {
            return Err(Error::ColourMismatch(format!("{a} ∘_{i} {m}")));
        }
        let z = result_id(&self.idx, &a.profile.graft(i, &m.profile), result)?;
        self.left.insert((ai, i as u8, mi), z);
        Ok(())
    }

    pub fn set_right(&mut self, m: &Elem, i: usize, a: &Elem, result: &str) -> Result<()> {
        let mi = lookup(&self.idx, m)?;
        let ai = lookup(self.over.indexed(), a)?;
        if i == 0 || i > m.arity() || m.profile.inputs[i - 1] != a.output() {
            return Err(Error::ColourMismatch(format!("{m} ∘^{i} {a}")));
        }
        let z = result_id(&self.idx, &m.profile.graft(i, &a.profile), result)?;
        self.right.insert((mi, i as u8, ai), z);
        Ok(())
    }

    pub fn set_left_id(&mut self, a: Id, i: usize, m: Id, z: Id) {
        self.left.insert((a, i as u8, m), z);
    }

    pub fn set_right_id(&mut self, m: Id, i: usize, a: Id, z: Id) {
        self.right.insert((m, i as u8, a), z);
    }

    pub fn left(&self, a: &Elem, i: usize, m: &Elem) -> Option<Elem> {
        let k = (self.over.indexed().id(a)?, i as u8, self.idx.id(m)?);
        self.left.get(&k).map(|z| self.idx.elem(*z).clone())
    }

    pub fn right(&self, m: &Elem, i: usize, a: &Elem) -> Option<Elem> {
        let k = (self.idx.id(m)?, i as u8, self.over.indexed().id(a)?);
        self.right.get(&k).map(|z| self.idx.elem(*z).clone())
    }

    pub fn left_id(&self, a: Id, i: usize, m: Id) -> Option<Id> {
        self.left.get(&(a, i as u8, m)).copied()
    }

    pub fn right_id(&self, m: Id, i: usize, a: Id) -> Option<Id> {
        self.right.get(&(m, i as u8, a)).copied()
    }

    fn left_step(&self, a: Id, i: usize, m: Id) -> Step {
        if self.over.indexed().arity(a) + self.idx.arity(m) - 1 > self.max_arity() {
            return Step::Skip;
        }
        self.left_id(a, i, m).map_or(Step::Missing, Step::Val)
    }

    fn right_step(&self, m: Id, i: usize, a: Id) -> Step {
        if self.idx.arity(m) + self.over.indexed().arity(a) - 1 > self.max_arity() {
            return Step::Skip;
        }
        self.right_id(m, i, a).map_or(Step::Missing, Step::Val)
    }

    /// `(a, i, m)` triples with matching colours inside the bound.
    pub fn left_triples(&self) -> Vec<(Id, usize, Id)> {
        let ox = self.over.indexed();
        let mut out = Vec::new();
        for a in ox.ids() {
            for i in 1..=ox.arity(a) {
                for &m in self.idx.with_output(ox.input(a, i)) {
                    if ox.arity(a) + self.idx.arity(m) - 1 <= self.max_arity() {
                        out.push((a, i, m));
                    }
                }
            }
        }
        out
    }

    pub fn right_triples(&self) -> Vec<(Id, usize, Id)> {
        let ox = self.over.indexed();
        let mut out = Vec::new();
        for m in self.idx.ids() {
            for i in 1..=self.idx.arity(m) {
                for &a in ox.with_output(self.idx.input(m, i)) {
                    if self.idx.arity(m) + ox.arity(a) - 1 <= self.max_arity() {
                        out.push((m, i, a));
                    }
                }
            }
        }
        out
    }

    pub fn entries(
        &self,
    ) -> (
        Vec<(Elem, usize, Elem, Elem)>,
        Vec<(Elem, usize, Elem, Elem)>,
    ) {
        let ox = self.over.indexed();
        let mut l: Vec<_> = self
            .left
            .iter()
            .map(|(&(a, i, m), &z)| {
                (
                    ox.elem(a).clone(),
                    i as usize,
                    self.idx.elem(m).clone(),
                    self.idx.elem(z).clone(),
                )
            })
            .collect();
        let mut r: Vec<_> = self
            .right
            .iter()
            .map(|(&(m, i, a), &z)| {
                (
                    self.idx.elem(m).clone(),
                    i as usize,
                    ox.elem(a).clone(),
                    self.idx.elem(z).clone(),
                )
            })
            .collect();
        l.sort();
        r.sort();
        (l, r)
    }

    /// Same carrier and tables, compared element-wise.
    pub fn same_tables(&self, other: &InfBimoduleTables) -> bool {
        self.carrier() == other.carrier() && self.entries() == other.entries()
    }

    pub fn to_doc(&self) -> InfBimoduleDoc {
        let (l, r) = self.entries();
        InfBimoduleDoc {
            over: self.over.to_doc(),
            carrier: self.carrier().to_doc(),
            left: l.into_iter().map(ActionDoc::from).collect(),
            right: r.into_iter().map(ActionDoc::from).collect(),
        }
    }

    pub fn store(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("tables serialize")
    }

    pub fn load(document: &str) -> Result<InfBimoduleTables> {
        let doc: InfBimoduleDoc =
            serde_json::from_str(document).map_err(|e| Error::Json(e.to_string()))?;
        let over = FiniteOperad::load(&serde_json::to_string(&doc.over).expect("doc"))?;
        let v = serde_json::to_value(&doc.carrier).map_err(|e| Error::Json(e.to_string()))?;
        let mut t = InfBimoduleTables::new(over, FiniteSSequence::from_value(&v, "$.carrier")?);
        for (k, a) in doc.left.iter().enumerate() {
            let p = format!("$.left[{k}]");
            t.set_left(&a.x.to_elem(&p)?, a.position, &a.y.to_elem(&p)?, &a.result)?;
        }
        for (k, a) in doc.right.iter().enumerate() {
            let p = format!("$.right[{k}]");
            t.set_right(&a.x.to_elem(&p)?, a.position, &a.y.to_elem(&p)?, &a.result)?;
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ActionDoc {
    pub x: ElemDoc,
    pub position: usize,
    pub y: ElemDoc,
    pub result: String,
}

impl From<(Elem, usize, Elem, Elem)> for ActionDoc {
    fn from((x, i, y, z): (Elem, usize, Elem, Elem)) -> Self {
        ActionDoc {
            x: ElemDoc::from(&x),
            position: i,
            y: ElemDoc::from(&y),
            result: z.label,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InfBimoduleDoc {
    pub over: OperadDoc,
    pub carrier: SequenceDoc,
    pub left: Vec<ActionDoc>,
    pub right: Vec<ActionDoc>,
}

macro_rules! val {
    ($e:expr) => {
        match $e {
            Step::Val(v) => v,
            _ => continue,
        }
    };
}

/// Exhaustive check of the infinitesimal bimodule relations.
pub fn check_infbimodule_axioms(m: &InfBimoduleTables) -> AxiomReport {
    let mut rep = AxiomReport::new();
    let o = m.over();
    let ox = o.indexed();
    let mx = m.indexed();
    let max = m.max_arity();
    let so = |id: Id| ox.show(id);
    let sm = |id: Id| mx.show(id);

    for (a, i, x) in m.left_triples() {
        rep.expect(m.left_id(a, i, x).is_some(), "left-defined", || {
            format!("{} ∘_{i} {}", so(a), sm(x))
        });
    }
    for (x, i, a) in m.right_triples() {
        rep.expect(m.right_id(x, i, a).is_some(), "right-defined", || {
            format!("{} ∘^{i} {}", sm(x), so(a))
        });
    }

    // Right action associativity.
    for (x, i, a) in m.right_triples() {
        let Some(xa) = m.right_id(x, i, a) else {
            continue;
        };
        let aa = ox.arity(a);
        for j in 1..=mx.arity(xa) {
            for &b in ox.with_output(mx.input(xa, j)) {
                let ab_ar = ox.arity(b);
                if mx.arity(xa) + ab_ar - 1 > max {
                    continue;
                }
                let lhs = val!(m.right_step(xa, j, b));
                let inst = || format!("({} ∘^{i} {}) ∘^{j} {}", sm(x), so(a), so(b));
                if j >= i && j < i + aa {
                    let ab = val!(o.step(a, j - i + 1, b));
                    let rhs = val!(m.right_step(x, i, ab));
                    rep.expect(lhs == rhs, "right-sequential", inst);
                } else if j < i {
                    let xb = val!(m.right_step(x, j, b));
                    let rhs = val!(m.right_step(xb, i + ab_ar - 1, a));
                    rep.expect(lhs == rhs, "right-parallel", inst);
                }
            }
        }
    }

    // Left action against operad composition.
    for (a, i, b) in o.composable_triples() {
        let Some(ab) = o.compose_id(a, i, b) else {
            continue;
        };
        let ba = ox.arity(b);
        for j in 1..=ox.arity(ab) {
            for &x in mx.with_output(ox.input(ab, j)) {
                let ax = mx.arity(x);
                let lhs = val!(m.left_step(ab, j, x));
                let inst = || format!("({} ∘_{i} {}) ∘_{j} {}", so(a), so(b), sm(x));
                if j >= i && j < i + ba {
                    let bx = val!(m.left_step(b, j - i + 1, x));
                    let rhs = val!(m.left_step(a, i, bx));
                    rep.expect(lhs == rhs, "left-sequential", inst);
                } else if j < i {
                    let axj = val!(m.left_step(a, j, x));
                    let rhs = val!(m.right_step(axj, i + ax - 1, b));
                    rep.expect(lhs == rhs, "left-parallel", inst);
                } else {
                    let axj = val!(m.left_step(a, j - ba + 1, x));
                    let rhs = val!(m.right_step(axj, i, b));
                    rep.expect(lhs == rhs, "left-parallel", inst);
                }
            }
        }
    }

    // Left then right.
    for (a, i, x) in m.left_triples() {
        let Some(ax) = m.left_id(a, i, x) else {
            continue;
        };
        let xa = mx.arity(x);
        for j in 1..=mx.arity(ax) {
            for &b in ox.with_output(mx.input(ax, j)) {
                let bar = ox.arity(b);
                let lhs = val!(m.right_step(ax, j, b));
                let inst = || format!("({} ∘_{i} {}) ∘^{j} {}", so(a), sm(x), so(b));
                if j >= i && j < i + xa {
                    let xb = val!(m.right_step(x, j - i + 1, b));
                    let rhs = val!(m.left_step(a, i, xb));
                    rep.expect(lhs == rhs, "left-right", inst);
                } else if j < i {
                    let abj = val!(o.step(a, j, b));
                    let rhs = val!(m.left_step(abj, i + bar - 1, x));
                    rep.expect(lhs == rhs, "left-right", inst);
                } else {
                    let abj = val!(o.step(a, j - xa + 1, b));
                    let rhs = val!(m.left_step(abj, i, x));
                    rep.expect(lhs == rhs, "left-right", inst);
                }
            }
        }
    }

    for x in mx.ids() {
        if let Some(u) = o.unit_id(mx.output(x)) {
            rep.expect(m.left_id(u, 1, x) == Some(x), "unit-left", || {
                format!("{} ∘_1 {}", so(u), sm(x))
            });
        }
        for i in 1..=mx.arity(x) {
            if let Some(u) = o.unit_id(mx.input(x, i)) {
                rep.expect(m.right_id(x, i, u) == Some(x), "unit-right", || {
                    format!("{} ∘^{i} {}", sm(x), so(u))
                });
            }
        }
    }
    rep.finish()
}

#[derive(Clone, Debug)]
pub struct BimoduleTables {
    over: FiniteOperad,
    idx: Indexed,
    gamma: HashMap<(Id, Vec<Id>), Id>,
    right: HashMap<(Id, u8, Id), Id>,
}

impl BimoduleTables {
    pub fn new(over: FiniteOperad, carrier: FiniteSSequence) -> Self {
        BimoduleTables {
            over,
            idx: Indexed::new(carrier),
            gamma: HashMap::new(),
            right: HashMap::new(),
        }
    }

    pub fn over(&self) -> &FiniteOperad {
        &self.over
    }

    pub fn indexed(&self) -> &Indexed {
        &self.idx
    }

    pub fn carrier(&self) -> &FiniteSSequence {
        self.idx.seq()
    }

    pub fn max_arity(&self) -> usize {
        self.idx.max_arity()
    }

    pub fn set_gamma(&mut self, a: &Elem, ms: &[Elem], result: &str) -> Result<()> {
        let ai = lookup(self.over.indexed(), a)?;
        if ms.len() != a.arity() {
            return Err(Error::ColourMismatch(format!(
                "{a} applied to {} elements",
                ms.len()
            )));
        }
        let mut ids = Vec::with_capacity(ms.len());
        let mut inputs = Vec::new();
        for (k, m) in ms.iter().enumerate() {
            if m.output() != a.profile.inputs[k] {
                return Err(Error::ColourMismatch(format!(
                    "{a} slot {} gets {m}",
                    k + 1
                )));
            }
            ids.push(lookup(&self.idx, m)?);
            inputs.extend_from_slice(&m.profile.inputs);
        }
        let z = result_id(&self.idx, &Profile::new(inputs, a.output()), result)?;
        self.gamma.insert((ai, ids), z);
        Ok(())
    }

    pub fn set_gamma_id(&mut self, a: Id, ms: Vec<Id>, z: Id) {
        self.gamma.insert((a, ms), z);
    }

    pub fn set_right(&mut self, m: &Elem, i: usize, a: &Elem, result: &str) -> Result<()> {
        let mi = lookup(&self.idx, m)?;
        let ai = lookup(self.over.indexed(), a)?;
        if i == 0 || i > m.arity() || m.profile.inputs[i - 1] != a.output() {
            return Err(Error::ColourMismatch(format!("{m} ∘^{i} {a}")));
        }
        let z = result_id(&self.idx, &m.profile.graft(i, &a.profile), result)?;
        self.right.insert((mi, i as u8, ai), z);
        Ok(())
    }

    pub fn set_right_id(&mut self, m: Id, i: usize, a: Id, z: Id) {
        self.right.insert((m, i as u8, a), z);
    }

    pub fn gamma(&self, a: &Elem, ms: &[Elem]) -> Option<Elem> {
        let ai = self.over.indexed().id(a)?;
        let ids = ms
            .iter()
            .map(|m| self.idx.id(m))
            .collect::<Option<Vec<_>>>()?;
        self.gamma_id(ai, &ids).map(|z| self.idx.elem(z).clone())
    }

    pub fn gamma_id(&self, a: Id, ms: &[Id]) -> Option<Id> {
        // HashMap<(Id, Vec<Id>)> cannot be queried by slice without a key.
        self.gamma.get(&(a, ms.to_vec())).copied()
    }

    pub fn right(&self, m: &Elem, i: usize, a: &Elem) -> Option<Elem> {
        let k = (self.idx.id(m)?, i as u8, self.over.indexed().id(a)?);
        self.right.get(&k).map(|z| self.idx.elem(*z).clone())
    }

    pub fn right_id(&self, m: Id, i: usize, a: Id) -> Option<Id> {
        self.right.get(&(m, i as u8, a)).copied()
    }

    fn right_step(&self, m: Id, i: usize, a: Id) -> Step {
        if self.idx.arity(m) + self.over.indexed().arity(a) - 1 > self.max_arity() {
            return Step::Skip;
        }
        self.right_id(m, i, a).map_or(Step::Missing, Step::Val)
    }

    fn gamma_step(&self, a: Id, ms: &[Id]) -> Step {
        let total: usize = ms.iter().map(|m| self.idx.arity(*m)).sum();
        if total > self.max_arity() {
            return Step::Skip;
        }
        self.gamma_id(a, ms).map_or(Step::Missing, Step::Val)
    }

    /// Module tuples with outputs `colours` and total arity at most `budget`.
    pub fn tuples(&self, colours: &[Colour], budget: usize) -> Vec<Vec<Id>> {
        tuples_in(&self.idx, colours, budget)
    }

    pub fn right_triples(&self) -> Vec<(Id, usize, Id)> {
        let ox = self.over.indexed();
        let mut out = Vec::new();
        for m in self.idx.ids() {
            for i in 1..=self.idx.arity(m) {
                for &a in ox.with_output(self.idx.input(m, i)) {
                    if self.idx.arity(m) + ox.arity(a) - 1 <= self.max_arity() {
                        out.push((m, i, a));
                    }
                }
            }
        }
        out
    }

    pub fn entries(&self) -> (Vec<(Elem, Vec<Elem>, Elem)>, Vec<(Elem, usize, Elem, Elem)>) {
        let ox = self.over.indexed();
        let mut g: Vec<_> = self
            .gamma
            .iter()
            .map(|((a, ms), z)| {
                (
                    ox.elem(*a).clone(),
                    ms.iter().map(|m| self.idx.elem(*m).clone()).collect(),
                    self.idx.elem(*z).clone(),
                )
            })
            .collect();
        let mut r: Vec<_> = self
            .right
            .iter()
            .map(|(&(m, i, a), &z)| {
                (
                    self.idx.elem(m).clone(),
                    i as usize,
                    ox.elem(a).clone(),
                    self.idx.elem(z).clone(),
                )
            })
            .collect();
        g.sort();
        r.sort();
        (g, r)
    }

    pub fn same_tables(&self, other: &BimoduleTables) -> bool {
        self.carrier() == other.carrier() && self.entries() == other.entries()
    }

    /// Sub-bimodule on the elements accepted by `keep`. Fails if the kept
    /// set is not closed under the actions.
    pub fn sub_bimodule(&self, mut keep: impl FnMut(&Elem) -> bool) -> Result<BimoduleTables> {
        let seq = self.carrier().filter(&mut keep);
        let mut out = BimoduleTables::new(self.over.clone(), seq);
        let tr = |id: Id, out: &BimoduleTables| out.idx.id(self.idx.elem(id));
        for ((a, ms), z) in &self.gamma {
            let Some(ids) = ms.iter().map(|m| tr(*m, &out)).collect::<Option<Vec<_>>>() else {
                continue;
            };
            let zz = tr(*z, &out).ok_or_else(|| {
                Error::Precondition(format!("kept set not closed at {}", self.idx.show(*z)))
            })?;
            out.gamma.insert((*a, ids), zz);
        }
        for (&(m, i, a), &z) in &self.right {
            let Some(mm) = tr(m, &out) else { continue };
            let zz = tr(z, &out).ok_or_else(|| {
                Error::Precondition(format!("kept set not closed at {}", self.idx.show(z)))
            })?;
            out.right.insert((mm, i, a), zz);
        }
        Ok(out)
    }

    pub fn to_doc(&self) -> BimoduleDoc {
        let (g, r) = self.entries();
        BimoduleDoc {
            over: self.over.to_doc(),
            carrier: self.carrier().to_doc(),
            gamma_left: g
                .into_iter()
                .map(|(a, ms, z)| GammaDoc {
                    op: ElemDoc::from(&a),
                    args: ms.iter().map(ElemDoc::from).collect(),
                    result: z.label,
                })
                .collect(),
            right_act: r.into_iter().map(ActionDoc::from).collect(),
        }
    }

    pub fn store(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("tables serialize")
    }

    pub fn load(document: &str) -> Result<BimoduleTables> {
        let doc: BimoduleDoc =
            serde_json::from_str(document).map_err(|e| Error::Json(e.to_string()))?;
        let over = FiniteOperad::load(&serde_json::to_string(&doc.over).expect("doc"))?;
        let v = serde_json::to_value(&doc.carrier).map_err(|e| Error::Json(e.to_string()))?;
        let mut t = BimoduleTables::new(over, FiniteSSequence::from_value(&v, "$.carrier")?);
        for (k, g) in doc.gamma_left.iter().enumerate() {
            let p = format!("$.gammaLeft[{k}]");
            let args = g
                .args
                .iter()
                .map(|a| a.to_elem(&p))
                .collect::<Result<Vec<_>>>()?;
            t.set_gamma(&g.op.to_elem(&p)?, &args, &g.result)?;
        }
        for (k, a) in doc.right_act.iter().enumerate() {
            let p = format!("$.rightAct[{k}]");
            t.set_right(&a.x.to_elem(&p)?, a.position, &a.y.to_elem(&p)?, &a.result)?;
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GammaDoc {
    pub op: ElemDoc,
    pub args: Vec<ElemDoc>,
    pub result: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BimoduleDoc {
    pub over: OperadDoc,
    pub carrier: SequenceDoc,
    #[serde(rename = "gammaLeft")]
    pub gamma_left: Vec<GammaDoc>,
    #[serde(rename = "rightAct")]
    pub right_act: Vec<ActionDoc>,
}

/// Tuples of elements of `idx` with the given output colours and total arity
/// at most `budget`, in lexicographic id order.
pub fn tuples_in(idx: &Indexed, colours: &[Colour], budget: usize) -> Vec<Vec<Id>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(colours.len());
    fn go(
        idx: &Indexed,
        colours: &[Colour],
        budget: usize,
        cur: &mut Vec<Id>,
        out: &mut Vec<Vec<Id>>,
    ) {
        if cur.len() == colours.len() {
            out.push(cur.clone());
            return;
        }
        for &m in idx.with_output(colours[cur.len()]) {
            let a = idx.arity(m);
            if a <= budget {
                cur.push(m);
                go(idx, colours, budget - a, cur, out);
                cur.pop();
            }
        }
    }
    go(idx, colours, budget, &mut cur, &mut out);
    out
}

/// Exhaustive check of the bimodule relations.
pub fn check_bimodule_axioms(m: &BimoduleTables) -> AxiomReport {
    let mut rep = AxiomReport::new();
    let o = m.over();
    let ox = o.indexed();
    let mx = m.indexed();
    let max = m.max_arity();
    let so = |id: Id| ox.show(id);
    let sm = |id: Id| mx.show(id);
    let st = |ms: &[Id]| {
        ms.iter()
            .map(|x| mx.show(*x))
            .collect::<Vec<_>>()
            .join(", ")
    };

    for a in ox.ids() {
        let cols = &ox.profile(a).inputs;
        for ms in m.tuples(cols, max) {
            rep.expect(m.gamma_id(a, &ms).is_some(), "gamma-defined", || {
                format!("γ({}; {})", so(a), st(&ms))
            });
        }
    }
    for (x, i, a) in m.right_triples() {
        rep.expect(m.right_id(x, i, a).is_some(), "right-defined", || {
            format!("{} ∘^{i} {}", sm(x), so(a))
        });
    }

    // γ(a ∘_i b; ms) = γ(a; …, γ(b; block), …)
    for (a, i, b) in o.composable_triples() {
        let Some(ab) = o.compose_id(a, i, b) else {
            continue;
        };
        let k = ox.arity(b);
        for ms in m.tuples(&ox.profile(ab).inputs, max) {
            let lhs = val!(m.gamma_step(ab, &ms));
            let inner = val!(m.gamma_step(b, &ms[i - 1..i - 1 + k]));
            let mut outer = ms[..i - 1].to_vec();
            outer.push(inner);
            outer.extend_from_slice(&ms[i - 1 + k..]);
            let rhs = val!(m.gamma_step(a, &outer));
            rep.expect(lhs == rhs, "gamma-associativity", || {
                format!("γ({} ∘_{i} {}; {})", so(a), so(b), st(&ms))
            });
        }
    }

    for x in mx.ids() {
        if let Some(u) = o.unit_id(mx.output(x)) {
            rep.expect(m.gamma_id(u, &[x]) == Some(x), "unit-left", || {
                format!("γ({}; {})", so(u), sm(x))
            });
        }
        for i in 1..=mx.arity(x) {
            if let Some(u) = o.unit_id(mx.input(x, i)) {
                rep.expect(m.right_id(x, i, u) == Some(x), "unit-right", || {
                    format!("{} ∘^{i} {}", sm(x), so(u))
                });
            }
        }
    }

    for (x, i, a) in m.right_triples() {
        let Some(xa) = m.right_id(x, i, a) else {
            continue;
        };
        let aa = ox.arity(a);
        for j in 1..=mx.arity(xa) {
            for &b in ox.with_output(mx.input(xa, j)) {
                let bar = ox.arity(b);
                if mx.arity(xa) + bar - 1 > max {
                    continue;
                }
                let lhs = val!(m.right_step(xa, j, b));
                let inst = || format!("({} ∘^{i} {}) ∘^{j} {}", sm(x), so(a), so(b));
                if j >= i && j < i + aa {
                    let ab = val!(o.step(a, j - i + 1, b));
                    let rhs = val!(m.right_step(x, i, ab));
                    rep.expect(lhs == rhs, "right-sequential", inst);
                } else if j < i {
                    let xb = val!(m.right_step(x, j, b));
                    let rhs = val!(m.right_step(xb, i + bar - 1, a));
                    rep.expect(lhs == rhs, "right-parallel", inst);
                }
            }
        }
    }

    // γ(a; ms) ∘^j b pushes into the block containing j.
    for a in ox.ids() {
        for ms in m.tuples(&ox.profile(a).inputs, max) {
            let Some(g) = m.gamma_id(a, &ms) else {
                continue;
            };
            for j in 1..=mx.arity(g) {
                for &b in ox.with_output(mx.input(g, j)) {
                    let lhs = val!(m.right_step(g, j, b));
                    let mut off = 0;
                    let mut slot = 0;
                    while off + mx.arity(ms[slot]) < j {
                        off += mx.arity(ms[slot]);
                        slot += 1;
                    }
                    let pushed = val!(m.right_step(ms[slot], j - off, b));
                    let mut args = ms.clone();
                    args[slot] = pushed;
                    let rhs = val!(m.gamma_step(a, &args));
                    rep.expect(lhs == rhs, "gamma-right", || {
                        format!("γ({}; {}) ∘^{j} {}", so(a), st(&ms), so(b))
                    });
                }
            }
        }
    }
    rep.finish()
}

/// Left operad element composed with a full list of arguments, one slot at a
/// time. Arity-zero arguments go first so intermediates never exceed
/// `max(arity(a), final arity)`.
pub fn full_composite<F>(a_arity: usize, args: &[usize], mut partial: F) -> Option<()>
where
    F: FnMut(usize, usize) -> Option<()>,
{
    // `partial(position, k)` substitutes argument `k` at the current position.
    let mut order: Vec<usize> = (0..a_arity).collect();
    order.sort_by_key(|&k| (args[k] != 0, std::cmp::Reverse(k)));
    let mut done = vec![false; a_arity];
    for k in order {
        let pos = 1
            + (0..k)
                .map(|l| if done[l] { args[l] } else { 1 })
                .sum::<usize>();
        partial(pos, k)?;
        done[k] = true;
    }
    Some(())
}

/// Target operad as an infinitesimal bimodule over the source of `f`.
pub fn induced_infbimodule(f: &OperadMap) -> InfBimoduleTables {
    let t = &f.target;
    let mut m = InfBimoduleTables::new(f.source.clone(), t.carrier().clone());
    for (a, i, x) in m.left_triples() {
        if let Some(z) = t.compose_id(f.image_id(a), i, x) {
            m.set_left_id(a, i, x, z);
        }
    }
    for (x, i, a) in m.right_triples() {
        if let Some(z) = t.compose_id(x, i, f.image_id(a)) {
            m.set_right_id(x, i, a, z);
        }
    }
    m
}

/// Target operad as a bimodule over the source of `f`.
pub fn induced_bimodule(f: &OperadMap) -> BimoduleTables {
    let t = &f.target;
    let tx = t.indexed();
    let mut m = BimoduleTables::new(f.source.clone(), t.carrier().clone());
    let max = m.max_arity();
    let sx = f.source.indexed();
    for a in sx.ids() {
        let cols = sx.profile(a).inputs.clone();
        for ms in m.tuples(&cols, max) {
            let mut cur = f.image_id(a);
            let arities: Vec<usize> = ms.iter().map(|x| tx.arity(*x)).collect();
            let ok = full_composite(cols.len(), &arities, |pos, k| {
                cur = t.compose_id(cur, pos, ms[k])?;
                Some(())
            });
            if ok.is_some() {
                m.set_gamma_id(a, ms, cur);
            }
        }
    }
    for (x, i, a) in m.right_triples() {
        if let Some(z) = t.compose_id(x, i, f.image_id(a)) {
            m.set_right_id(x, i, a, z);
        }
    }
    m
}

/// Infinitesimal structure from a bimodule map `eta` out of the operad:
/// `a ∘_i x = γ(a; η(1), …, x, …, η(1))`, right action unchanged.
pub fn infbimodule_from_bimodule_map(
    m: &BimoduleTables,
    eta: &SSeqMap,
) -> Result<InfBimoduleTables> {
    let o = m.over();
    let ox = o.indexed();
    let mx = m.indexed();
    let mut unit_img = std::collections::BTreeMap::new();
    for a in ox.ids() {
        for &c in &ox.profile(a).inputs {
            if unit_img.contains_key(&c) {
                continue;
            }
            let u = o
                .unit(c)
                .ok_or_else(|| Error::MissingUnit(c.name().into()))?;
            let img = eta
                .get(&u)
                .ok_or_else(|| Error::InvalidMap(format!("no image for unit {u}")))?;
            let id = mx
                .id(&img)
                .ok_or_else(|| Error::UnknownElement(img.to_string()))?;
            unit_img.insert(c, id);
        }
    }
    let mut out = InfBimoduleTables::new(o.clone(), m.carrier().clone());
    for (a, i, x) in out.left_triples() {
        let args: Vec<Id> = (1..=ox.arity(a))
            .map(|k| if k == i { x } else { unit_img[&ox.input(a, k)] })
            .collect();
        if let Some(z) = m.gamma_id(a, &args) {
            out.set_left_id(a, i, x, z);
        }
    }
    for (x, i, a) in out.right_triples() {
        if let Some(z) = m.right_id(x, i, a) {
            out.set_right_id(x, i, a, z);
        }
    }
    Ok(out)
}

/// `eta` commutes with γ and with the right action.
pub fn check_bimodule_map(
    eta: &SSeqMap,
    source: &BimoduleTables,
    target: &BimoduleTables,
) -> AxiomReport {
    let mut rep = AxiomReport::new();
    let sx = source.indexed();
    let tx = target.indexed();
    let img: Vec<Option<Id>> = sx
        .ids()
        .map(|id| eta.get(sx.elem(id)).and_then(|e| tx.id(&e)))
        .collect();
    for (k, i) in img.iter().enumerate() {
        if i.is_none() {
            rep.record("total", sx.show(k as Id));
        }
    }
    if !rep.passed() {
        return rep.finish();
    }
    let im = |id: Id| img[id as usize].expect("total");
    let ox = source.over().indexed();
    for a in ox.ids() {
        for ms in source.tuples(&ox.profile(a).inputs, source.max_arity()) {
            let Some(z) = source.gamma_id(a, &ms) else {
                continue;
            };
            let mapped: Vec<Id> = ms.iter().map(|x| im(*x)).collect();
            rep.expect(
                target.gamma_id(a, &mapped) == Some(im(z)),
                "map-gamma",
                || format!("γ({}; …) at {}", ox.show(a), sx.show(z)),
            );
        }
    }
    for (x, i, a) in source.right_triples() {
        let Some(z) = source.right_id(x, i, a) else {
            continue;
        };
        rep.expect(
            target.right_id(im(x), i, a) == Some(im(z)),
            "map-right",
            || format!("{} ∘^{i} {}", sx.show(x), ox.show(a)),
        );
    }
    rep.finish()
}

/// `eta` commutes with both infinitesimal actions.
pub fn check_infbimodule_map(
    eta: &SSeqMap,
    source: &InfBimoduleTables,
    target: &InfBimoduleTables,
) -> AxiomReport {
    let mut rep = AxiomReport::new();
    let sx = source.indexed();
    let tx = target.indexed();
    let img: Vec<Option<Id>> = sx
        .ids()
        .map(|id| eta.get(sx.elem(id)).and_then(|e| tx.id(&e)))
        .collect();
    for (k, i) in img.iter().enumerate() {
        if i.is_none() {
            rep.record("total", sx.show(k as Id));
        }
    }
    if !rep.passed() {
        return rep.finish();
    }
    let im = |id: Id| img[id as usize].expect("total");
    let ox = source.over().indexed();
    for (a, i, x) in source.left_triples() {
        let Some(z) = source.left_id(a, i, x) else {
            continue;
        };
        rep.expect(
            target.left_id(a, i, im(x)) == Some(im(z)),
            "map-left",
            || format!("{} ∘_{i} {}", ox.show(a), sx.show(x)),
        );
    }
    for (x, i, a) in source.right_triples() {
        let Some(z) = source.right_id(x, i, a) else {
            continue;
        };
        rep.expect(
            target.right_id(im(x), i, a) == Some(im(z)),
            "map-right",
            || format!("{} ∘^{i} {}", sx.show(x), ox.show(a)),
        );
    }
    rep.finish()
}
