//! Finite operads as partial-composition lookup tables.
//!
//! Positions are 1-based, matching the usual `∘_i` notation. A composite whose
//! arity would exceed the carrier's `max_arity` is simply absent.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::indexed::{Id, Indexed};
use crate::error::{Error, Result};
use crate::report::AxiomReport;
use crate::seqcore::{Colour, Elem, FiniteSSequence, Profile, SequenceDoc};

/// Outcome of looking up a composite while checking axioms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Arity bound exceeded; the instance is out of scope.
    Skip,
    /// Within bound but the table has no entry.
    Missing,
    Val(Id),
}

#[derive(Clone, Debug)]
pub struct FiniteOperad {
    idx: Indexed,
    units: BTreeMap<Colour, Id>,
    compose: HashMap<(Id, u8, Id), Id>,
}

impl FiniteOperad {
    pub fn new(carrier: FiniteSSequence) -> Self {
        FiniteOperad {
            idx: Indexed::new(carrier),
            units: BTreeMap::new(),
            compose: HashMap::new(),
        }
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

    pub fn set_unit(&mut self, colour: Colour, label: &str) -> Result<()> {
        let p = Profile::new(vec![colour], colour);
        let id = self
            .idx
            .id_at(&p, label)
            .ok_or_else(|| Error::UnknownElement(format!("{label}@{p}")))?;
        self.units.insert(colour, id);
        Ok(())
    }

    pub fn unit(&self, colour: Colour) -> Option<Elem> {
        self.units.get(&colour).map(|id| self.idx.elem(*id).clone())
    }

    pub fn unit_id(&self, colour: Colour) -> Option<Id> {
        self.units.get(&colour).copied()
    }

    pub fn units(&self) -> &BTreeMap<Colour, Id> {
        &self.units
    }

    pub fn is_unit(&self, id: Id) -> bool {
        self.units.values().any(|u| *u == id)
    }

    fn require(&self, e: &Elem) -> Result<Id> {
        self.idx
            .id(e)
            .ok_or_else(|| Error::UnknownElement(e.to_string()))
    }

    /// Writes (or overwrites) the composite `x ∘_i y`.
    pub fn set_compose(&mut self, x: &Elem, i: usize, y: &Elem, result: &str) -> Result<()> {
        let (xi, yi) = (self.require(x)?, self.require(y)?);
        if i == 0 || i > x.arity() || x.profile.inputs[i - 1] != y.output() {
            return Err(Error::ColourMismatch(format!("{x} ∘_{i} {y}")));
        }
        let p = x.profile.graft(i, &y.profile);
        let zi = self
            .idx
            .id_at(&p, result)
            .ok_or_else(|| Error::UnknownElement(format!("{result}@{p}")))?;
        self.compose.insert((xi, i as u8, yi), zi);
        Ok(())
    }

    pub fn set_compose_id(&mut self, x: Id, i: usize, y: Id, z: Id) {
        self.compose.insert((x, i as u8, y), z);
    }

    pub fn remove_compose(&mut self, x: &Elem, i: usize, y: &Elem) -> Option<Elem> {
        let key = (self.idx.id(x)?, i as u8, self.idx.id(y)?);
        self.compose.remove(&key).map(|z| self.idx.elem(z).clone())
    }

    pub fn compose(&self, x: &Elem, i: usize, y: &Elem) -> Option<Elem> {
        let key = (self.idx.id(x)?, i as u8, self.idx.id(y)?);
        self.compose.get(&key).map(|z| self.idx.elem(*z).clone())
    }

    pub fn compose_id(&self, x: Id, i: usize, y: Id) -> Option<Id> {
        self.compose.get(&(x, i as u8, y)).copied()
    }

    /// Lookup that distinguishes out-of-bound from missing.
    pub fn step(&self, x: Id, i: usize, y: Id) -> Step {
        if self.idx.arity(x) + self.idx.arity(y) - 1 > self.max_arity() {
            return Step::Skip;
        }
        match self.compose_id(x, i, y) {
            Some(z) => Step::Val(z),
            None => Step::Missing,
        }
    }

    pub fn table_len(&self) -> usize {
        self.compose.len()
    }

    /// Sorted `(x, i, y, x ∘_i y)` entries.
    pub fn entries(&self) -> Vec<(Elem, usize, Elem, Elem)> {
        let mut v: Vec<_> = self
            .compose
            .iter()
            .map(|(&(x, i, y), &z)| {
                (
                    self.idx.elem(x).clone(),
                    i as usize,
                    self.idx.elem(y).clone(),
                    self.idx.elem(z).clone(),
                )
            })
            .collect();
        v.sort();
        v
    }

    /// Every composable `(x, i, y)` within the arity bound.
    pub fn composable_triples(&self) -> Vec<(Id, usize, Id)> {
        let mut out = Vec::new();
        for x in self.idx.ids() {
            let ax = self.idx.arity(x);
            for i in 1..=ax {
                for &y in self.idx.with_output(self.idx.input(x, i)) {
                    if ax + self.idx.arity(y) - 1 <= self.max_arity() {
                        out.push((x, i, y));
                    }
                }
            }
        }
        out
    }

    /// Sub-operad on the elements kept by `keep`; tables are restricted.
    pub fn sub_operad(&self, mut keep: impl FnMut(&Elem) -> bool) -> FiniteOperad {
        let seq = self.carrier().filter(&mut keep);
        let mut out = FiniteOperad::new(seq);
        for (c, u) in &self.units {
            let e = self.idx.elem(*u);
            if out.idx.id(e).is_some() {
                let _ = out.set_unit(*c, &e.label);
            }
        }
        for (&(x, i, y), &z) in &self.compose {
            let (ex, ey, ez) = (self.idx.elem(x), self.idx.elem(y), self.idx.elem(z));
            if let (Some(a), Some(b), Some(c)) = (out.idx.id(ex), out.idx.id(ey), out.idx.id(ez)) {
                out.compose.insert((a, i, b), c);
            }
        }
        out
    }

    pub fn restriction_to_colour(&self, colour: Colour) -> FiniteOperad {
        let seq = self.carrier().restrict_to_colour(colour);
        let mut out = FiniteOperad::new(seq);
        if let Some(u) = self.unit(colour) {
            let _ = out.set_unit(colour, &u.label);
        }
        for (&(x, i, y), &z) in &self.compose {
            let (ex, ey, ez) = (self.idx.elem(x), self.idx.elem(y), self.idx.elem(z));
            if let (Some(a), Some(b), Some(c)) = (out.idx.id(ex), out.idx.id(ey), out.idx.id(ez)) {
                out.compose.insert((a, i, b), c);
            }
        }
        out
    }

    /// Same carrier, units and table (ids may differ, so compare by element).
    pub fn same_tables(&self, other: &FiniteOperad) -> bool {
        self.carrier() == other.carrier()
            && self.units.keys().eq(other.units.keys())
            && self
                .units
                .iter()
                .all(|(c, u)| other.unit(*c).as_ref() == Some(self.idx.elem(*u)))
            && self.entries() == other.entries()
    }

    pub fn to_doc(&self) -> OperadDoc {
        OperadDoc {
            carrier: self.carrier().to_doc(),
            units: self
                .units
                .iter()
                .map(|(c, u)| (c.name().to_string(), self.idx.elem(*u).label.clone()))
                .collect(),
            compose: self
                .entries()
                .into_iter()
                .map(|(x, i, y, z)| ComposeDoc {
                    outer: ElemDoc::from(&x),
                    position: i,
                    inner: ElemDoc::from(&y),
                    result: z.label,
                })
                .collect(),
        }
    }

    pub fn store(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("operad serializes")
    }

    pub fn load(document: &str) -> Result<FiniteOperad> {
        let doc: OperadDoc =
            serde_json::from_str(document).map_err(|e| Error::Json(e.to_string()))?;
        let v = serde_json::to_value(&doc.carrier).map_err(|e| Error::Json(e.to_string()))?;
        let seq = FiniteSSequence::from_value(&v, "$.carrier")?;
        let mut op = FiniteOperad::new(seq);
        for (c, l) in &doc.units {
            let colour = Colour::parse(c).ok_or_else(|| Error::UnknownColour(c.clone()))?;
            op.set_unit(colour, l)?;
        }
        for (k, entry) in doc.compose.iter().enumerate() {
            let x = entry.outer.to_elem(&format!("$.compose[{k}].outer"))?;
            let y = entry.inner.to_elem(&format!("$.compose[{k}].inner"))?;
            op.set_compose(&x, entry.position, &y, &entry.result)?;
        }
        Ok(op)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ElemDoc {
    pub inputs: Vec<String>,
    pub output: String,
    pub label: String,
}

impl From<&Elem> for ElemDoc {
    fn from(e: &Elem) -> Self {
        ElemDoc {
            inputs: e
                .profile
                .inputs
                .iter()
                .map(|c| c.name().to_string())
                .collect(),
            output: e.output().name().to_string(),
            label: e.label.clone(),
        }
    }
}

impl ElemDoc {
    pub fn to_elem(&self, path: &str) -> Result<Elem> {
        let parse = |s: &str| {
            Colour::parse(s).ok_or_else(|| Error::Schema {
                path: path.to_string(),
                message: format!("unknown colour {s:?}"),
            })
        };
        let inputs = self
            .inputs
            .iter()
            .map(|s| parse(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Elem::new(
            Profile::new(inputs, parse(&self.output)?),
            self.label.clone(),
        ))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ComposeDoc {
    pub outer: ElemDoc,
    pub position: usize,
    pub inner: ElemDoc,
    pub result: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OperadDoc {
    pub carrier: SequenceDoc,
    pub units: BTreeMap<String, String>,
    pub compose: Vec<ComposeDoc>,
}

/// Exhaustive check of sequential and parallel associativity and of both
/// unit laws, over every instance whose intermediates stay within bound.
pub fn check_operad_axioms(o: &FiniteOperad) -> AxiomReport {
    let mut rep = AxiomReport::new();
    let ix = o.indexed();
    let max = o.max_arity();
    let show = |id: Id| ix.show(id);

    // Table completeness inside the bound.
    for (x, i, y) in o.composable_triples() {
        if o.compose_id(x, i, y).is_none() {
            rep.record("defined", format!("{} ∘_{i} {}", show(x), show(y)));
        }
        rep.tick();
    }

    for (x, i, y) in o.composable_triples() {
        let Some(xy) = o.compose_id(x, i, y) else {
            continue;
        };
        let ay = ix.arity(y);
        let axy = ix.arity(xy);
        for j in 1..=axy {
            for &z in ix.with_output(ix.input(xy, j)) {
                let az = ix.arity(z);
                if axy + az - 1 > max {
                    continue;
                }
                let lhs = match o.step(xy, j, z) {
                    Step::Val(v) => v,
                    _ => continue,
                };
                let inst = || format!("({} ∘_{i} {}) ∘_{j} {}", show(x), show(y), show(z));
                if j >= i && j < i + ay {
                    // z lands inside y
                    let Step::Val(yz) = o.step(y, j - i + 1, z) else {
                        continue;
                    };
                    let Step::Val(rhs) = o.step(x, i, yz) else {
                        continue;
                    };
                    rep.expect(lhs == rhs, "associativity-sequential", inst);
                } else if j < i {
                    let Step::Val(xz) = o.step(x, j, z) else {
                        continue;
                    };
                    let Step::Val(rhs) = o.step(xz, i + az - 1, y) else {
                        continue;
                    };
                    rep.expect(lhs == rhs, "associativity-parallel", inst);
                }
            }
        }
    }

    for x in ix.ids() {
        let out = ix.output(x);
        match o.unit_id(out) {
            Some(u) => {
                let r = o.compose_id(u, 1, x);
                rep.expect(r == Some(x), "unit-left", || {
                    format!("{} ∘_1 {}", show(u), show(x))
                });
            }
            None => rep.record("unit-missing", out.name().to_string()),
        }
        for i in 1..=ix.arity(x) {
            if let Some(u) = o.unit_id(ix.input(x, i)) {
                let r = o.compose_id(x, i, u);
                rep.expect(r == Some(x), "unit-right", || {
                    format!("{} ∘_{i} {}", show(x), show(u))
                });
            }
        }
    }
    rep.finish()
}

/// Operad map given extensionally; only [`OperadMap::verify`] builds one.
#[derive(Clone, Debug)]
pub struct OperadMap {
    pub source: FiniteOperad,
    pub target: FiniteOperad,
    img: Vec<Id>,
}

impl OperadMap {
    /// Checks that `map` is total, preserves units and every composite that
    /// is defined on both sides.
    pub fn verify(
        source: &FiniteOperad,
        target: &FiniteOperad,
        map: &crate::seqcore::SSeqMap,
    ) -> Result<OperadMap> {
        map.validate(source.carrier(), target.carrier())?;
        let sx = source.indexed();
        let tx = target.indexed();
        let img: Vec<Id> = sx
            .ids()
            .map(|id| {
                tx.id(&map.get(sx.elem(id)).expect("validated"))
                    .expect("validated")
            })
            .collect();
        for (c, u) in source.units() {
            if target.unit_id(*c) != Some(img[*u as usize]) {
                return Err(Error::InvalidMap(format!(
                    "unit at {} not preserved",
                    c.name()
                )));
            }
        }
        for (x, i, y) in source.composable_triples() {
            let Some(z) = source.compose_id(x, i, y) else {
                continue;
            };
            let t = target.compose_id(img[x as usize], i, img[y as usize]);
            if t != Some(img[z as usize]) {
                return Err(Error::InvalidMap(format!(
                    "{} ∘_{i} {} not preserved",
                    sx.show(x),
                    sx.show(y)
                )));
            }
        }
        Ok(OperadMap {
            source: source.clone(),
            target: target.clone(),
            img,
        })
    }

    pub fn identity(o: &FiniteOperad) -> OperadMap {
        OperadMap {
            source: o.clone(),
            target: o.clone(),
            img: o.indexed().ids().collect(),
        }
    }

    pub fn image_id(&self, id: Id) -> Id {
        self.img[id as usize]
    }

    pub fn image(&self, e: &Elem) -> Option<Elem> {
        let id = self.source.indexed().id(e)?;
        Some(self.target.indexed().elem(self.img[id as usize]).clone())
    }
}
