//! Free infinitesimal bimodules and free bimodules over a finite operad,
//! as labelled pearl trees and trees with section modulo unit contraction.
//!
//! Elements are stored in normal form: no non-pearl vertex carries a unit.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::indexed::{Id, Indexed};
use crate::algebra::modules::{BimoduleTables, InfBimoduleTables};
use crate::algebra::operad::FiniteOperad;
use crate::error::{Error, Result};
use crate::report::AxiomReport;
use crate::seqcore::{Colour, Elem, FiniteSSequence, Profile, SSeqMap};
use crate::trees::Tree;

/// A pearl and, on each of its inputs, either a leaf or one corolla.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PearlPart {
    pub pearl: Id,
    pub above: Vec<Option<Id>>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeIbElement {
    /// Vertex below the pearl and the input of it the pearl sits on.
    pub below: Option<(Id, usize)>,
    pub part: PearlPart,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeBimodElement {
    /// Root vertex under the section; `None` means a single pearl at the root.
    pub root: Option<Id>,
    pub parts: Vec<PearlPart>,
}

/// One step of a fold for the infinitesimal case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IbCut {
    Below,
    Above(usize),
}

/// One step of a fold for the bimodule case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BimodCut {
    Root,
    Above(usize, usize),
}

/// Operad and generators shared by both free constructions.
#[derive(Clone, Debug)]
struct Base {
    o: FiniteOperad,
    m: Indexed,
    max_arity: usize,
}

impl Base {
    fn new(o: &FiniteOperad, m: &FiniteSSequence, max_arity: usize) -> Result<Self> {
        if o.max_arity() < max_arity {
            return Err(Error::Precondition(format!(
                "operad truncated at {} below the requested arity {max_arity}",
                o.max_arity()
            )));
        }
        for c in m.colours() {
            if !o.carrier().colours().contains(c) {
                return Err(Error::UnknownColour(c.name().into()));
            }
        }
        // Width-zero pieces let vertex arities outgrow the truncation.
        if o.carrier().elems().iter().any(|e| e.arity() == 0)
            || m.elems().iter().any(|e| e.arity() == 0)
        {
            return Err(Error::Precondition(
                "arity-zero operations or generators are not supported in truncated free objects"
                    .into(),
            ));
        }
        Ok(Base {
            o: o.clone(),
            m: Indexed::new(m.clone()),
            max_arity,
        })
    }

    fn bound(&self, arity: usize) -> Result<()> {
        if arity > self.max_arity {
            return Err(Error::ArityOverflow {
                profile: "action result".into(),
                arity,
                max_arity: self.max_arity,
            });
        }
        Ok(())
    }

    fn ox(&self) -> &Indexed {
        self.o.indexed()
    }

    fn is_unit(&self, v: Id) -> bool {
        self.o.is_unit(v)
    }

    fn part_inputs(&self, p: &PearlPart) -> Vec<Colour> {
        let mut out = Vec::new();
        for (j, a) in p.above.iter().enumerate() {
            match a {
                None => out.push(self.m.input(p.pearl, j + 1)),
                Some(v) => out.extend(self.ox().profile(*v).inputs.iter().copied()),
            }
        }
        out
    }

    fn part_width(&self, p: &PearlPart) -> usize {
        p.above
            .iter()
            .map(|a| a.map_or(1, |v| self.ox().arity(v)))
            .sum()
    }

    fn normalize_part(&self, p: &mut PearlPart) {
        for a in &mut p.above {
            if matches!(a, Some(v) if self.is_unit(*v)) {
                *a = None;
            }
        }
    }

    fn part_is_normal(&self, p: &PearlPart) -> bool {
        p.above
            .iter()
            .all(|a| !matches!(a, Some(v) if self.is_unit(*v)))
    }

    /// Right action on leaf `t` (1-based) of a part.
    fn part_right(&self, p: &PearlPart, t: usize, y: Id) -> Result<PearlPart> {
        let mut q = p.clone();
        let mut off = t;
        for j in 0..p.above.len() {
            let w = p.above[j].map_or(1, |v| self.ox().arity(v));
            if off <= w {
                let expect = match p.above[j] {
                    None => self.m.input(p.pearl, j + 1),
                    Some(v) => self.ox().input(v, off),
                };
                if expect != self.ox().output(y) {
                    return Err(Error::ColourMismatch(format!(
                        "input {t} has colour {}, operation outputs {}",
                        expect.short(),
                        self.ox().output(y).short()
                    )));
                }
                q.above[j] = match p.above[j] {
                    None => Some(y),
                    Some(v) => Some(self.compose(v, off, y)?),
                };
                self.normalize_part(&mut q);
                return Ok(q);
            }
            off -= w;
        }
        Err(Error::Precondition(format!("no input {t}")))
    }

    fn compose(&self, x: Id, i: usize, y: Id) -> Result<Id> {
        self.o.compose_id(x, i, y).ok_or_else(|| {
            Error::Undefined(format!("{} ∘_{i} {}", self.ox().show(x), self.ox().show(y)))
        })
    }

    /// All normal parts of width at most `max_width`.
    fn parts(&self, max_width: usize) -> Vec<PearlPart> {
        let mut out = Vec::new();
        for p in self.m.ids() {
            let k = self.m.arity(p);
            let mut choices: Vec<Vec<Option<Id>>> = Vec::new();
            for j in 1..=k {
                let c = self.m.input(p, j);
                let mut opts = vec![None];
                for &v in self.ox().with_output(c) {
                    if !self.is_unit(v) && self.ox().arity(v) <= max_width {
                        opts.push(Some(v));
                    }
                }
                choices.push(opts);
            }
            let mut cur = Vec::with_capacity(k);
            self.extend_parts(p, &choices, &mut cur, 0, max_width, &mut out);
        }
        out
    }

    fn extend_parts(
        &self,
        p: Id,
        choices: &[Vec<Option<Id>>],
        cur: &mut Vec<Option<Id>>,
        width: usize,
        max_width: usize,
        out: &mut Vec<PearlPart>,
    ) {
        if cur.len() == choices.len() {
            out.push(PearlPart {
                pearl: p,
                above: cur.clone(),
            });
            return;
        }
        for &opt in &choices[cur.len()] {
            let w = opt.map_or(1, |v| self.ox().arity(v));
            if width + w <= max_width {
                cur.push(opt);
                self.extend_parts(p, choices, cur, width + w, max_width, out);
                cur.pop();
            }
        }
    }

    fn part_tree(&self, p: &PearlPart) -> Tree {
        let inputs = p
            .above
            .iter()
            .enumerate()
            .map(|(j, a)| match a {
                None => Tree::leaf(self.m.input(p.pearl, j + 1)),
                Some(v) => Tree::corolla(&self.ox().profile(*v).inputs, self.ox().output(*v)),
            })
            .collect();
        Tree::Vertex {
            out: self.m.output(p.pearl),
            inputs,
        }
    }

    fn part_labels(&self, p: &PearlPart, out: &mut Vec<String>) {
        out.push(self.m.elem(p.pearl).label.clone());
        for v in p.above.iter().flatten() {
            out.push(self.ox().elem(*v).label.clone());
        }
    }

    fn show(&self, tree: &Tree, marks: BTreeSet<usize>, labels: &[String]) -> String {
        let labels = serde_json::to_string(labels).expect("strings serialize");
        format!("{} {labels}", tree.code_marked(&marks))
    }

    /// `h` at the pearl of a part.
    fn pearl_value(&self, h: &SSeqMap, p: &PearlPart) -> Result<Elem> {
        let e = self.m.elem(p.pearl);
        h.get(e)
            .ok_or_else(|| Error::InvalidMap(format!("h undefined at {e}")))
    }
}

/// Free infinitesimal bimodule, enumerated up to a maximal arity.
#[derive(Clone, Debug)]
pub struct FreeIb {
    base: Base,
    elems: Vec<FreeIbElement>,
}

impl FreeIb {
    pub fn new(o: &FiniteOperad, m: &FiniteSSequence, max_arity: usize) -> Result<Self> {
        let base = Base::new(o, m, max_arity)?;
        let mut elems = Vec::new();
        for part in base.parts(max_arity) {
            let w = base.part_width(&part);
            let out = base.m.output(part.pearl);
            elems.push(FreeIbElement {
                below: None,
                part: part.clone(),
            });
            for r in base.ox().ids() {
                let ar = base.ox().arity(r);
                if base.is_unit(r) || ar == 0 || ar + w - 1 > max_arity {
                    continue;
                }
                for k in 1..=ar {
                    if base.ox().input(r, k) == out {
                        elems.push(FreeIbElement {
                            below: Some((r, k)),
                            part: part.clone(),
                        });
                    }
                }
            }
        }
        let mut s = FreeIb { base, elems };
        let elems = std::mem::take(&mut s.elems);
        let mut keyed: Vec<_> = elems
            .into_iter()
            .map(|x| ((s.vertex_count(&x), s.label(&x)), x))
            .collect();
        keyed.sort();
        s.elems = keyed.into_iter().map(|(_, x)| x).collect();
        Ok(s)
    }

    pub fn operad(&self) -> &FiniteOperad {
        &self.base.o
    }

    pub fn generators(&self) -> &Indexed {
        &self.base.m
    }

    pub fn max_arity(&self) -> usize {
        self.base.max_arity
    }

    /// All normal forms, by vertex count then label.
    pub fn all(&self) -> &[FreeIbElement] {
        &self.elems
    }

    pub fn elements(&self, profile: &Profile) -> Vec<FreeIbElement> {
        self.elems
            .iter()
            .filter(|x| self.profile(x) == *profile)
            .cloned()
            .collect()
    }

    pub fn profile(&self, x: &FreeIbElement) -> Profile {
        let b = &self.base;
        let inner = b.part_inputs(&x.part);
        match x.below {
            None => Profile::new(inner, b.m.output(x.part.pearl)),
            Some((r, k)) => {
                let rp = b.ox().profile(r);
                let mut inputs = rp.inputs[..k - 1].to_vec();
                inputs.extend(inner);
                inputs.extend_from_slice(&rp.inputs[k..]);
                Profile::new(inputs, rp.output)
            }
        }
    }

    pub fn arity(&self, x: &FreeIbElement) -> usize {
        self.profile(x).arity()
    }

    pub fn vertex_count(&self, x: &FreeIbElement) -> usize {
        1 + usize::from(x.below.is_some()) + x.part.above.iter().flatten().count()
    }

    /// The pearl corolla on a generator.
    pub fn unit_of(&self, e: &Elem) -> Result<FreeIbElement> {
        let p = self
            .base
            .m
            .id(e)
            .ok_or_else(|| Error::UnknownElement(e.to_string()))?;
        Ok(FreeIbElement {
            below: None,
            part: PearlPart {
                pearl: p,
                above: vec![None; self.base.m.arity(p)],
            },
        })
    }

    pub fn normalize(&self, x: &FreeIbElement) -> FreeIbElement {
        let mut y = x.clone();
        self.base.normalize_part(&mut y.part);
        if matches!(y.below, Some((r, _)) if self.base.is_unit(r)) {
            y.below = None;
        }
        y
    }

    pub fn is_normal(&self, x: &FreeIbElement) -> bool {
        self.base.part_is_normal(&x.part)
            && !matches!(x.below, Some((r, _)) if self.base.is_unit(r))
    }

    /// `y ∘_i x`.
    pub fn left(&self, y: Id, i: usize, x: &FreeIbElement) -> Result<FreeIbElement> {
        let b = &self.base;
        let p = self.profile(x);
        if i == 0 || i > b.ox().arity(y) {
            return Err(Error::Precondition(format!("no input {i}")));
        }
        if b.ox().input(y, i) != p.output {
            return Err(Error::ColourMismatch(format!(
                "input {i} of {} against output {}",
                b.ox().show(y),
                p.output.short()
            )));
        }
        self.bound(p.arity() + b.ox().arity(y) - 1)?;
        let below = match x.below {
            None => (y, i),
            Some((r, k)) => (b.compose(y, i, r)?, k + i - 1),
        };
        Ok(self.normalize(&FreeIbElement {
            below: Some(below),
            part: x.part.clone(),
        }))
    }

    /// `x ∘^i y`.
    pub fn right(&self, x: &FreeIbElement, i: usize, y: Id) -> Result<FreeIbElement> {
        let b = &self.base;
        let p = self.profile(x);
        if i == 0 || i > p.arity() {
            return Err(Error::Precondition(format!("no input {i}")));
        }
        if p.inputs[i - 1] != b.ox().output(y) {
            return Err(Error::ColourMismatch(format!(
                "input {i} has colour {}, operation outputs {}",
                p.inputs[i - 1].short(),
                b.ox().output(y).short()
            )));
        }
        self.bound(p.arity() + b.ox().arity(y) - 1)?;
        let w = b.part_width(&x.part);
        let mut out = x.clone();
        match x.below {
            Some((r, k)) if i < k => {
                out.below = Some((b.compose(r, i, y)?, k + b.ox().arity(y) - 1));
            }
            Some((r, k)) if i >= k + w => {
                out.below = Some((b.compose(r, i - w + 1, y)?, k));
            }
            Some((_, k)) => out.part = b.part_right(&x.part, i - k + 1, y)?,
            None => out.part = b.part_right(&x.part, i, y)?,
        }
        Ok(self.normalize(&out))
    }

    fn bound(&self, arity: usize) -> Result<()> {
        self.base.bound(arity)
    }

    /// Planar tree and pearl vertex (preorder index).
    pub fn tree(&self, x: &FreeIbElement) -> (Tree, usize) {
        let b = &self.base;
        let pt = b.part_tree(&x.part);
        match x.below {
            None => (pt, 0),
            Some((r, k)) => {
                let rp = b.ox().profile(r);
                let inputs = (1..=rp.arity())
                    .map(|j| {
                        if j == k {
                            pt.clone()
                        } else {
                            Tree::leaf(rp.inputs[j - 1])
                        }
                    })
                    .collect();
                (
                    Tree::Vertex {
                        out: rp.output,
                        inputs,
                    },
                    1,
                )
            }
        }
    }

    /// Tree code with the pearl marked, then vertex labels in preorder.
    pub fn label(&self, x: &FreeIbElement) -> String {
        let (t, pearl) = self.tree(x);
        let mut labels = Vec::new();
        if let Some((r, _)) = x.below {
            labels.push(self.base.ox().elem(r).label.clone());
        }
        self.base.part_labels(&x.part, &mut labels);
        self.base.show(&t, BTreeSet::from([pearl]), &labels)
    }

    pub fn elem(&self, x: &FreeIbElement) -> Elem {
        Elem::new(self.profile(x), self.label(x))
    }

    /// The free object as tables over the operad.
    pub fn tables(&self) -> Result<InfBimoduleTables> {
        let mut seq = FiniteSSequence::new(self.base.o.carrier().colours(), self.base.max_arity);
        for x in &self.elems {
            seq.insert(self.profile(x), self.label(x))?;
        }
        let mut t = InfBimoduleTables::new(self.base.o.clone(), seq);
        let ix = t.indexed().clone();
        let of: BTreeMap<String, &FreeIbElement> =
            self.elems.iter().map(|x| (self.label(x), x)).collect();
        let back = |id: Id| of[&ix.elem(id).label];
        for (a, i, m) in t.left_triples() {
            let z = self.left(a, i, back(m))?;
            t.set_left_id(a, i, m, ix.id(&self.elem(&z)).expect("closed"));
        }
        for (m, i, a) in t.right_triples() {
            let z = self.right(back(m), i, a)?;
            t.set_right_id(m, i, a, ix.id(&self.elem(&z)).expect("closed"));
        }
        Ok(t)
    }

    /// Every order in which the non-pearl vertices can be cut.
    pub fn cut_orders(&self, x: &FreeIbElement) -> Vec<Vec<IbCut>> {
        let mut cuts: Vec<IbCut> = x
            .part
            .above
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_some())
            .map(|(j, _)| IbCut::Above(j))
            .collect();
        if x.below.is_some() {
            cuts.push(IbCut::Below);
        }
        permutations(&cuts)
    }

    /// Evaluation in `n` extending `h`, cutting vertices in the given order.
    pub fn fold_with_order(
        &self,
        h: &SSeqMap,
        n: &InfBimoduleTables,
        x: &FreeIbElement,
        order: &[IbCut],
    ) -> Result<Elem> {
        let b = &self.base;
        let ox = b.ox();
        let mut cur = b.pearl_value(h, &x.part)?;
        let mut done = vec![false; x.part.above.len()];
        let mut below_done = false;
        let undefined = |what: String| Error::Undefined(format!("fold: {what}"));
        for cut in order {
            match *cut {
                IbCut::Below => {
                    let (r, k) = x
                        .below
                        .ok_or_else(|| Error::Precondition("no vertex below".into()))?;
                    cur = n
                        .left(ox.elem(r), k, &cur)
                        .ok_or_else(|| undefined(format!("{} ∘_{k} {cur}", ox.elem(r))))?;
                    below_done = true;
                }
                IbCut::Above(j) => {
                    let v = x.part.above[j].ok_or_else(|| {
                        Error::Precondition(format!("no vertex on input {}", j + 1))
                    })?;
                    let mut pos = 1;
                    for (jj, a) in x.part.above[..j].iter().enumerate() {
                        pos += if done[jj] {
                            a.map_or(1, |w| ox.arity(w))
                        } else {
                            1
                        };
                    }
                    if below_done {
                        pos += x.below.expect("applied").1 - 1;
                    }
                    cur = n
                        .right(&cur, pos, ox.elem(v))
                        .ok_or_else(|| undefined(format!("{cur} ∘^{pos} {}", ox.elem(v))))?;
                    done[j] = true;
                }
            }
        }
        Ok(cur)
    }

    /// Fold cutting the vertices above the pearl first, then the one below.
    pub fn fold(&self, h: &SSeqMap, n: &InfBimoduleTables, x: &FreeIbElement) -> Result<Elem> {
        let mut order: Vec<IbCut> = (0..x.part.above.len())
            .filter(|&j| x.part.above[j].is_some())
            .map(IbCut::Above)
            .collect();
        if x.below.is_some() {
            order.push(IbCut::Below);
        }
        self.fold_with_order(h, n, x, &order)
    }
}

/// Free bimodule, enumerated up to a maximal arity.
#[derive(Clone, Debug)]
pub struct FreeBimod {
    base: Base,
    elems: Vec<FreeBimodElement>,
}

impl FreeBimod {
    pub fn new(o: &FiniteOperad, m: &FiniteSSequence, max_arity: usize) -> Result<Self> {
        let base = Base::new(o, m, max_arity)?;
        let parts = base.parts(max_arity);
        let mut elems: Vec<FreeBimodElement> = parts
            .iter()
            .map(|p| FreeBimodElement {
                root: None,
                parts: vec![p.clone()],
            })
            .collect();
        for r in base.ox().ids() {
            if base.is_unit(r) {
                continue;
            }
            let cols = base.ox().profile(r).inputs.clone();
            let mut cur = Vec::new();
            fill_roots(&base, &parts, &cols, &mut cur, 0, r, &mut elems);
        }
        let mut s = FreeBimod { base, elems };
        let elems = std::mem::take(&mut s.elems);
        let mut keyed: Vec<_> = elems
            .into_iter()
            .map(|x| ((s.vertex_count(&x), s.label(&x)), x))
            .collect();
        keyed.sort();
        s.elems = keyed.into_iter().map(|(_, x)| x).collect();
        Ok(s)
    }

    pub fn operad(&self) -> &FiniteOperad {
        &self.base.o
    }

    pub fn generators(&self) -> &Indexed {
        &self.base.m
    }

    pub fn max_arity(&self) -> usize {
        self.base.max_arity
    }

    pub fn all(&self) -> &[FreeBimodElement] {
        &self.elems
    }

    pub fn elements(&self, profile: &Profile) -> Vec<FreeBimodElement> {
        self.elems
            .iter()
            .filter(|x| self.profile(x) == *profile)
            .cloned()
            .collect()
    }

    pub fn profile(&self, x: &FreeBimodElement) -> Profile {
        let b = &self.base;
        let inputs = x.parts.iter().flat_map(|p| b.part_inputs(p)).collect();
        let out = match x.root {
            Some(r) => b.ox().output(r),
            None => b.m.output(x.parts[0].pearl),
        };
        Profile::new(inputs, out)
    }

    pub fn arity(&self, x: &FreeBimodElement) -> usize {
        self.profile(x).arity()
    }

    pub fn vertex_count(&self, x: &FreeBimodElement) -> usize {
        usize::from(x.root.is_some())
            + x.parts
                .iter()
                .map(|p| 1 + p.above.iter().flatten().count())
                .sum::<usize>()
    }

    pub fn unit_of(&self, e: &Elem) -> Result<FreeBimodElement> {
        let p = self
            .base
            .m
            .id(e)
            .ok_or_else(|| Error::UnknownElement(e.to_string()))?;
        Ok(FreeBimodElement {
            root: None,
            parts: vec![PearlPart {
                pearl: p,
                above: vec![None; self.base.m.arity(p)],
            }],
        })
    }

    pub fn normalize(&self, x: &FreeBimodElement) -> FreeBimodElement {
        let mut y = x.clone();
        for p in &mut y.parts {
            self.base.normalize_part(p);
        }
        if matches!(y.root, Some(r) if self.base.is_unit(r)) && y.parts.len() == 1 {
            y.root = None;
        }
        y
    }

    pub fn is_normal(&self, x: &FreeBimodElement) -> bool {
        x.parts.iter().all(|p| self.base.part_is_normal(p))
            && match x.root {
                None => x.parts.len() == 1,
                Some(r) => !self.base.is_unit(r) && x.parts.len() == self.base.ox().arity(r),
            }
    }

    /// `γ(y; xs)`.
    pub fn left(&self, y: Id, xs: &[FreeBimodElement]) -> Result<FreeBimodElement> {
        let b = &self.base;
        let yp = b.ox().profile(y).clone();
        if xs.len() != yp.arity() {
            return Err(Error::Precondition(format!(
                "{} takes {} arguments, got {}",
                b.ox().show(y),
                yp.arity(),
                xs.len()
            )));
        }
        for (j, x) in xs.iter().enumerate() {
            let out = self.profile(x).output;
            if out != yp.inputs[j] {
                return Err(Error::ColourMismatch(format!(
                    "argument {} has output {}, input wants {}",
                    j + 1,
                    out.short(),
                    yp.inputs[j].short()
                )));
            }
        }
        b.bound(xs.iter().map(|x| self.arity(x)).sum())?;
        let mut root = y;
        for j in (0..xs.len()).rev() {
            if let Some(r) = xs[j].root {
                root = b.compose(root, j + 1, r)?;
            }
        }
        let parts = xs.iter().flat_map(|x| x.parts.iter().cloned()).collect();
        Ok(self.normalize(&FreeBimodElement {
            root: Some(root),
            parts,
        }))
    }

    /// `x ∘^i y`.
    pub fn right(&self, x: &FreeBimodElement, i: usize, y: Id) -> Result<FreeBimodElement> {
        let b = &self.base;
        let mut off = i;
        if i == 0 {
            return Err(Error::Precondition("inputs start at 1".into()));
        }
        b.bound(self.arity(x) + b.ox().arity(y) - 1)?;
        for (q, p) in x.parts.iter().enumerate() {
            let w = b.part_width(p);
            if off <= w {
                let mut out = x.clone();
                out.parts[q] = b.part_right(p, off, y)?;
                return Ok(self.normalize(&out));
            }
            off -= w;
        }
        Err(Error::Precondition(format!("no input {i}")))
    }

    /// Planar tree and the set of pearls (preorder indices).
    pub fn tree(&self, x: &FreeBimodElement) -> (Tree, BTreeSet<usize>) {
        let b = &self.base;
        let pts: Vec<Tree> = x.parts.iter().map(|p| b.part_tree(p)).collect();
        match x.root {
            None => (pts[0].clone(), BTreeSet::from([0])),
            Some(r) => {
                let mut marks = BTreeSet::new();
                let mut next = 1;
                for t in &pts {
                    marks.insert(next);
                    next += t.vertex_count();
                }
                (
                    Tree::Vertex {
                        out: b.ox().output(r),
                        inputs: pts,
                    },
                    marks,
                )
            }
        }
    }

    pub fn label(&self, x: &FreeBimodElement) -> String {
        let (t, marks) = self.tree(x);
        let mut labels = Vec::new();
        if let Some(r) = x.root {
            labels.push(self.base.ox().elem(r).label.clone());
        }
        for p in &x.parts {
            self.base.part_labels(p, &mut labels);
        }
        self.base.show(&t, marks, &labels)
    }

    pub fn elem(&self, x: &FreeBimodElement) -> Elem {
        Elem::new(self.profile(x), self.label(x))
    }

    pub fn tables(&self) -> Result<BimoduleTables> {
        let mut seq = FiniteSSequence::new(self.base.o.carrier().colours(), self.base.max_arity);
        for x in &self.elems {
            seq.insert(self.profile(x), self.label(x))?;
        }
        let mut t = BimoduleTables::new(self.base.o.clone(), seq);
        let ix = t.indexed().clone();
        let of: BTreeMap<String, &FreeBimodElement> =
            self.elems.iter().map(|x| (self.label(x), x)).collect();
        let back = |id: Id| of[&ix.elem(id).label];
        let ox = self.base.ox().clone();
        for a in ox.ids() {
            let cols = ox.profile(a).inputs.clone();
            for ms in t.tuples(&cols, self.base.max_arity) {
                let xs: Vec<FreeBimodElement> = ms.iter().map(|m| back(*m).clone()).collect();
                let z = self.left(a, &xs)?;
                t.set_gamma_id(a, ms, ix.id(&self.elem(&z)).expect("closed"));
            }
        }
        for (m, i, a) in t.right_triples() {
            let z = self.right(back(m), i, a)?;
            t.set_right_id(m, i, a, ix.id(&self.elem(&z)).expect("closed"));
        }
        Ok(t)
    }

    pub fn cut_orders(&self, x: &FreeBimodElement) -> Vec<Vec<BimodCut>> {
        let mut cuts = Vec::new();
        for (q, p) in x.parts.iter().enumerate() {
            for (j, a) in p.above.iter().enumerate() {
                if a.is_some() {
                    cuts.push(BimodCut::Above(q, j));
                }
            }
        }
        if x.root.is_some() {
            cuts.push(BimodCut::Root);
        }
        permutations(&cuts)
    }

    pub fn fold_with_order(
        &self,
        h: &SSeqMap,
        n: &BimoduleTables,
        x: &FreeBimodElement,
        order: &[BimodCut],
    ) -> Result<Elem> {
        let b = &self.base;
        let ox = b.ox();
        let undefined = |what: String| Error::Undefined(format!("fold: {what}"));
        let mut vals: Vec<Elem> = x
            .parts
            .iter()
            .map(|p| b.pearl_value(h, p))
            .collect::<Result<_>>()?;
        let mut whole: Option<Elem> = None;
        let mut done: Vec<Vec<bool>> = x.parts.iter().map(|p| vec![false; p.above.len()]).collect();
        let width = |q: usize, done: &Vec<Vec<bool>>| -> usize {
            x.parts[q]
                .above
                .iter()
                .enumerate()
                .map(|(j, a)| {
                    if done[q][j] {
                        a.map_or(1, |v| ox.arity(v))
                    } else {
                        1
                    }
                })
                .sum()
        };
        for cut in order {
            match *cut {
                BimodCut::Root => {
                    let r = x
                        .root
                        .ok_or_else(|| Error::Precondition("no root vertex".into()))?;
                    let g = n
                        .gamma(ox.elem(r), &vals)
                        .ok_or_else(|| undefined(format!("γ({}; …)", ox.elem(r))))?;
                    whole = Some(g);
                }
                BimodCut::Above(q, j) => {
                    let v = x.parts[q].above[j]
                        .ok_or_else(|| Error::Precondition("no vertex there".into()))?;
                    let mut pos = 1;
                    for (jj, a) in x.parts[q].above[..j].iter().enumerate() {
                        pos += if done[q][jj] {
                            a.map_or(1, |w| ox.arity(w))
                        } else {
                            1
                        };
                    }
                    match whole.as_mut() {
                        None => {
                            vals[q] = n.right(&vals[q], pos, ox.elem(v)).ok_or_else(|| {
                                undefined(format!("{} ∘^{pos} {}", vals[q], ox.elem(v)))
                            })?;
                        }
                        Some(w) => {
                            let shift: usize = (0..q).map(|qq| width(qq, &done)).sum();
                            let at = pos + shift;
                            *w = n
                                .right(w, at, ox.elem(v))
                                .ok_or_else(|| undefined(format!("{w} ∘^{at} {}", ox.elem(v))))?;
                        }
                    }
                    done[q][j] = true;
                }
            }
        }
        Ok(whole.unwrap_or_else(|| vals.swap_remove(0)))
    }

    pub fn fold(&self, h: &SSeqMap, n: &BimoduleTables, x: &FreeBimodElement) -> Result<Elem> {
        let mut order: Vec<BimodCut> = Vec::new();
        for (q, p) in x.parts.iter().enumerate() {
            for (j, a) in p.above.iter().enumerate() {
                if a.is_some() {
                    order.push(BimodCut::Above(q, j));
                }
            }
        }
        if x.root.is_some() {
            order.push(BimodCut::Root);
        }
        self.fold_with_order(h, n, x, &order)
    }
}

fn fill_roots(
    b: &Base,
    parts: &[PearlPart],
    cols: &[Colour],
    cur: &mut Vec<PearlPart>,
    width: usize,
    r: Id,
    out: &mut Vec<FreeBimodElement>,
) {
    if cur.len() == cols.len() {
        out.push(FreeBimodElement {
            root: Some(r),
            parts: cur.clone(),
        });
        return;
    }
    let want = cols[cur.len()];
    for p in parts {
        let w = b.part_width(p);
        if b.m.output(p.pearl) == want && width + w <= b.max_arity {
            cur.push(p.clone());
            fill_roots(b, parts, cols, cur, width + w, r, out);
            cur.pop();
        }
    }
}

fn permutations<T: Copy>(items: &[T]) -> Vec<Vec<T>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for k in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

pub fn free_ib_elements(
    o: &FiniteOperad,
    m: &FiniteSSequence,
    profile: &Profile,
) -> Result<Vec<FreeIbElement>> {
    Ok(FreeIb::new(o, m, profile.arity().max(o.max_arity()))?.elements(profile))
}

pub fn free_bimod_elements(
    o: &FiniteOperad,
    m: &FiniteSSequence,
    profile: &Profile,
) -> Result<Vec<FreeBimodElement>> {
    Ok(FreeBimod::new(o, m, profile.arity().max(o.max_arity()))?.elements(profile))
}

/// Both sides of the adjunction bijection, counted by exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjunctionReport {
    /// Structure maps out of the free object (truncated at the target's arity).
    pub free_maps: u128,
    /// Maps of sequences from the generators into the target.
    pub sequence_maps: u128,
    /// Triangle identities: folding a map's restriction gives the map back.
    pub triangle: AxiomReport,
}

impl AdjunctionReport {
    pub fn passed(&self) -> bool {
        self.free_maps == self.sequence_maps && self.triangle.passed()
    }
}

/// Constraint `value[out] == op(values[ins])` over candidate sets.
struct Search<'a> {
    candidates: Vec<Vec<Id>>,
    /// Constraints keyed by the last position they mention.
    checks: Vec<Vec<Box<dyn Fn(&[Id]) -> bool + 'a>>>,
    found: Vec<Vec<Id>>,
    limit: usize,
}

impl Search<'_> {
    fn run(&mut self, cur: &mut Vec<Id>) -> Result<()> {
        let k = cur.len();
        if k == self.candidates.len() {
            if self.found.len() >= self.limit {
                return Err(Error::SizeCap {
                    what: "structure maps".into(),
                    needed: self.found.len() as u128 + 1,
                    cap: self.limit as u128,
                });
            }
            self.found.push(cur.clone());
            return Ok(());
        }
        for ci in 0..self.candidates[k].len() {
            cur.push(self.candidates[k][ci]);
            if self.checks[k].iter().all(|c| c(cur)) {
                self.run(cur)?;
            }
            cur.pop();
        }
        Ok(())
    }
}

fn sequence_map_count(m: &Indexed, n: &Indexed) -> u128 {
    m.ids().fold(1u128, |acc, id| {
        acc.saturating_mul(n.at_profile(m.profile(id)).len() as u128)
    })
}

fn sequence_maps(m: &Indexed, n: &Indexed) -> Vec<SSeqMap> {
    let mut out = vec![SSeqMap::new()];
    for id in m.ids() {
        let mut next = Vec::new();
        for h in &out {
            for &t in n.at_profile(m.profile(id)) {
                let mut g = h.clone();
                g.set(m.elem(id).clone(), n.elem(t).label.clone());
                next.push(g);
            }
        }
        out = next;
    }
    out
}

const MAP_LIMIT: usize = 100_000;

/// Exhaustive adjunction witness for the free infinitesimal bimodule.
pub fn adjunction_check_ib(
    o: &FiniteOperad,
    m: &FiniteSSequence,
    n: &InfBimoduleTables,
) -> Result<AdjunctionReport> {
    let free = FreeIb::new(o, m, n.max_arity())?;
    let ft = free.tables()?;
    let fx = ft.indexed();
    let nx = n.indexed();
    let order: Vec<Id> = free
        .all()
        .iter()
        .map(|x| fx.id(&free.elem(x)).expect("listed"))
        .collect();
    let pos: BTreeMap<Id, usize> = order.iter().enumerate().map(|(k, id)| (*id, k)).collect();
    let mut checks: Vec<Vec<Box<dyn Fn(&[Id]) -> bool>>> =
        (0..order.len()).map(|_| Vec::new()).collect();
    for (a, i, x) in ft.left_triples() {
        let z = ft.left_id(a, i, x).expect("free tables are total");
        let (px, pz) = (pos[&x], pos[&z]);
        checks[px.max(pz)].push(Box::new(move |v: &[Id]| {
            n.left_id(a, i, v[px]) == Some(v[pz])
        }));
    }
    for (x, i, a) in ft.right_triples() {
        let z = ft.right_id(x, i, a).expect("free tables are total");
        let (px, pz) = (pos[&x], pos[&z]);
        checks[px.max(pz)].push(Box::new(move |v: &[Id]| {
            n.right_id(v[px], i, a) == Some(v[pz])
        }));
    }
    let candidates = order
        .iter()
        .map(|id| nx.at_profile(fx.profile(*id)).to_vec())
        .collect();
    let mut s = Search {
        candidates,
        checks,
        found: Vec::new(),
        limit: MAP_LIMIT,
    };
    s.run(&mut Vec::new())?;
    let mut triangle = AxiomReport::new();
    for f in &s.found {
        let mut h = SSeqMap::new();
        for g in free.generators().ids() {
            let e = free.generators().elem(g);
            let u = fx.id(&free.elem(&free.unit_of(e)?)).expect("generator");
            h.set(e.clone(), nx.elem(f[pos[&u]]).label.clone());
        }
        for (k, x) in free.all().iter().enumerate() {
            let got = free.fold(&h, n, x)?;
            triangle.expect(got == *nx.elem(f[k]), "fold-restriction", || {
                format!("{} ↦ {} vs {got}", free.label(x), nx.elem(f[k]))
            });
        }
    }
    Ok(AdjunctionReport {
        free_maps: s.found.len() as u128,
        sequence_maps: sequence_map_count(free.generators(), nx),
        triangle: triangle.finish(),
    })
}

/// Exhaustive adjunction witness for the free bimodule.
pub fn adjunction_check_bimod(
    o: &FiniteOperad,
    m: &FiniteSSequence,
    n: &BimoduleTables,
) -> Result<AdjunctionReport> {
    let free = FreeBimod::new(o, m, n.max_arity())?;
    let ft = free.tables()?;
    let fx = ft.indexed();
    let nx = n.indexed();
    let order: Vec<Id> = free
        .all()
        .iter()
        .map(|x| fx.id(&free.elem(x)).expect("listed"))
        .collect();
    let pos: BTreeMap<Id, usize> = order.iter().enumerate().map(|(k, id)| (*id, k)).collect();
    let mut checks: Vec<Vec<Box<dyn Fn(&[Id]) -> bool>>> =
        (0..order.len()).map(|_| Vec::new()).collect();
    let (gammas, _) = ft.entries();
    let ox = o.indexed();
    for (a, ms, z) in gammas {
        let a = ox.id(&a).expect("operation");
        let ps: Vec<usize> = ms
            .iter()
            .map(|e| pos[&fx.id(e).expect("element")])
            .collect();
        let pz = pos[&fx.id(&z).expect("element")];
        let last = ps.iter().copied().chain([pz]).max().expect("nonempty");
        checks[last].push(Box::new(move |v: &[Id]| {
            let args: Vec<Id> = ps.iter().map(|p| v[*p]).collect();
            n.gamma_id(a, &args) == Some(v[pz])
        }));
    }
    for (x, i, a) in ft.right_triples() {
        let z = ft.right_id(x, i, a).expect("free tables are total");
        let (px, pz) = (pos[&x], pos[&z]);
        checks[px.max(pz)].push(Box::new(move |v: &[Id]| {
            n.right_id(v[px], i, a) == Some(v[pz])
        }));
    }
    let candidates = order
        .iter()
        .map(|id| nx.at_profile(fx.profile(*id)).to_vec())
        .collect();
    let mut s = Search {
        candidates,
        checks,
        found: Vec::new(),
        limit: MAP_LIMIT,
    };
    s.run(&mut Vec::new())?;
    let mut triangle = AxiomReport::new();
    for f in &s.found {
        let mut h = SSeqMap::new();
        for g in free.generators().ids() {
            let e = free.generators().elem(g);
            let u = fx.id(&free.elem(&free.unit_of(e)?)).expect("generator");
            h.set(e.clone(), nx.elem(f[pos[&u]]).label.clone());
        }
        for (k, x) in free.all().iter().enumerate() {
            let got = free.fold(&h, n, x)?;
            triangle.expect(got == *nx.elem(f[k]), "fold-restriction", || {
                format!("{} ↦ {} vs {got}", free.label(x), nx.elem(f[k]))
            });
        }
    }
    Ok(AdjunctionReport {
        free_maps: s.found.len() as u128,
        sequence_maps: sequence_map_count(free.generators(), nx),
        triangle: triangle.finish(),
    })
}

/// All maps of sequences from the generators into `n`.
pub fn all_sequence_maps(m: &FiniteSSequence, n: &FiniteSSequence) -> Vec<SSeqMap> {
    sequence_maps(&Indexed::new(m.clone()), &Indexed::new(n.clone()))
}
