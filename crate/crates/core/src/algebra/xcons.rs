//! Collapsing the closed part of a structure under the monoid-action operad,
//! and the two-coloured operad built from a multiplicative operad and a
//! bimodule over it.

use super::builtin::{closed_label, star_closed, star_open};
use super::modules::{check_bimodule_map, induced_bimodule, BimoduleTables};
use super::operad::{FiniteOperad, OperadMap};
use crate::error::{Error, Result};
use crate::report::AxiomReport;
use crate::seqcore::{profile_closed, Colour, Elem, FiniteSSequence, Profile, SSeqMap};

/// Keep only `η(*n)` in each closed profile; open profiles are untouched.
pub fn m_star(m: &BimoduleTables, eta: &SSeqMap) -> Result<BimoduleTables> {
    let keep = closed_images(eta, m.carrier())?;
    m.sub_bimodule(|e| e.output() == Colour::Open || keep.contains(e))
}

/// Operad analogue of [`m_star`].
pub fn x_star(x: &FiniteOperad, eta: &SSeqMap) -> Result<FiniteOperad> {
    let keep = closed_images(eta, x.carrier())?;
    Ok(x.sub_operad(|e| e.output() == Colour::Open || keep.contains(e)))
}

fn closed_images(eta: &SSeqMap, target: &FiniteSSequence) -> Result<Vec<Elem>> {
    let mut keep = Vec::new();
    for n in 0..=target.max_arity() {
        if let Some(img) = eta.get(&star_closed(n)) {
            if !target.contains(&img) {
                return Err(Error::InvalidMap(format!("η(*{n}) = {img} not in target")));
            }
            keep.push(img);
        }
    }
    Ok(keep)
}

/// Inputs to the construction: `alpha` from the unital associative operad
/// into `o`, and `beta` an `o`-bimodule map from `o` into `b`.
pub struct XInput<'a> {
    pub o: &'a FiniteOperad,
    pub b: &'a BimoduleTables,
    pub alpha: &'a OperadMap,
    pub beta: &'a SSeqMap,
}

impl XInput<'_> {
    fn mu(&self) -> Result<Elem> {
        self.alpha
            .image(&star_closed(2))
            .ok_or_else(|| Error::InvalidMap("α(*2) undefined".into()))
    }

    fn point(&self) -> Result<Elem> {
        let a0 = self
            .alpha
            .image(&star_closed(0))
            .ok_or_else(|| Error::InvalidMap("α(*0) undefined".into()))?;
        self.beta
            .get(&a0)
            .ok_or_else(|| Error::InvalidMap(format!("β undefined at {a0}")))
    }
}

/// Both sides of the unit condition `μ(u; x) = x = μ(x; u)` with
/// `μ = α(*2)` and `u = β(α(*0))`, for every element `x` of `b`.
pub fn check_assumption_13(input: &XInput<'_>) -> AxiomReport {
    let mut rep = AxiomReport::new();
    let (mu, u) = match (input.mu(), input.point()) {
        (Ok(m), Ok(u)) => (m, u),
        (Err(e), _) | (_, Err(e)) => {
            rep.record("unit-data", e.to_string());
            return rep.finish();
        }
    };
    for x in input.b.carrier().elems() {
        let left = input.b.gamma(&mu, &[u.clone(), x.clone()]);
        let right = input.b.gamma(&mu, &[x.clone(), u.clone()]);
        if x.arity() > input.b.max_arity() {
            continue;
        }
        rep.expect(left.as_ref() == Some(&x), "unit-13-left", || {
            format!(
                "μ(u; {x}) = {}",
                left.as_ref().map_or("undefined".into(), |e| e.to_string())
            )
        });
        rep.expect(right.as_ref() == Some(&x), "unit-13-right", || {
            format!(
                "μ({x}; u) = {}",
                right.as_ref().map_or("undefined".into(), |e| e.to_string())
            )
        });
    }
    rep.finish()
}

/// Checks the maps, then the unit condition, then builds the operad.
pub fn x_construction(input: &XInput<'_>) -> Result<(FiniteOperad, SSeqMap)> {
    if input.o.carrier().colours() != [Colour::Closed] {
        return Err(Error::Precondition(
            "the operad must be one-coloured".into(),
        ));
    }
    let over_self = induced_bimodule(&OperadMap::identity(input.o));
    let rep = check_bimodule_map(input.beta, &over_self, input.b);
    if !rep.passed() {
        return Err(Error::InvalidMap(format!("β is not a bimodule map: {rep}")));
    }
    let rep = check_assumption_13(input);
    if let Some(v) = rep.violations.first() {
        return Err(Error::UnitAssumption {
            side: if v.axiom.ends_with("left") {
                "left"
            } else {
                "right"
            }
            .into(),
            witness: v.instance.clone(),
        });
    }
    x_construction_unchecked(input)
}

fn open_profile_of(p: &Profile) -> Profile {
    let mut inputs = p.inputs.clone();
    inputs.push(Colour::Open);
    Profile::new(inputs, Colour::Open)
}

fn closed_profile_of(p: &Profile) -> Profile {
    let mut inputs = p.inputs.clone();
    inputs.pop();
    Profile::new(inputs, Colour::Closed)
}

/// Builds the two-coloured operad without checking the unit condition.
/// Closed part is `o`, open arity-`n` part is `b` at arity `n - 1`.
pub fn x_construction_unchecked(input: &XInput<'_>) -> Result<(FiniteOperad, SSeqMap)> {
    let (o, b) = (input.o, input.b);
    let max = o.max_arity();
    let mut seq = FiniteSSequence::two_coloured(max);
    for e in o.carrier().elems() {
        seq.insert(e.profile.clone(), e.label.clone())?;
    }
    for e in b.carrier().elems() {
        if e.arity() < max {
            seq.insert(open_profile_of(&e.profile), e.label.clone())?;
        }
    }
    let mut x = FiniteOperad::new(seq);
    let u_c = o
        .unit(Colour::Closed)
        .ok_or_else(|| Error::MissingUnit("closed".into()))?;
    x.set_unit(Colour::Closed, &u_c.label)?;
    let point = input.point()?;
    x.set_unit(Colour::Open, &point.label)?;
    let mu = input.mu()?;

    let to_b = |e: &Elem| Elem::new(closed_profile_of(&e.profile), e.label.clone());
    let ix = x.indexed().clone();
    for (p, i, q) in x.composable_triples() {
        let (ep, eq) = (ix.elem(p), ix.elem(q));
        let r = match (ep.output(), eq.output()) {
            (Colour::Closed, _) => o.compose(ep, i, eq),
            (Colour::Open, Colour::Closed) => b
                .right(&to_b(ep), i, eq)
                .map(|z| Elem::new(open_profile_of(&z.profile), z.label)),
            (Colour::Open, Colour::Open) => b
                .gamma(&mu, &[to_b(ep), to_b(eq)])
                .map(|z| Elem::new(open_profile_of(&z.profile), z.label)),
        };
        if let Some(z) = r.and_then(|z| ix.id(&z)) {
            x.set_compose_id(p, i, q, z);
        }
    }

    let mut eta = SSeqMap::new();
    for n in 0..=max {
        if let Some(a) = input.alpha.image(&star_closed(n)) {
            eta.set(star_closed(n), a.label);
        }
        if n >= 1 {
            if let Some(img) = input
                .alpha
                .image(&star_closed(n - 1))
                .and_then(|a| input.beta.get(&a))
            {
                eta.set(star_open(n), img.label);
            }
        }
    }
    Ok((x, eta))
}

/// Identity data on the unital associative operad: `o = b = As`.
pub fn as_pair(max_arity: usize) -> (FiniteOperad, BimoduleTables, OperadMap, SSeqMap) {
    let as_op = super::builtin::builtin_as(false, max_arity);
    let b = induced_bimodule(&OperadMap::identity(&as_op));
    let alpha = OperadMap::identity(&as_op);
    let beta = SSeqMap::identity(as_op.carrier());
    (as_op, b, alpha, beta)
}

/// Label of `*n` in the associative operad, exposed for callers relabelling.
pub fn as_label(n: usize) -> (Profile, String) {
    (profile_closed(n), closed_label(n))
}
