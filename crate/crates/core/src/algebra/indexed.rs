use std::collections::{BTreeMap, HashMap};

use crate::seqcore::{Colour, Elem, FiniteSSequence, Profile};

pub type Id = u32;

/// A frozen sequence with dense element ids, so tables can key on integers.
#[derive(Clone, Debug)]
pub struct Indexed {
    seq: FiniteSSequence,
    elems: Vec<Elem>,
    index: HashMap<Elem, Id>,
    by_output: BTreeMap<Colour, Vec<Id>>,
    by_profile: HashMap<Profile, Vec<Id>>,
}

impl Indexed {
    pub fn new(seq: FiniteSSequence) -> Self {
        let elems = seq.elems();
        let mut index = HashMap::with_capacity(elems.len());
        let mut by_output: BTreeMap<Colour, Vec<Id>> = BTreeMap::new();
        let mut by_profile: HashMap<Profile, Vec<Id>> = HashMap::new();
        for (k, e) in elems.iter().enumerate() {
            index.insert(e.clone(), k as Id);
            by_output.entry(e.output()).or_default().push(k as Id);
            by_profile
                .entry(e.profile.clone())
                .or_default()
                .push(k as Id);
        }
        Indexed {
            seq,
            elems,
            index,
            by_output,
            by_profile,
        }
    }

    pub fn seq(&self) -> &FiniteSSequence {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn max_arity(&self) -> usize {
        self.seq.max_arity()
    }

    pub fn elem(&self, id: Id) -> &Elem {
        &self.elems[id as usize]
    }

    pub fn id(&self, e: &Elem) -> Option<Id> {
        self.index.get(e).copied()
    }

    pub fn id_at(&self, profile: &Profile, label: &str) -> Option<Id> {
        self.index.get(&Elem::new(profile.clone(), label)).copied()
    }

    pub fn arity(&self, id: Id) -> usize {
        self.elems[id as usize].arity()
    }

    pub fn profile(&self, id: Id) -> &Profile {
        &self.elems[id as usize].profile
    }

    pub fn output(&self, id: Id) -> Colour {
        self.elems[id as usize].output()
    }

    /// Colour of 1-based input `i`.
    pub fn input(&self, id: Id, i: usize) -> Colour {
        self.elems[id as usize].profile.inputs[i - 1]
    }

    pub fn with_output(&self, c: Colour) -> &[Id] {
        self.by_output.get(&c).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn at_profile(&self, p: &Profile) -> &[Id] {
        self.by_profile.get(p).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn ids(&self) -> impl Iterator<Item = Id> {
        0..self.elems.len() as Id
    }

    pub fn show(&self, id: Id) -> String {
        self.elems[id as usize].to_string()
    }
}
