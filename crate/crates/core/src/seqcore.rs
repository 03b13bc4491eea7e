//! Colours, profiles and finite truncated S-sequences.
//!
//! A sequence assigns to each profile a finite sorted set of opaque string
//! labels. Absent profiles and empty sets are the same thing. Everything is
//! truncated at `max_arity`; inserting above the bound is an error.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Default truncation bound for sequences.
pub const DEFAULT_MAX_ARITY: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Colour {
    Closed,
    Open,
}

impl Colour {
    pub const ALL: [Colour; 2] = [Colour::Closed, Colour::Open];

    pub fn name(self) -> &'static str {
        match self {
            Colour::Closed => "closed",
            Colour::Open => "open",
        }
    }

    pub fn short(self) -> char {
        match self {
            Colour::Closed => 'c',
            Colour::Open => 'o',
        }
    }

    /// Accepts the long name or the one-letter form.
    pub fn parse(s: &str) -> Option<Colour> {
        match s {
            "closed" | "c" => Some(Colour::Closed),
            "open" | "o" => Some(Colour::Open),
            _ => None,
        }
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.short())
    }
}

/// Input colours and an output colour. Ordered by arity, then inputs, then output.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Profile {
    pub inputs: Vec<Colour>,
    pub output: Colour,
}

impl Profile {
    pub fn new(inputs: Vec<Colour>, output: Colour) -> Self {
        Profile { inputs, output }
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    /// Colour of the 1-based input `i`.
    pub fn input(&self, i: usize) -> Option<Colour> {
        if i == 0 {
            None
        } else {
            self.inputs.get(i - 1).copied()
        }
    }

    /// Profile of `x ∘_i y` when `self` is the outer profile. No colour check.
    pub fn graft(&self, i: usize, inner: &Profile) -> Profile {
        let mut inputs = Vec::with_capacity(self.arity() + inner.arity() - 1);
        inputs.extend_from_slice(&self.inputs[..i - 1]);
        inputs.extend_from_slice(&inner.inputs);
        inputs.extend_from_slice(&self.inputs[i..]);
        Profile::new(inputs, self.output)
    }

    /// Parses `c,c,o;o` (inputs, then output after the semicolon).
    pub fn parse(s: &str) -> Result<Profile> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (ins, out) = s.split_once(';').ok_or_else(|| Error::Schema {
            path: "profile".into(),
            message: format!("expected inputs;output, got {s:?}"),
        })?;
        let output = Colour::parse(out.trim()).ok_or_else(|| Error::UnknownColour(out.into()))?;
        let mut inputs = Vec::new();
        for tok in ins.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            inputs.push(Colour::parse(tok).ok_or_else(|| Error::UnknownColour(tok.into()))?);
        }
        Ok(Profile::new(inputs, output))
    }
}

impl Ord for Profile {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.arity()
            .cmp(&other.arity())
            .then_with(|| self.inputs.cmp(&other.inputs))
            .then_with(|| self.output.cmp(&other.output))
    }
}

impl PartialOrd for Profile {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.inputs.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ";{})", self.output)
    }
}

/// `(c^n; c)`
pub fn profile_closed(n: usize) -> Profile {
    Profile::new(vec![Colour::Closed; n], Colour::Closed)
}

/// `(c^n, o; o)`, arity `n + 1`.
pub fn profile_open(n: usize) -> Profile {
    let mut inputs = vec![Colour::Closed; n];
    inputs.push(Colour::Open);
    Profile::new(inputs, Colour::Open)
}

pub type Label = String;

/// A labelled element sitting at a profile.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    pub profile: Profile,
    pub label: Label,
}

impl Elem {
    pub fn new(profile: Profile, label: impl Into<Label>) -> Self {
        Elem {
            profile,
            label: label.into(),
        }
    }

    pub fn arity(&self) -> usize {
        self.profile.arity()
    }

    pub fn output(&self) -> Colour {
        self.profile.output
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.label, self.profile)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSSequence {
    colours: Vec<Colour>,
    max_arity: usize,
    entries: BTreeMap<Profile, Vec<Label>>,
}

impl FiniteSSequence {
    pub fn new(colours: &[Colour], max_arity: usize) -> Self {
        let mut colours = colours.to_vec();
        colours.sort();
        colours.dedup();
        FiniteSSequence {
            colours,
            max_arity,
            entries: BTreeMap::new(),
        }
    }

    /// Both built-in colours.
    pub fn two_coloured(max_arity: usize) -> Self {
        Self::new(&Colour::ALL, max_arity)
    }

    pub fn colours(&self) -> &[Colour] {
        &self.colours
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn check_profile(&self, profile: &Profile) -> Result<()> {
        if profile.arity() > self.max_arity {
            return Err(Error::ArityOverflow {
                profile: profile.to_string(),
                arity: profile.arity(),
                max_arity: self.max_arity,
            });
        }
        for c in profile
            .inputs
            .iter()
            .chain(std::iter::once(&profile.output))
        {
            if !self.colours.contains(c) {
                return Err(Error::UnknownColour(c.name().into()));
            }
        }
        Ok(())
    }

    /// Adds a label; duplicates are rejected.
    pub fn insert(&mut self, profile: Profile, label: impl Into<Label>) -> Result<()> {
        self.check_profile(&profile)?;
        let label = label.into();
        let path = profile.to_string();
        let set = self.entries.entry(profile).or_default();
        match set.binary_search(&label) {
            Ok(_) => Err(Error::DuplicateLabel { path, label }),
            Err(pos) => {
                set.insert(pos, label);
                Ok(())
            }
        }
    }

    /// Adds a label unless already present. Returns whether it was new.
    pub fn ensure(&mut self, profile: Profile, label: impl Into<Label>) -> Result<bool> {
        let label = label.into();
        if self.contains_label(&profile, &label) {
            return Ok(false);
        }
        self.insert(profile, label)?;
        Ok(true)
    }

    pub fn elements(&self, profile: &Profile) -> &[Label] {
        self.entries.get(profile).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn cardinality(&self, profile: &Profile) -> usize {
        self.elements(profile).len()
    }

    pub fn contains_label(&self, profile: &Profile, label: &str) -> bool {
        self.entries
            .get(profile)
            .is_some_and(|s| s.binary_search_by(|l| l.as_str().cmp(label)).is_ok())
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.contains_label(&e.profile, &e.label)
    }

    /// Nonempty profiles in canonical order.
    pub fn profiles(&self) -> impl Iterator<Item = &Profile> {
        self.entries
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(p, _)| p)
    }

    /// All elements in canonical order.
    pub fn elems(&self) -> Vec<Elem> {
        self.entries
            .iter()
            .flat_map(|(p, ls)| ls.iter().map(move |l| Elem::new(p.clone(), l.clone())))
            .collect()
    }

    pub fn elems_at(&self, profile: &Profile) -> Vec<Elem> {
        self.elements(profile)
            .iter()
            .map(|l| Elem::new(profile.clone(), l.clone()))
            .collect()
    }

    pub fn total(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Keeps only profiles all of whose colours equal `colour`.
    pub fn restrict_to_colour(&self, colour: Colour) -> FiniteSSequence {
        let mut out = FiniteSSequence::new(&[colour], self.max_arity);
        for (p, ls) in &self.entries {
            if p.output == colour && p.inputs.iter().all(|c| *c == colour) && !ls.is_empty() {
                out.entries.insert(p.clone(), ls.clone());
            }
        }
        out
    }

    /// Keeps the elements accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Elem) -> bool) -> FiniteSSequence {
        let mut out = FiniteSSequence::new(&self.colours, self.max_arity);
        for e in self.elems() {
            if keep(&e) {
                out.entries.entry(e.profile).or_default().push(e.label);
            }
        }
        out
    }

    pub fn store(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("sequence serializes")
    }

    pub fn to_doc(&self) -> SequenceDoc {
        SequenceDoc {
            colours: self.colours.iter().map(|c| c.name().to_string()).collect(),
            max_arity: self.max_arity,
            profiles: self
                .entries
                .iter()
                .filter(|(_, v)| !v.is_empty())
                .map(|(p, ls)| ProfileDoc {
                    inputs: p.inputs.iter().map(|c| c.name().to_string()).collect(),
                    output: p.output.name().to_string(),
                    elements: ls.clone(),
                })
                .collect(),
        }
    }

    pub fn load(document: &str) -> Result<FiniteSSequence> {
        let v: Value = serde_json::from_str(document).map_err(|e| Error::Json(e.to_string()))?;
        Self::from_value(&v, "$")
    }

    /// Validates a parsed document, naming the offending path on failure.
    pub fn from_value(v: &Value, root: &str) -> Result<FiniteSSequence> {
        let obj = v
            .as_object()
            .ok_or_else(|| schema(root, "expected an object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "colours" | "maxArity" | "profiles") {
                return Err(schema(&format!("{root}.{key}"), "unknown field"));
            }
        }
        let cpath = format!("{root}.colours");
        let cols = obj
            .get("colours")
            .and_then(Value::as_array)
            .ok_or_else(|| schema(&cpath, "expected an array of colour names"))?;
        let mut colours = Vec::new();
        for (k, c) in cols.iter().enumerate() {
            colours.push(colour_at(c, &format!("{cpath}[{k}]"))?);
        }
        if colours.is_empty() {
            return Err(schema(&cpath, "colour set must be nonempty"));
        }
        let max_arity = obj
            .get("maxArity")
            .and_then(Value::as_u64)
            .ok_or_else(|| schema(&format!("{root}.maxArity"), "expected a natural number"))?
            as usize;
        let mut seq = FiniteSSequence::new(&colours, max_arity);
        let ppath = format!("{root}.profiles");
        let profs = obj
            .get("profiles")
            .and_then(Value::as_array)
            .ok_or_else(|| schema(&ppath, "expected an array"))?;
        for (k, p) in profs.iter().enumerate() {
            let here = format!("{ppath}[{k}]");
            let po = p
                .as_object()
                .ok_or_else(|| schema(&here, "expected an object"))?;
            for key in po.keys() {
                if !matches!(key.as_str(), "inputs" | "output" | "elements") {
                    return Err(schema(&format!("{here}.{key}"), "unknown field"));
                }
            }
            let ins = po
                .get("inputs")
                .and_then(Value::as_array)
                .ok_or_else(|| schema(&format!("{here}.inputs"), "expected an array"))?;
            let mut inputs = Vec::new();
            for (j, c) in ins.iter().enumerate() {
                inputs.push(colour_at(c, &format!("{here}.inputs[{j}]"))?);
            }
            let output = colour_at(
                po.get("output").unwrap_or(&Value::Null),
                &format!("{here}.output"),
            )?;
            let profile = Profile::new(inputs, output);
            if profile.arity() > max_arity {
                return Err(Error::ArityOverflow {
                    profile: profile.to_string(),
                    arity: profile.arity(),
                    max_arity,
                });
            }
            for c in profile.inputs.iter().chain(std::iter::once(&output)) {
                if !seq.colours.contains(c) {
                    return Err(schema(&here, &format!("colour {} not declared", c.name())));
                }
            }
            let els = po
                .get("elements")
                .and_then(Value::as_array)
                .ok_or_else(|| schema(&format!("{here}.elements"), "expected an array"))?;
            for (j, e) in els.iter().enumerate() {
                let label = e
                    .as_str()
                    .ok_or_else(|| schema(&format!("{here}.elements[{j}]"), "expected a string"))?;
                seq.insert(profile.clone(), label)
                    .map_err(|err| match err {
                        Error::DuplicateLabel { label, .. } => Error::DuplicateLabel {
                            path: format!("{here}.elements[{j}]"),
                            label,
                        },
                        other => other,
                    })?;
            }
        }
        Ok(seq)
    }
}

fn schema(path: &str, message: &str) -> Error {
    Error::Schema {
        path: path.to_string(),
        message: message.to_string(),
    }
}

fn colour_at(v: &Value, path: &str) -> Result<Colour> {
    let s = v
        .as_str()
        .ok_or_else(|| schema(path, "expected a colour name"))?;
    match s {
        "closed" => Ok(Colour::Closed),
        "open" => Ok(Colour::Open),
        _ => Err(schema(path, &format!("unknown colour {s:?}"))),
    }
}

/// Serialized form; field order is the canonical one.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SequenceDoc {
    pub colours: Vec<String>,
    #[serde(rename = "maxArity")]
    pub max_arity: usize,
    pub profiles: Vec<ProfileDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ProfileDoc {
    pub inputs: Vec<String>,
    pub output: String,
    pub elements: Vec<String>,
}

/// `m` is of type `n` when every profile empty in `n` is empty in `m`.
pub fn is_of_type(m: &FiniteSSequence, n: &FiniteSSequence) -> bool {
    m.profiles().all(|p| n.cardinality(p) > 0)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapEntryDoc {
    profile: String,
    source: String,
    target: String,
}

/// A profile-preserving map of element sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SSeqMap {
    map: BTreeMap<Elem, Label>,
}

impl SSeqMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, source: Elem, target_label: impl Into<Label>) {
        self.map.insert(source, target_label.into());
    }

    pub fn get(&self, e: &Elem) -> Option<Elem> {
        self.map
            .get(e)
            .map(|l| Elem::new(e.profile.clone(), l.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Elem, &Label)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Defined exactly on `source` and landing in `target`.
    pub fn validate(&self, source: &FiniteSSequence, target: &FiniteSSequence) -> Result<()> {
        for e in source.elems() {
            let img = self
                .get(&e)
                .ok_or_else(|| Error::InvalidMap(format!("no image for {e}")))?;
            if !target.contains(&img) {
                return Err(Error::InvalidMap(format!(
                    "image {img} of {e} not in target"
                )));
            }
        }
        for (e, _) in self.iter() {
            if !source.contains(e) {
                return Err(Error::InvalidMap(format!("{e} is not a source element")));
            }
        }
        Ok(())
    }

    pub fn identity(seq: &FiniteSSequence) -> SSeqMap {
        let mut m = SSeqMap::new();
        for e in seq.elems() {
            let l = e.label.clone();
            m.set(e, l);
        }
        m
    }

    /// `[{"profile": "(c,c;c)", "source": "*2", "target": "x"}, …]`
    pub fn store(&self) -> String {
        let doc: Vec<MapEntryDoc> = self
            .iter()
            .map(|(e, t)| MapEntryDoc {
                profile: e.profile.to_string(),
                source: e.label.clone(),
                target: t.clone(),
            })
            .collect();
        serde_json::to_string(&doc).expect("map serializes")
    }

    pub fn load(document: &str) -> Result<SSeqMap> {
        let doc: Vec<MapEntryDoc> =
            serde_json::from_str(document).map_err(|e| Error::Json(e.to_string()))?;
        let mut m = SSeqMap::new();
        for (k, d) in doc.into_iter().enumerate() {
            let p = Profile::parse(&d.profile)
                .map_err(|_| schema(&format!("$[{k}].profile"), "bad profile"))?;
            let e = Elem::new(p, d.source);
            if m.map.contains_key(&e) {
                return Err(Error::DuplicateLabel {
                    path: format!("$[{k}].source"),
                    label: e.label,
                });
            }
            m.set(e, d.target);
        }
        Ok(m)
    }

    pub fn then(&self, other: &SSeqMap) -> SSeqMap {
        let mut m = SSeqMap::new();
        for (e, _) in self.iter() {
            if let Some(img) = self.get(e).and_then(|i| other.get(&i)) {
                m.set(e.clone(), img.label);
            }
        }
        m
    }
}
