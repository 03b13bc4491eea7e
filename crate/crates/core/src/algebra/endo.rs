//! Endomorphism operads of finite coloured sets, and sub-structures of them
//! generated by a handful of functions.
//!
//! A function `A_{s1} × … × A_{sn} → A_s` is stored as its value table in
//! mixed radix with the first input most significant. Its label is the table
//! written as digits, so labels are unique per profile.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::{Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::Rng;

use super::indexed::Id;
use super::modules::{tuples_in, BimoduleTables, InfBimoduleTables};
use super::operad::FiniteOperad;
use crate::error::{Error, Result};
use crate::seqcore::{Colour, Elem, FiniteSSequence, Profile};

/// Default cap on the number of elements an End construction may produce.
pub const DEFAULT_CAP: usize = 50_000;

/// Finite sets `A_s = {0, …, size-1}` per colour.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    sizes: BTreeMap<Colour, usize>,
}

impl Family {
    pub fn new(sizes: &[(Colour, usize)]) -> Result<Family> {
        let mut m = BTreeMap::new();
        for &(c, k) in sizes {
            if k == 0 || k > 10 {
                return Err(Error::Precondition(format!(
                    "set at colour {} must have 1..=10 points, got {k}",
                    c.name()
                )));
            }
            m.insert(c, k);
        }
        if m.is_empty() {
            return Err(Error::Precondition("empty family".into()));
        }
        Ok(Family { sizes: m })
    }

    pub fn two(closed: usize, open: usize) -> Result<Family> {
        Family::new(&[(Colour::Closed, closed), (Colour::Open, open)])
    }

    pub fn colours(&self) -> Vec<Colour> {
        self.sizes.keys().copied().collect()
    }

    pub fn size(&self, c: Colour) -> usize {
        self.sizes[&c]
    }

    fn domain(&self, inputs: &[Colour]) -> usize {
        inputs.iter().map(|c| self.size(*c)).product()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndFn {
    pub profile: Profile,
    pub table: Vec<u8>,
}

/// Iterates all argument tuples of `inputs` in table order.
fn for_each_tuple(fam: &Family, inputs: &[Colour], mut f: impl FnMut(&[u8])) {
    let radix: Vec<u8> = inputs.iter().map(|c| fam.size(*c) as u8).collect();
    let mut cur = vec![0u8; inputs.len()];
    loop {
        f(&cur);
        let mut k = cur.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < radix[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}

impl EndFn {
    pub fn label(&self) -> String {
        self.table.iter().map(|v| char::from(b'0' + v)).collect()
    }

    pub fn from_label(profile: Profile, label: &str) -> EndFn {
        EndFn {
            profile,
            table: label.bytes().map(|b| b - b'0').collect(),
        }
    }

    pub fn from_elem(e: &Elem) -> EndFn {
        EndFn::from_label(e.profile.clone(), &e.label)
    }

    pub fn elem(&self) -> Elem {
        Elem::new(self.profile.clone(), self.label())
    }

    pub fn arity(&self) -> usize {
        self.profile.arity()
    }

    pub fn tabulate(fam: &Family, profile: Profile, mut f: impl FnMut(&[u8]) -> u8) -> EndFn {
        let mut table = Vec::with_capacity(fam.domain(&profile.inputs));
        for_each_tuple(fam, &profile.inputs, |args| table.push(f(args)));
        EndFn { profile, table }
    }

    pub fn identity(fam: &Family, c: Colour) -> EndFn {
        EndFn::tabulate(fam, Profile::new(vec![c], c), |a| a[0])
    }

    pub fn eval(&self, fam: &Family, args: &[u8]) -> u8 {
        let mut idx = 0usize;
        for (k, c) in self.profile.inputs.iter().enumerate() {
            idx = idx * fam.size(*c) + args[k] as usize;
        }
        self.table[idx]
    }

    /// `self ∘_i g`: substitute `g` into input `i`.
    pub fn compose(&self, fam: &Family, i: usize, g: &EndFn) -> EndFn {
        debug_assert_eq!(self.profile.inputs[i - 1], g.profile.output);
        let p = self.profile.graft(i, &g.profile);
        let ga = g.arity();
        let mut fargs = vec![0u8; self.arity()];
        EndFn::tabulate(fam, p, |args| {
            fargs[..i - 1].copy_from_slice(&args[..i - 1]);
            fargs[i - 1] = g.eval(fam, &args[i - 1..i - 1 + ga]);
            fargs[i..].copy_from_slice(&args[i - 1 + ga..]);
            self.eval(fam, &fargs)
        })
    }

    /// `self(g_1, …, g_n)`.
    pub fn substitute(&self, fam: &Family, gs: &[EndFn]) -> EndFn {
        let inputs: Vec<Colour> = gs.iter().flat_map(|g| g.profile.inputs.clone()).collect();
        let p = Profile::new(inputs, self.profile.output);
        let mut fargs = vec![0u8; gs.len()];
        EndFn::tabulate(fam, p, |args| {
            let mut off = 0;
            for (k, g) in gs.iter().enumerate() {
                fargs[k] = g.eval(fam, &args[off..off + g.arity()]);
                off += g.arity();
            }
            self.eval(fam, &fargs)
        })
    }
}

fn count_functions(fam: &Family, p: &Profile) -> Option<u128> {
    let dom = fam.domain(&p.inputs) as u32;
    (fam.size(p.output) as u128).checked_pow(dom)
}

/// Every profile over the family's colours up to `max_arity`.
fn all_profiles(fam: &Family, max_arity: usize) -> Vec<Profile> {
    let cols = fam.colours();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Colour>> = vec![vec![]];
    for n in 0..=max_arity {
        if n > 0 {
            layer = layer
                .iter()
                .flat_map(|v| {
                    cols.iter().map(move |c| {
                        let mut w = v.clone();
                        w.push(*c);
                        w
                    })
                })
                .collect();
        }
        for ins in &layer {
            for c in &cols {
                out.push(Profile::new(ins.clone(), *c));
            }
        }
    }
    out
}

/// The full endomorphism operad, refused when it would exceed `cap` elements.
pub fn endomorphism_operad(fam: &Family, max_arity: usize, cap: usize) -> Result<FiniteOperad> {
    let profiles = all_profiles(fam, max_arity);
    let mut total: u128 = 0;
    for p in &profiles {
        let n = count_functions(fam, p).unwrap_or(u128::MAX);
        total = total.saturating_add(n);
    }
    if total > cap as u128 {
        return Err(Error::SizeCap {
            what: "endomorphism operad".into(),
            needed: total,
            cap: cap as u128,
        });
    }
    let mut fns = Vec::new();
    for p in &profiles {
        let dom = fam.domain(&p.inputs);
        let k = fam.size(p.output) as u8;
        let mut table = vec![0u8; dom];
        loop {
            fns.push(EndFn {
                profile: p.clone(),
                table: table.clone(),
            });
            let mut j = dom;
            let mut carry = true;
            while carry && j > 0 {
                j -= 1;
                table[j] += 1;
                if table[j] < k {
                    carry = false;
                } else {
                    table[j] = 0;
                }
            }
            if carry {
                break;
            }
        }
    }
    build_operad(fam, fns, max_arity)
}

fn build_operad(fam: &Family, fns: Vec<EndFn>, max_arity: usize) -> Result<FiniteOperad> {
    let mut seq = FiniteSSequence::new(&fam.colours(), max_arity);
    for f in &fns {
        seq.ensure(f.profile.clone(), f.label())?;
    }
    let mut op = FiniteOperad::new(seq);
    for c in fam.colours() {
        let id = EndFn::identity(fam, c);
        if op.indexed().id(&id.elem()).is_some() {
            op.set_unit(c, &id.label())?;
        }
    }
    let fn_of: Vec<EndFn> = op
        .indexed()
        .ids()
        .map(|id| EndFn::from_elem(op.indexed().elem(id)))
        .collect();
    for (x, i, y) in op.composable_triples() {
        let z = fn_of[x as usize].compose(fam, i, &fn_of[y as usize]);
        if let Some(zid) = op.indexed().id(&z.elem()) {
            op.set_compose_id(x, i, y, zid);
        }
    }
    Ok(op)
}

/// Smallest sub-operad of End containing the identities and `seeds`.
pub fn generated_operad(
    fam: &Family,
    seeds: &[EndFn],
    max_arity: usize,
    cap: usize,
) -> Result<FiniteOperad> {
    let mut set: BTreeSet<EndFn> = BTreeSet::new();
    let mut queue: VecDeque<EndFn> = VecDeque::new();
    for c in fam.colours() {
        queue.push_back(EndFn::identity(fam, c));
    }
    queue.extend(seeds.iter().cloned());
    while let Some(x) = queue.pop_front() {
        if x.arity() > max_arity || set.contains(&x) {
            continue;
        }
        set.insert(x.clone());
        if set.len() > cap {
            return Err(Error::SizeCap {
                what: "generated operad".into(),
                needed: set.len() as u128,
                cap: cap as u128,
            });
        }
        let snapshot: Vec<EndFn> = set.iter().cloned().collect();
        for y in &snapshot {
            for (a, b) in [(&x, y), (y, &x)] {
                for i in 1..=a.arity() {
                    if a.profile.inputs[i - 1] == b.profile.output
                        && a.arity() + b.arity() - 1 <= max_arity
                    {
                        let z = a.compose(fam, i, b);
                        if !set.contains(&z) {
                            queue.push_back(z);
                        }
                    }
                }
            }
        }
    }
    build_operad(fam, set.into_iter().collect(), max_arity)
}

fn cap_err(what: &str, n: usize, cap: usize) -> Error {
    Error::SizeCap {
        what: what.into(),
        needed: n as u128,
        cap: cap as u128,
    }
}

/// Smallest sub-infinitesimal bimodule of End (over `over` acting through
/// `image`) containing `seeds`.
pub fn generated_infbimodule(
    over: &FiniteOperad,
    image: &dyn Fn(&Elem) -> EndFn,
    fam: &Family,
    seeds: &[EndFn],
    max_arity: usize,
    cap: usize,
) -> Result<InfBimoduleTables> {
    let ox = over.indexed();
    let imgs: Vec<EndFn> = ox.ids().map(|a| image(ox.elem(a))).collect();
    let mut set: HashSet<EndFn> = HashSet::new();
    let mut queue: VecDeque<EndFn> = seeds.iter().cloned().collect();
    while let Some(x) = queue.pop_front() {
        if x.arity() > max_arity || !set.insert(x.clone()) {
            continue;
        }
        if set.len() > cap {
            return Err(cap_err("generated infinitesimal bimodule", set.len(), cap));
        }
        for a in ox.ids() {
            let fa = &imgs[a as usize];
            for i in 1..=fa.arity() {
                if fa.profile.inputs[i - 1] == x.profile.output
                    && fa.arity() + x.arity() - 1 <= max_arity
                {
                    queue.push_back(fa.compose(fam, i, &x));
                }
            }
            for i in 1..=x.arity() {
                if x.profile.inputs[i - 1] == fa.profile.output
                    && fa.arity() + x.arity() - 1 <= max_arity
                {
                    queue.push_back(x.compose(fam, i, fa));
                }
            }
        }
    }
    let mut seq = FiniteSSequence::new(&fam.colours(), max_arity);
    for f in &set {
        seq.insert(f.profile.clone(), f.label())?;
    }
    let mut m = InfBimoduleTables::new(over.clone(), seq);
    let fn_of: Vec<EndFn> = m
        .indexed()
        .ids()
        .map(|id| EndFn::from_elem(m.indexed().elem(id)))
        .collect();
    for (a, i, x) in m.left_triples() {
        let z = imgs[a as usize].compose(fam, i, &fn_of[x as usize]);
        let zid = m.indexed().id(&z.elem()).expect("closed under left action");
        m.set_left_id(a, i, x, zid);
    }
    for (x, i, a) in m.right_triples() {
        let z = fn_of[x as usize].compose(fam, i, &imgs[a as usize]);
        let zid = m
            .indexed()
            .id(&z.elem())
            .expect("closed under right action");
        m.set_right_id(x, i, a, zid);
    }
    Ok(m)
}

/// Smallest sub-bimodule of End containing `seeds`.
pub fn generated_bimodule(
    over: &FiniteOperad,
    image: &dyn Fn(&Elem) -> EndFn,
    fam: &Family,
    seeds: &[EndFn],
    max_arity: usize,
    cap: usize,
) -> Result<BimoduleTables> {
    let ox = over.indexed();
    let imgs: Vec<EndFn> = ox.ids().map(|a| image(ox.elem(a))).collect();
    let mut set: BTreeSet<EndFn> = seeds
        .iter()
        .filter(|f| f.arity() <= max_arity)
        .cloned()
        .collect();
    loop {
        let mut seq = FiniteSSequence::new(&fam.colours(), max_arity);
        for f in &set {
            seq.insert(f.profile.clone(), f.label())?;
        }
        let idx = super::indexed::Indexed::new(seq);
        let fn_of: Vec<EndFn> = idx.ids().map(|id| EndFn::from_elem(idx.elem(id))).collect();
        let mut fresh: BTreeSet<EndFn> = BTreeSet::new();
        for a in ox.ids() {
            let fa = &imgs[a as usize];
            for ms in tuples_in(&idx, &fa.profile.inputs, max_arity) {
                let gs: Vec<EndFn> = ms.iter().map(|m| fn_of[*m as usize].clone()).collect();
                let z = fa.substitute(fam, &gs);
                if !set.contains(&z) {
                    fresh.insert(z);
                }
            }
            for x in &fn_of {
                for i in 1..=x.arity() {
                    if x.profile.inputs[i - 1] == fa.profile.output
                        && fa.arity() + x.arity() - 1 <= max_arity
                    {
                        let z = x.compose(fam, i, fa);
                        if !set.contains(&z) {
                            fresh.insert(z);
                        }
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        set.extend(fresh);
        if set.len() > cap {
            return Err(cap_err("generated bimodule", set.len(), cap));
        }
    }
    let mut seq = FiniteSSequence::new(&fam.colours(), max_arity);
    for f in &set {
        seq.insert(f.profile.clone(), f.label())?;
    }
    let mut m = BimoduleTables::new(over.clone(), seq);
    let fn_of: Vec<EndFn> = m
        .indexed()
        .ids()
        .map(|id| EndFn::from_elem(m.indexed().elem(id)))
        .collect();
    for a in ox.ids() {
        let fa = &imgs[a as usize];
        for ms in m.tuples(&fa.profile.inputs, max_arity) {
            let gs: Vec<EndFn> = ms.iter().map(|x| fn_of[*x as usize].clone()).collect();
            let z = fa.substitute(fam, &gs);
            let zid = m.indexed().id(&z.elem()).expect("closed under γ");
            m.set_gamma_id(a, ms, zid);
        }
    }
    for (x, i, a) in m.right_triples() {
        let z = fn_of[x as usize].compose(fam, i, &imgs[a as usize]);
        let zid = m
            .indexed()
            .id(&z.elem())
            .expect("closed under right action");
        m.set_right_id(x, i, a, zid);
    }
    Ok(m)
}

/// A semigroup (or monoid) on `A_c` acting on `A_o`: the data of an operad
/// map from the operad of monoid actions into End.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionData {
    pub closed: usize,
    pub open: usize,
    /// `mul[x * closed + y] = x·y`
    pub mul: Vec<u8>,
    /// `act[x * open + a] = x·a`
    pub act: Vec<u8>,
    pub unit: Option<u8>,
}

impl ActionData {
    pub fn family(&self) -> Family {
        Family::two(self.closed, self.open).expect("sizes validated")
    }

    pub fn product(&self, xs: &[u8]) -> u8 {
        let mut it = xs.iter();
        let first = *it.next().expect("nonempty product");
        it.fold(first, |acc, y| {
            self.mul[acc as usize * self.closed + *y as usize]
        })
    }

    /// Image of a monoid-action operation: `*n` is the n-fold product (the
    /// unit for n = 0), `*n;o` multiplies its closed inputs then acts.
    pub fn image(&self, e: &Elem) -> EndFn {
        let fam = self.family();
        let n = e.arity();
        match e.output() {
            Colour::Closed => EndFn::tabulate(&fam, e.profile.clone(), |a| {
                if n == 0 {
                    self.unit.expect("unital data for arity zero")
                } else {
                    self.product(a)
                }
            }),
            Colour::Open => EndFn::tabulate(&fam, e.profile.clone(), |a| {
                let mut v = a[n - 1];
                for x in a[..n - 1].iter().rev() {
                    v = self.act[*x as usize * self.open + v as usize];
                }
                v
            }),
        }
    }

    /// All associative (unital when asked) structures on the given sizes.
    /// Results are memoized; the search is a few million table probes.
    pub fn enumerate(closed: usize, open: usize, unital: bool) -> Vec<ActionData> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize, bool), Vec<ActionData>>>> =
            OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(v) = cache
            .lock()
            .expect("cache lock")
            .get(&(closed, open, unital))
        {
            return v.clone();
        }
        let out = Self::search(closed, open, unital);
        cache
            .lock()
            .expect("cache lock")
            .insert((closed, open, unital), out.clone());
        out
    }

    fn search(closed: usize, open: usize, unital: bool) -> Vec<ActionData> {
        let mut out = Vec::new();
        for mul in all_tables(closed * closed, closed) {
            let assoc = (0..closed).all(|x| {
                (0..closed).all(|y| {
                    (0..closed).all(|z| {
                        let xy = mul[x * closed + y] as usize;
                        let yz = mul[y * closed + z] as usize;
                        mul[xy * closed + z] == mul[x * closed + yz]
                    })
                })
            });
            if !assoc {
                continue;
            }
            let unit = (0..closed as u8).find(|&e| {
                (0..closed).all(|x| {
                    mul[e as usize * closed + x] as usize == x
                        && mul[x * closed + e as usize] as usize == x
                })
            });
            if unital && unit.is_none() {
                continue;
            }
            for act in all_tables(closed * open, open) {
                let ok = (0..closed).all(|x| {
                    (0..closed).all(|y| {
                        (0..open).all(|a| {
                            let xy = mul[x * closed + y] as usize;
                            let ya = act[y * open + a] as usize;
                            act[xy * open + a] == act[x * open + ya]
                        })
                    })
                });
                let unit_ok = !unital
                    || (0..open).all(|a| act[unit.unwrap() as usize * open + a] as usize == a);
                if ok && unit_ok {
                    out.push(ActionData {
                        closed,
                        open,
                        mul: mul.clone(),
                        act,
                        unit,
                    });
                }
            }
        }
        out
    }

    pub fn random<R: Rng>(rng: &mut R, closed: usize, open: usize, unital: bool) -> ActionData {
        let all = ActionData::enumerate(closed, open, unital);
        all.choose(rng)
            .expect("trivial structure always exists")
            .clone()
    }
}

fn all_tables(len: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut t = vec![0u8; len];
    loop {
        out.push(t.clone());
        let mut j = len;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            t[j] += 1;
            if (t[j] as usize) < k {
                break;
            }
            t[j] = 0;
        }
    }
}

/// A uniformly random function at `profile`.
pub fn random_fn<R: Rng>(rng: &mut R, fam: &Family, profile: Profile) -> EndFn {
    let k = fam.size(profile.output) as u8;
    EndFn::tabulate(fam, profile, |_| rng.gen_range(0..k))
}

/// Element ids of `m` keyed by function, for callers that evaluate.
pub fn functions_of(idx: &super::indexed::Indexed) -> HashMap<Id, EndFn> {
    idx.ids()
        .map(|id| (id, EndFn::from_elem(idx.elem(id))))
        .collect()
}
