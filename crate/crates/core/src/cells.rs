//! Exact rational point models of the cell complexes that resolve the
//! operads of monoid actions: simplices and prisms, cubes, the quotient
//! cubes, and Boardman-Vogt trees with edge lengths, together with face
//! posets and subdivision bookkeeping.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::builtin::{builtin_act, builtin_as, star_closed, star_open};
use crate::algebra::indexed::Id;
use crate::algebra::operad::FiniteOperad;
use crate::error::{Error, Result};
use crate::freecons::{FreeBimod, FreeBimodElement, FreeIb, FreeIbElement};
use crate::report::AxiomReport;
use crate::seqcore::{profile_closed, profile_open, Colour, FiniteSSequence, Profile};
use crate::trees::{enumerate_trees, Caps, Constraint, Tree};

pub type Q = Rational64;

fn zero() -> Q {
    Q::from_integer(0)
}

fn one() -> Q {
    Q::from_integer(1)
}

fn in_unit(t: &Q) -> bool {
    *t >= zero() && *t <= one()
}

fn check_bounds(ts: &[Q]) -> Result<()> {
    match ts.iter().find(|t| !in_unit(t)) {
        Some(t) => Err(Error::Precondition(format!("coordinate {t} outside [0,1]"))),
        None => Ok(()),
    }
}

fn show_list(ts: &[Q], sep: &str) -> String {
    let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
    format!("({})", parts.join(sep))
}

/// A random rational in `[0,1]` with denominator at most 8; the endpoints
/// come up often.
pub fn random_unit(rng: &mut impl Rng) -> Q {
    let d = rng.gen_range(1..=8i64);
    Q::new(rng.gen_range(0..=d), d)
}

// ---------------------------------------------------------------------------
// Simplices and prisms

/// A point of `Δⁿ` (closed colour) or of `Δⁿ × [0,1]` (open colour, with the
/// prism coordinate).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimplexPoint {
    coords: Vec<Q>,
    prism: Option<Q>,
}

impl SimplexPoint {
    pub fn closed(coords: Vec<Q>) -> Result<Self> {
        check_bounds(&coords)?;
        if coords.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Precondition(format!(
                "coordinates {} are not ordered",
                show_list(&coords, ", ")
            )));
        }
        Ok(SimplexPoint {
            coords,
            prism: None,
        })
    }

    pub fn open(coords: Vec<Q>, t: Q) -> Result<Self> {
        check_bounds(&[t])?;
        let mut p = SimplexPoint::closed(coords)?;
        p.prism = Some(t);
        Ok(p)
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn prism(&self) -> Option<Q> {
        self.prism
    }

    pub fn colour(&self) -> Colour {
        if self.prism.is_some() {
            Colour::Open
        } else {
            Colour::Closed
        }
    }

    /// Closed points of `Δⁿ` sit in arity `n`, open ones in arity `n + 1`.
    pub fn profile(&self) -> Profile {
        match self.prism {
            None => profile_closed(self.coords.len()),
            Some(_) => profile_open(self.coords.len()),
        }
    }

    pub fn random(rng: &mut impl Rng, profile: &Profile) -> Self {
        let dim = match profile.output {
            Colour::Closed => profile.arity(),
            Colour::Open => profile.arity() - 1,
        };
        let mut coords: Vec<Q> = (0..dim).map(|_| random_unit(rng)).collect();
        coords.sort();
        let prism = (profile.output == Colour::Open).then(|| random_unit(rng));
        SimplexPoint { coords, prism }
    }
}

impl fmt::Display for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", show_list(&self.coords, " ≤ "))?;
        if let Some(t) = self.prism {
            write!(f, "×{t}")?;
        }
        Ok(())
    }
}

/// Generating actions of an infinitesimal bimodule over the non-unital
/// operad of actions. `op` is the output colour of the binary operation
/// involved (`*2` or `*2;o`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IbGen {
    /// `− ∘^slot op`
    Right { slot: usize, op: Colour },
    /// `op ∘_slot −`
    Left { op: Colour, slot: usize },
}

fn binary(op: Colour) -> crate::seqcore::Elem {
    match op {
        Colour::Closed => star_closed(2),
        Colour::Open => star_open(2),
    }
}

impl IbGen {
    /// The profile reached from `p`, if the action applies.
    pub fn target(&self, p: &Profile) -> Option<Profile> {
        match *self {
            IbGen::Right { slot, op } => {
                (slot >= 1 && p.input(slot) == Some(op)).then(|| p.graft(slot, &binary(op).profile))
            }
            IbGen::Left { op, slot } => {
                let b = binary(op).profile;
                (b.input(slot) == Some(p.output)).then(|| b.graft(slot, p))
            }
        }
    }

    /// Every generator applicable at `p`, in a fixed order.
    pub fn applicable(p: &Profile) -> Vec<IbGen> {
        let mut out = Vec::new();
        for slot in 1..=p.arity() {
            for op in Colour::ALL {
                out.push(IbGen::Right { slot, op });
            }
        }
        for op in Colour::ALL {
            for slot in 1..=2 {
                out.push(IbGen::Left { op, slot });
            }
        }
        out.retain(|g| g.target(p).is_some());
        out
    }
}

impl fmt::Display for IbGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            IbGen::Right { slot, op } => write!(f, "-∘^{slot}{}", binary(op).label),
            IbGen::Left { op, slot } => write!(f, "{}∘_{slot}-", binary(op).label),
        }
    }
}

fn mismatch(g: &impl fmt::Display, p: &Profile) -> Error {
    Error::ColourMismatch(format!("{g} does not apply at {p}"))
}

/// One generating action on a point of the simplex/prism resolution.
pub fn blacktriangle_apply(gen: IbGen, p: &SimplexPoint) -> Result<SimplexPoint> {
    let profile = p.profile();
    gen.target(&profile)
        .ok_or_else(|| mismatch(&gen, &profile))?;
    let mut out = p.clone();
    match gen {
        IbGen::Right {
            slot,
            op: Colour::Closed,
        } => {
            let t = out.coords[slot - 1];
            out.coords.insert(slot - 1, t);
        }
        IbGen::Right {
            op: Colour::Open, ..
        }
        | IbGen::Left {
            op: Colour::Closed,
            slot: 1,
        } => out.coords.push(one()),
        IbGen::Left { slot: 2, .. } => out.coords.insert(0, zero()),
        IbGen::Left {
            op: Colour::Open, ..
        } => out.prism = Some(one()),
        IbGen::Left { .. } => unreachable!("slots of a binary operation"),
    }
    Ok(out)
}

/// Coface `d^i` of the semi-cosimplicial pair underlying the resolution:
/// level `n` is `Δⁿ` or `Δⁿ × [0,1]`.
pub fn shadow_coface(p: &SimplexPoint, i: usize) -> Result<SimplexPoint> {
    let n = p.coords.len();
    let colour = p.colour();
    let gen = if i == 0 {
        IbGen::Left {
            op: colour,
            slot: 2,
        }
    } else if i <= n {
        IbGen::Right {
            slot: i,
            op: Colour::Closed,
        }
    } else if i == n + 1 {
        match colour {
            Colour::Closed => IbGen::Left {
                op: Colour::Closed,
                slot: 1,
            },
            Colour::Open => IbGen::Right {
                slot: n + 1,
                op: Colour::Open,
            },
        }
    } else {
        return Err(Error::Precondition(format!("no coface {i} at level {n}")));
    };
    blacktriangle_apply(gen, p)
}

/// The level-preserving map from the closed to the open part.
pub fn shadow_h(p: &SimplexPoint) -> Result<SimplexPoint> {
    blacktriangle_apply(
        IbGen::Left {
            op: Colour::Open,
            slot: 1,
        },
        p,
    )
}

/// Cosimplicial identities and compatibility of `h` with cofaces at random
/// points, levels `0..=max_level`.
pub fn check_shadow(max_level: usize, samples: usize, seed: u64) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport::new();
    for _ in 0..samples {
        for n in 0..=max_level {
            for colour in Colour::ALL {
                let profile = match colour {
                    Colour::Closed => profile_closed(n),
                    Colour::Open => profile_open(n),
                };
                let x = SimplexPoint::random(&mut rng, &profile);
                for j in 1..=n + 2 {
                    for i in 0..j {
                        let lhs = shadow_coface(&shadow_coface(&x, i)?, j)?;
                        let rhs = shadow_coface(&shadow_coface(&x, j - 1)?, i)?;
                        report.expect(lhs == rhs, "cosimplicial", || {
                            format!("d^{j} d^{i} vs d^{i} d^{} at {x}", j - 1)
                        });
                    }
                }
                if colour == Colour::Closed {
                    for i in 0..=n + 1 {
                        let lhs = shadow_h(&shadow_coface(&x, i)?)?;
                        let rhs = shadow_coface(&shadow_h(&x)?, i)?;
                        report.expect(lhs == rhs, "h-coface", || {
                            format!("h d^{i} vs d^{i} h at {x}")
                        });
                    }
                }
            }
        }
    }
    Ok(report.finish())
}

// ---------------------------------------------------------------------------
// Cubes

/// A point of `[0,1]^{n-1}` in arity `n` of either colour.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CubePoint {
    colour: Colour,
    coords: Vec<Q>,
}

impl CubePoint {
    pub fn new(colour: Colour, coords: Vec<Q>) -> Result<Self> {
        check_bounds(&coords)?;
        Ok(CubePoint { colour, coords })
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn colour(&self) -> Colour {
        self.colour
    }

    pub fn profile(&self) -> Profile {
        let n = self.coords.len();
        match self.colour {
            Colour::Closed => profile_closed(n + 1),
            Colour::Open => profile_open(n),
        }
    }

    pub fn random(rng: &mut impl Rng, profile: &Profile) -> Self {
        let coords = (1..profile.arity()).map(|_| random_unit(rng)).collect();
        CubePoint {
            colour: profile.output,
            coords,
        }
    }
}

impl fmt::Display for CubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            show_list(&self.coords, ", "),
            self.colour.short()
        )
    }
}

/// `x ∘^slot op` on cubes: a zero is inserted at position `slot`.
pub fn square_right(x: &CubePoint, slot: usize, op: Colour) -> Result<CubePoint> {
    let gen = IbGen::Right { slot, op };
    let profile = x.profile();
    gen.target(&profile)
        .ok_or_else(|| mismatch(&gen, &profile))?;
    let mut out = x.clone();
    out.coords.insert(slot - 1, zero());
    Ok(out)
}

/// `op(x; y)` on cubes: the coordinates are joined by a one.
pub fn square_left(op: Colour, x: &CubePoint, y: &CubePoint) -> Result<CubePoint> {
    if x.colour != Colour::Closed || y.colour != op {
        return Err(Error::ColourMismatch(format!(
            "{}({x}; {y}) needs a closed first argument and a {} second one",
            binary(op).label,
            op.name()
        )));
    }
    let mut coords = x.coords.clone();
    coords.push(one());
    coords.extend_from_slice(&y.coords);
    Ok(CubePoint { colour: op, coords })
}

// ---------------------------------------------------------------------------
// Quotient cubes

/// A point of `[0,1]ⁿ`, possibly already reduced to its class representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TildeCubePoint {
    coords: Vec<Q>,
    normalized: bool,
}

impl TildeCubePoint {
    pub fn new(coords: Vec<Q>) -> Result<Self> {
        check_bounds(&coords)?;
        Ok(TildeCubePoint {
            coords,
            normalized: false,
        })
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn random(rng: &mut impl Rng, n: usize) -> Self {
        TildeCubePoint {
            coords: (0..n).map(|_| random_unit(rng)).collect(),
            normalized: false,
        }
    }
}

impl fmt::Display for TildeCubePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", show_list(&self.coords, ", "))
    }
}

/// Generating actions on quotient cubes over the strict associative operad.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TildeGen {
    /// `− ∘^i *2`
    InsertZero(usize),
    /// `*2 ∘_1 −`
    AppendZero,
    /// `*2 ∘_2 −`
    PrependOne,
}

impl TildeGen {
    fn as_ib(self) -> IbGen {
        match self {
            TildeGen::InsertZero(slot) => IbGen::Right {
                slot,
                op: Colour::Closed,
            },
            TildeGen::AppendZero => IbGen::Left {
                op: Colour::Closed,
                slot: 1,
            },
            TildeGen::PrependOne => IbGen::Left {
                op: Colour::Closed,
                slot: 2,
            },
        }
    }

    fn from_ib(g: IbGen) -> Option<TildeGen> {
        match g {
            IbGen::Right {
                slot,
                op: Colour::Closed,
            } => Some(TildeGen::InsertZero(slot)),
            IbGen::Left {
                op: Colour::Closed,
                slot: 1,
            } => Some(TildeGen::AppendZero),
            IbGen::Left {
                op: Colour::Closed,
                slot: 2,
            } => Some(TildeGen::PrependOne),
            _ => None,
        }
    }
}

impl fmt::Display for TildeGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.as_ib().fmt(f)
    }
}

/// Every coordinate before the last one equal to 1 becomes 1.
pub fn tilde_cube_normalize(p: &TildeCubePoint) -> TildeCubePoint {
    let mut coords = p.coords.clone();
    if let Some(last) = coords.iter().rposition(|t| *t == one()) {
        coords[..last].fill(one());
    }
    TildeCubePoint {
        coords,
        normalized: true,
    }
}

pub fn tilde_cube_apply(gen: TildeGen, p: &TildeCubePoint) -> Result<TildeCubePoint> {
    let mut coords = p.coords.clone();
    match gen {
        TildeGen::InsertZero(i) => {
            if i == 0 || i > coords.len() {
                return Err(Error::Precondition(format!(
                    "no input {i} at arity {}",
                    coords.len()
                )));
            }
            coords.insert(i - 1, zero());
        }
        TildeGen::AppendZero => coords.push(zero()),
        TildeGen::PrependOne => coords.insert(0, one()),
    }
    Ok(tilde_cube_normalize(&TildeCubePoint {
        coords,
        normalized: false,
    }))
}

/// Idempotence of the representative, compatibility of every action with
/// it, and invariance under the generating moves, at random points of
/// dimensions `0..=max_dim`.
pub fn check_tilde_well_defined(max_dim: usize, samples: usize, seed: u64) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport::new();
    for _ in 0..samples {
        let n = rng.gen_range(0..=max_dim);
        let p = TildeCubePoint::random(&mut rng, n);
        let np = tilde_cube_normalize(&p);
        report.expect(tilde_cube_normalize(&np) == np, "tilde-idempotent", || {
            p.to_string()
        });
        let mut gens: Vec<TildeGen> = (1..=n).map(TildeGen::InsertZero).collect();
        gens.extend([TildeGen::AppendZero, TildeGen::PrependOne]);
        for g in gens {
            let direct = tilde_cube_apply(g, &p)?;
            let via = tilde_cube_apply(g, &np)?;
            report.expect(direct == via, "tilde-action", || format!("{g} at {p}"));
        }
        // a generating move: some position i set to 1 on both sides, the
        // tail kept, the head redrawn
        if n > 0 {
            let i = rng.gen_range(0..n);
            let mut a = p.coords.clone();
            a[i] = one();
            let mut b = a.clone();
            for t in b.iter_mut().take(i) {
                *t = random_unit(&mut rng);
            }
            let (a, b) = (TildeCubePoint::new(a)?, TildeCubePoint::new(b)?);
            report.expect(
                tilde_cube_normalize(&a) == tilde_cube_normalize(&b),
                "tilde-move",
                || format!("{a} vs {b}"),
            );
        }
    }
    Ok(report.finish())
}

// ---------------------------------------------------------------------------
// Relations forced by the operad, checked against free objects

/// Words of generating actions from one generator, grouped by the element
/// of the free infinitesimal bimodule they produce.
struct IbWords {
    start: Profile,
    /// Parent word and the action appended to it; the root is the generator.
    steps: Vec<Option<(usize, IbGen)>>,
    classes: Vec<Vec<usize>>,
}

impl IbWords {
    fn build(o: &FiniteOperad, start: &Profile, depth: usize, max_arity: usize) -> Result<Self> {
        let mut m = FiniteSSequence::new(o.carrier().colours(), max_arity);
        m.insert(start.clone(), "x")?;
        let free = FreeIb::new(o, &m, max_arity)?;
        let op_id = |g: IbGen| -> Option<Id> {
            o.indexed().id(&binary(match g {
                IbGen::Right { op, .. } | IbGen::Left { op, .. } => op,
            }))
        };
        let mut elems: Vec<FreeIbElement> =
            vec![free.unit_of(&crate::seqcore::Elem::new(start.clone(), "x"))?];
        let mut steps = vec![None];
        let mut frontier = vec![0];
        for _ in 0..depth {
            let mut next = Vec::new();
            for &w in &frontier {
                let p = free.profile(&elems[w]);
                if p.arity() >= max_arity {
                    continue;
                }
                for g in IbGen::applicable(&p) {
                    let Some(y) = op_id(g) else { continue };
                    let e = match g {
                        IbGen::Right { slot, .. } => free.right(&elems[w], slot, y)?,
                        IbGen::Left { slot, .. } => free.left(y, slot, &elems[w])?,
                    };
                    next.push(elems.len());
                    elems.push(e);
                    steps.push(Some((w, g)));
                }
            }
            frontier = next;
        }
        let mut by_label: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (w, e) in elems.iter().enumerate() {
            by_label.entry(free.label(e)).or_default().push(w);
        }
        let classes = by_label.into_values().filter(|c| c.len() > 1).collect();
        Ok(IbWords {
            start: start.clone(),
            steps,
            classes,
        })
    }

    fn show(&self, w: usize) -> String {
        let mut gens = Vec::new();
        let mut cur = w;
        while let Some((parent, g)) = self.steps[cur] {
            gens.push(g.to_string());
            cur = parent;
        }
        gens.reverse();
        if gens.is_empty() {
            "x".into()
        } else {
            format!("x·{}", gens.join("·"))
        }
    }

    /// Evaluate every word at `x` with `act`, then compare within classes.
    fn check<P: PartialEq + fmt::Display>(
        &self,
        x: P,
        act: impl Fn(IbGen, &P) -> Result<P>,
        same: impl Fn(&P, &P) -> bool,
        axiom: &str,
        report: &mut AxiomReport,
    ) -> Result<()> {
        let mut vals: Vec<P> = Vec::with_capacity(self.steps.len());
        for step in &self.steps {
            let v = match step {
                None => continue,
                Some((parent, g)) => {
                    let base = if *parent == 0 { &x } else { &vals[*parent - 1] };
                    act(*g, base)?
                }
            };
            vals.push(v);
        }
        let get = |w: usize| if w == 0 { &x } else { &vals[w - 1] };
        for class in &self.classes {
            let a = class[0];
            for &b in &class[1..] {
                report.expect(same(get(a), get(b)), axiom, || {
                    format!(
                        "{} vs {} from {} at {x}",
                        self.show(a),
                        self.show(b),
                        self.start
                    )
                });
            }
        }
        Ok(())
    }

    fn relation_count(&self) -> usize {
        self.classes.iter().map(|c| c.len() - 1).sum()
    }
}

/// Start profiles of the relation checks: arities 1 and 2 of each colour.
fn start_profiles(colours: &[Colour]) -> Vec<Profile> {
    let mut out = Vec::new();
    for &c in colours {
        for n in 1..=2 {
            out.push(match c {
                Colour::Closed => profile_closed(n),
                Colour::Open => profile_open(n - 1),
            });
        }
    }
    out
}

/// Every identity between words of at most `depth` generating actions that
/// holds in the free infinitesimal bimodule over the non-unital operad of
/// actions, evaluated on the simplex/prism resolution at `samples` random
/// points per start profile.
pub fn check_blacktriangle_relations(
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport::new();
    for start in start_profiles(&Colour::ALL) {
        let max_arity = start.arity() + depth;
        let words = IbWords::build(&builtin_act(false, max_arity), &start, depth, max_arity)?;
        for _ in 0..samples {
            let x = SimplexPoint::random(&mut rng, &start);
            words.check(
                x,
                blacktriangle_apply,
                |a, b| a == b,
                "blacktriangle-relation",
                &mut report,
            )?;
        }
    }
    Ok(report.finish())
}

/// As [`check_blacktriangle_relations`] for the quotient cubes over the strict
/// associative operad, comparing class representatives.
pub fn check_tilde_relations(depth: usize, samples: usize, seed: u64) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AxiomReport::new();
    for start in start_profiles(&[Colour::Closed]) {
        let max_arity = start.arity() + depth;
        let words = IbWords::build(&builtin_as(true, max_arity), &start, depth, max_arity)?;
        for _ in 0..samples {
            let x = TildeCubePoint::random(&mut rng, start.arity());
            let act = |g: IbGen, p: &TildeCubePoint| {
                let t = TildeGen::from_ib(g).ok_or_else(|| Error::ColourMismatch(g.to_string()))?;
                tilde_cube_apply(t, p)
            };
            let same = |a: &TildeCubePoint, b: &TildeCubePoint| {
                tilde_cube_normalize(a) == tilde_cube_normalize(b)
            };
            words.check(x, act, same, "tilde-relation", &mut report)?;
        }
    }
    Ok(report.finish())
}

/// Number of nontrivial identities the relation checks compare, per start
/// profile, for the simplex/prism words.
pub fn blacktriangle_relation_counts(depth: usize) -> Result<Vec<(Profile, usize)>> {
    start_profiles(&Colour::ALL)
        .into_iter()
        .map(|start| {
            let max_arity = start.arity() + depth;
            let w = IbWords::build(&builtin_act(false, max_arity), &start, depth, max_arity)?;
            Ok((start, w.relation_count()))
        })
        .collect()
}

#[derive(Clone, Debug)]
enum CubeExpr {
    Gen(usize),
    Right(usize, usize, Colour),
    Left(Colour, usize, usize),
}

/// Expressions in the bimodule actions over cube generators, grouped by the
/// element of the free bimodule they produce.
struct BimodExprs {
    gens: Vec<Profile>,
    exprs: Vec<CubeExpr>,
    classes: Vec<Vec<usize>>,
}

impl BimodExprs {
    fn build(o: &FiniteOperad, gens: &[Profile], max_arity: usize) -> Result<Self> {
        let mut m = FiniteSSequence::new(o.carrier().colours(), max_arity);
        for (k, p) in gens.iter().enumerate() {
            m.insert(p.clone(), format!("g{k}"))?;
        }
        let free = FreeBimod::new(o, &m, max_arity)?;
        let id_of = |op: Colour| o.indexed().id(&binary(op));
        let mut exprs = Vec::new();
        let mut elems: Vec<FreeBimodElement> = Vec::new();
        let mut by_arity: Vec<Vec<usize>> = vec![Vec::new(); max_arity + 1];
        for a in 1..=max_arity {
            let mut here = Vec::new();
            for (k, p) in gens.iter().enumerate() {
                if p.arity() == a {
                    here.push((
                        CubeExpr::Gen(k),
                        free.unit_of(&crate::seqcore::Elem::new(p.clone(), format!("g{k}")))?,
                    ));
                }
            }
            for &e in &by_arity[a - 1] {
                let p = free.profile(&elems[e]);
                for g in IbGen::applicable(&p) {
                    if let IbGen::Right { slot, op } = g {
                        if let Some(y) = id_of(op) {
                            here.push((
                                CubeExpr::Right(e, slot, op),
                                free.right(&elems[e], slot, y)?,
                            ));
                        }
                    }
                }
            }
            for op in Colour::ALL {
                let Some(y) = id_of(op) else { continue };
                for a1 in 1..a {
                    for &e1 in &by_arity[a1] {
                        if free.profile(&elems[e1]).output != Colour::Closed {
                            continue;
                        }
                        for &e2 in &by_arity[a - a1] {
                            if free.profile(&elems[e2]).output != op {
                                continue;
                            }
                            let v = free.left(y, &[elems[e1].clone(), elems[e2].clone()])?;
                            here.push((CubeExpr::Left(op, e1, e2), v));
                        }
                    }
                }
            }
            for (x, v) in here {
                by_arity[a].push(exprs.len());
                exprs.push(x);
                elems.push(v);
            }
        }
        let mut by_label: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (w, e) in elems.iter().enumerate() {
            by_label.entry(free.label(e)).or_default().push(w);
        }
        let classes = by_label.into_values().filter(|c| c.len() > 1).collect();
        Ok(BimodExprs {
            gens: gens.to_vec(),
            exprs,
            classes,
        })
    }

    fn show(&self, e: usize) -> String {
        match &self.exprs[e] {
            CubeExpr::Gen(k) => format!("g{k}"),
            CubeExpr::Right(x, slot, op) => {
                format!("({})∘^{slot}{}", self.show(*x), binary(*op).label)
            }
            CubeExpr::Left(op, x, y) => format!(
                "{}({}; {})",
                binary(*op).label,
                self.show(*x),
                self.show(*y)
            ),
        }
    }

    fn eval(&self, points: &[CubePoint]) -> Result<Vec<CubePoint>> {
        let mut vals: Vec<CubePoint> = Vec::with_capacity(self.exprs.len());
        for x in &self.exprs {
            let v = match x {
                CubeExpr::Gen(k) => points[*k].clone(),
                CubeExpr::Right(e, slot, op) => square_right(&vals[*e], *slot, *op)?,
                CubeExpr::Left(op, a, b) => square_left(*op, &vals[*a], &vals[*b])?,
            };
            vals.push(v);
        }
        Ok(vals)
    }
}

/// Every identity between action expressions of arity at most `max_arity`
/// that holds in the free bimodule, evaluated on the cube resolution at
/// `samples` random assignments of the generators. With `closed_only` the
/// operad is the strict associative one and only closed generators occur.
pub fn check_square_relations(
    max_arity: usize,
    samples: usize,
    seed: u64,
    closed_only: bool,
) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (o, gens) = if closed_only {
        (
            builtin_as(true, max_arity),
            vec![profile_closed(1), profile_closed(2)],
        )
    } else {
        (
            builtin_act(false, max_arity),
            vec![
                profile_closed(1),
                profile_closed(2),
                profile_open(0),
                profile_open(1),
            ],
        )
    };
    let exprs = BimodExprs::build(&o, &gens, max_arity)?;
    let mut report = AxiomReport::new();
    for _ in 0..samples {
        let points: Vec<CubePoint> = exprs
            .gens
            .iter()
            .map(|p| CubePoint::random(&mut rng, p))
            .collect();
        let vals = exprs.eval(&points)?;
        for class in &exprs.classes {
            let a = class[0];
            for &b in &class[1..] {
                report.expect(vals[a] == vals[b], "square-relation", || {
                    let shown: Vec<String> = points.iter().map(|p| p.to_string()).collect();
                    format!(
                        "{} vs {} at [{}]",
                        exprs.show(a),
                        exprs.show(b),
                        shown.join(", ")
                    )
                });
            }
        }
    }
    Ok(report.finish())
}

// ---------------------------------------------------------------------------
// Trees with edge lengths

#[derive(Clone, Debug)]
enum WNode {
    Leaf(Colour),
    /// Inputs with the length of the edge into each (unused on leaves).
    Vertex {
        out: Colour,
        inputs: Vec<(WNode, Q)>,
    },
}

impl WNode {
    fn from_tree(t: &Tree, lengths: &mut impl Iterator<Item = Q>) -> WNode {
        match t {
            Tree::Leaf(c) => WNode::Leaf(*c),
            Tree::Vertex { out, inputs } => WNode::Vertex {
                out: *out,
                inputs: inputs
                    .iter()
                    .map(|c| match c {
                        Tree::Leaf(_) => (WNode::from_tree(c, lengths), zero()),
                        Tree::Vertex { .. } => {
                            let len = lengths.next().expect("one length per inner edge");
                            (WNode::from_tree(c, lengths), len)
                        }
                    })
                    .collect(),
            },
        }
    }

    fn into_point(self) -> BvPoint {
        let mut lengths = Vec::new();
        fn go(w: WNode, lengths: &mut Vec<Q>) -> Tree {
            match w {
                WNode::Leaf(c) => Tree::Leaf(c),
                WNode::Vertex { out, inputs } => Tree::Vertex {
                    out,
                    inputs: inputs
                        .into_iter()
                        .map(|(c, len)| {
                            if matches!(c, WNode::Vertex { .. }) {
                                lengths.push(len);
                            }
                            go(c, lengths)
                        })
                        .collect(),
                },
            }
        }
        let tree = go(self, &mut lengths);
        BvPoint { tree, lengths }
    }

    fn contract_zeros(self) -> WNode {
        match self {
            WNode::Leaf(_) => self,
            WNode::Vertex { out, inputs } => {
                let mut merged = Vec::new();
                for (c, len) in inputs {
                    match c.contract_zeros() {
                        WNode::Vertex { inputs: inner, .. } if len == zero() => {
                            merged.extend(inner)
                        }
                        c => merged.push((c, len)),
                    }
                }
                WNode::Vertex {
                    out,
                    inputs: merged,
                }
            }
        }
    }

    /// Replace leaf `*k` (counting down to 1) by `s` on an edge of length 1.
    fn graft(&mut self, k: &mut usize, s: &WNode) -> bool {
        match self {
            WNode::Leaf(_) => unreachable!("handled by the parent"),
            WNode::Vertex { inputs, .. } => {
                for (c, len) in inputs.iter_mut() {
                    match c {
                        WNode::Leaf(_) if *k == 1 => {
                            *c = s.clone();
                            *len = one();
                            return true;
                        }
                        WNode::Leaf(_) => *k -= 1,
                        WNode::Vertex { .. } => {
                            if c.graft(k, s) {
                                return true;
                            }
                        }
                    }
                }
                false
            }
        }
    }

    /// Free coordinates become 1; `fixed_one_below` says a closed edge of
    /// length 1 lies under the current vertex.
    fn saturate(&mut self, fixed_one_below: bool) {
        if let WNode::Vertex { inputs, .. } = self {
            for (c, len) in inputs.iter_mut() {
                if let WNode::Vertex { out, .. } = c {
                    let closed = *out == Colour::Closed;
                    let flag = fixed_one_below || (closed && *len == one());
                    if fixed_one_below && closed {
                        *len = one();
                    }
                    c.saturate(flag);
                }
            }
        }
    }

    fn free_edges(&self, fixed_one_below: bool, next: &mut usize, out: &mut Vec<usize>) {
        if let WNode::Vertex { inputs, .. } = self {
            for (c, len) in inputs {
                if let WNode::Vertex { out: col, .. } = c {
                    let closed = *col == Colour::Closed;
                    if fixed_one_below && closed {
                        out.push(*next);
                    }
                    *next += 1;
                    c.free_edges(fixed_one_below || (closed && *len == one()), next, out);
                }
            }
        }
    }
}

/// A point of the Boardman-Vogt resolution: a tree whose vertices have at
/// least two inputs, with a length in `[0,1]` on each inner edge. Lengths
/// are listed by the upper vertex of the edge, in preorder. The bare leaf is
/// the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BvPoint {
    tree: Tree,
    lengths: Vec<Q>,
}

impl BvPoint {
    pub fn new(tree: Tree, lengths: Vec<Q>) -> Result<Self> {
        check_bounds(&lengths)?;
        if lengths.len() != tree.inner_edges() {
            return Err(Error::Precondition(format!(
                "{} inner edges, {} lengths",
                tree.inner_edges(),
                lengths.len()
            )));
        }
        for v in tree.vertices() {
            let Tree::Vertex { out, inputs } = v else {
                unreachable!()
            };
            if inputs.len() < 2 {
                return Err(Error::Precondition(format!(
                    "vertex with {} inputs in {}",
                    inputs.len(),
                    tree.code()
                )));
            }
            let ok = match out {
                Colour::Closed => inputs.iter().all(|c| c.colour() == Colour::Closed),
                Colour::Open => inputs.iter().enumerate().all(|(k, c)| {
                    c.colour()
                        == if k + 1 == inputs.len() {
                            Colour::Open
                        } else {
                            Colour::Closed
                        }
                }),
            };
            if !ok {
                return Err(Error::ColourMismatch(format!(
                    "badly coloured vertex in {}",
                    tree.code()
                )));
            }
        }
        Ok(BvPoint { tree, lengths })
    }

    pub fn unit(colour: Colour) -> Self {
        BvPoint {
            tree: Tree::Leaf(colour),
            lengths: Vec::new(),
        }
    }

    pub fn corolla(inputs: &[Colour], out: Colour) -> Result<Self> {
        BvPoint::new(Tree::corolla(inputs, out), Vec::new())
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn lengths(&self) -> &[Q] {
        &self.lengths
    }

    pub fn colour(&self) -> Colour {
        self.tree.colour()
    }

    pub fn is_normalized(&self) -> bool {
        !self.lengths.contains(&zero())
    }

    pub fn random(rng: &mut impl Rng, tree: &Tree) -> Self {
        let lengths = (0..tree.inner_edges()).map(|_| random_unit(rng)).collect();
        BvPoint {
            tree: tree.clone(),
            lengths,
        }
    }

    fn node(&self) -> WNode {
        WNode::from_tree(&self.tree, &mut self.lengths.iter().copied())
    }
}

impl fmt::Display for BvPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ls: Vec<String> = self.lengths.iter().map(|t| t.to_string()).collect();
        write!(f, "{} [{}]", self.tree.code(), ls.join(", "))
    }
}

/// Contract every edge of length 0.
pub fn bv_normalize(p: &BvPoint) -> BvPoint {
    p.node().contract_zeros().into_point()
}

/// Graft `q` on leaf `i` of `p` along a new edge of length 1.
pub fn bv_compose(p: &BvPoint, i: usize, q: &BvPoint) -> Result<BvPoint> {
    let colours = p.tree.leaf_colours();
    let Some(&c) = i.checked_sub(1).and_then(|k| colours.get(k)) else {
        return Err(Error::Precondition(format!(
            "leaf {i} out of range 1..={}",
            colours.len()
        )));
    };
    if c != q.colour() {
        return Err(Error::ColourMismatch(format!(
            "leaf {i} is {}, the grafted tree outputs {}",
            c.name(),
            q.colour().name()
        )));
    }
    let mut w = p.node();
    let s = q.node();
    match (&w, &s) {
        (_, WNode::Leaf(_)) => {}
        (WNode::Leaf(_), _) => w = s,
        _ => {
            let mut k = i;
            w.graft(&mut k, &s);
        }
    }
    Ok(w.contract_zeros().into_point())
}

/// Representative of the quotient class: every edge with a closed edge of
/// length 1 strictly below it gets length 1.
pub fn penta_normalize(p: &BvPoint) -> BvPoint {
    let mut w = bv_normalize(p).node();
    w.saturate(false);
    w.into_point()
}

/// Indices (into the length list) of the coordinates the quotient forgets.
pub fn penta_free_edges(p: &BvPoint) -> Vec<usize> {
    let mut out = Vec::new();
    p.node().free_edges(false, &mut 0, &mut out);
    out
}

/// Open Boardman-Vogt trees with `2..=max_leaves` leaves: representatives
/// are idempotent, invariant under changes of free coordinates, and never
/// move open edges.
pub fn check_penta(max_leaves: usize, samples: usize, seed: u64) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trees = Vec::new();
    for n in 2..=max_leaves {
        trees.extend(bv_trees(n, Colour::Open)?);
    }
    let mut report = AxiomReport::new();
    for _ in 0..samples {
        let t = &trees[rng.gen_range(0..trees.len())];
        let p = bv_normalize(&BvPoint::random(&mut rng, t));
        let r = penta_normalize(&p);
        report.expect(penta_normalize(&r) == r, "penta-idempotent", || {
            p.to_string()
        });
        let opens = open_edges(&p);
        report.expect(
            r.tree == p.tree && opens.iter().all(|&e| r.lengths[e] == p.lengths[e]),
            "penta-open-fixed",
            || p.to_string(),
        );
        let free = penta_free_edges(&p);
        if !free.is_empty() {
            let mut moved = p.clone();
            let e = free[rng.gen_range(0..free.len())];
            moved.lengths[e] = Q::new(rng.gen_range(1..=8), 8);
            report.expect(penta_normalize(&moved) == r, "penta-move", || {
                format!("{p} vs {moved}")
            });
        }
    }
    Ok(report.finish())
}

fn open_edges(p: &BvPoint) -> Vec<usize> {
    p.tree
        .vertices()
        .iter()
        .skip(1)
        .enumerate()
        .filter(|(_, v)| v.colour() == Colour::Open)
        .map(|(k, _)| k)
        .collect()
}

// ---------------------------------------------------------------------------
// Face posets

pub const FACE_CAP: usize = 8;

/// Trees indexing the faces of the resolution in arity `n`: closed trees or
/// open-trunk trees, every vertex with at least two inputs.
pub fn bv_trees(n: usize, colour: Colour) -> Result<Vec<Tree>> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "faces need at least two leaves, got {n}"
        )));
    }
    if n > FACE_CAP {
        return Err(Error::SizeCap {
            what: "face poset leaves".into(),
            needed: n as u128,
            cap: FACE_CAP as u128,
        });
    }
    let constraint = match colour {
        Colour::Closed => Constraint::MinArity2,
        Colour::Open => Constraint::TreeO,
    };
    let caps = Caps {
        max_arity: n,
        max_vertices: n,
        max_leaves: n,
    };
    Ok(enumerate_trees(n, &constraint, caps)?
        .into_iter()
        .map(|m| m.tree)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Face {
    pub code: String,
    pub dim: usize,
    #[serde(skip)]
    pub tree: Tree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacePoset {
    pub n: usize,
    pub colour: Colour,
    /// Sorted by dimension, then code.
    pub faces: Vec<Face>,
    /// Faces obtained by contracting one inner edge, by index.
    pub covers: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct FaceDoc<'a> {
    code: &'a str,
    dim: usize,
    covers: Vec<&'a str>,
}

#[derive(Serialize)]
struct PosetDoc<'a> {
    n: usize,
    colour: &'static str,
    f_vector: Vec<usize>,
    euler_characteristic: i64,
    faces: Vec<FaceDoc<'a>>,
}

pub fn wa_face_poset(n: usize, colour: Colour) -> Result<FacePoset> {
    let trees = bv_trees(n, colour)?;
    let top = n - 2;
    let mut faces: Vec<Face> = trees
        .into_iter()
        .map(|tree| Face {
            code: tree.code(),
            dim: top - tree.inner_edges(),
            tree,
        })
        .collect();
    faces.sort_by(|a, b| (a.dim, &a.code).cmp(&(b.dim, &b.code)));
    let index: HashMap<&str, usize> = faces
        .iter()
        .enumerate()
        .map(|(k, f)| (f.code.as_str(), k))
        .collect();
    let mut covers = Vec::with_capacity(faces.len());
    for f in &faces {
        let mut up = Vec::new();
        for v in 1..f.tree.vertex_count() {
            let code = f.tree.contract(v)?.code();
            let k = *index
                .get(code.as_str())
                .ok_or_else(|| Error::UnknownElement(format!("contracted face {code}")))?;
            up.push(k);
        }
        up.sort_unstable();
        up.dedup();
        covers.push(up);
    }
    Ok(FacePoset {
        n,
        colour,
        faces,
        covers,
    })
}

impl FacePoset {
    pub fn top_dim(&self) -> usize {
        self.n - 2
    }

    pub fn f_vector(&self) -> Vec<usize> {
        let mut out = vec![0; self.top_dim() + 1];
        for f in &self.faces {
            out[f.dim] += 1;
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    pub fn to_json(&self) -> String {
        let doc = PosetDoc {
            n: self.n,
            colour: self.colour.name(),
            f_vector: self.f_vector(),
            euler_characteristic: self.euler_characteristic(),
            faces: self
                .faces
                .iter()
                .zip(&self.covers)
                .map(|(f, up)| FaceDoc {
                    code: &f.code,
                    dim: f.dim,
                    covers: up.iter().map(|&k| self.faces[k].code.as_str()).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("poset documents serialize")
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph wa_{}_{} {{\n", self.n, self.colour.short());
        for (k, f) in self.faces.iter().enumerate() {
            out.push_str(&format!("  f{k} [label=\"{}\\ndim {}\"];\n", f.code, f.dim));
        }
        for (k, up) in self.covers.iter().enumerate() {
            for j in up {
                out.push_str(&format!("  f{k} -> f{j};\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Grading, the unique top face, binary minimal faces and the dimension
/// formula.
pub fn check_face_poset(p: &FacePoset) -> AxiomReport {
    let mut report = AxiomReport::new();
    let top = p.top_dim();
    for (k, f) in p.faces.iter().enumerate() {
        report.expect(f.dim + f.tree.inner_edges() == top, "dimension", || {
            f.code.clone()
        });
        for &j in &p.covers[k] {
            report.expect(p.faces[j].dim == f.dim + 1, "graded", || {
                format!("{} under {}", f.code, p.faces[j].code)
            });
        }
        if f.dim < top {
            report.expect(!p.covers[k].is_empty(), "cover-complete", || f.code.clone());
        }
        if f.dim == 0 {
            report.expect(
                f.tree.arities().iter().all(|&a| a == 2),
                "minimal-binary",
                || f.code.clone(),
            );
        }
    }
    let tops: Vec<&Face> = p.faces.iter().filter(|f| f.dim == top).collect();
    report.expect(
        tops.len() == 1 && tops[0].tree.vertex_count() == 1,
        "unique-top",
        || format!("{} faces of dimension {top}", tops.len()),
    );
    report.finish()
}

// ---------------------------------------------------------------------------
// Subdivision bookkeeping

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubdivisionCell {
    pub code: String,
    /// Sum over vertices of the associahedron dimensions `|v| - 2`.
    pub dim_lambda: usize,
    /// One time parameter per vertex.
    pub dim_chi: usize,
    pub total: usize,
    #[serde(skip)]
    pub tree: Tree,
}

pub fn subdivision_cells(n: usize, colour: Colour) -> Result<Vec<SubdivisionCell>> {
    Ok(bv_trees(n, colour)?
        .into_iter()
        .map(|tree| {
            let dim_lambda = tree.arities().iter().map(|a| a - 2).sum();
            let dim_chi = tree.vertex_count();
            SubdivisionCell {
                code: tree.code(),
                dim_lambda,
                dim_chi,
                total: dim_lambda + dim_chi,
                tree,
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubdivisionAudit {
    pub n: usize,
    pub cells: usize,
    pub max_total: usize,
    /// Cells of dimension `n - 1`.
    pub full_dimensional: usize,
    pub report: AxiomReport,
}

/// Recomputes each cell's dimensions from its tree and checks
/// `total = Σ|v| - |V| = n - 1` (leaves plus inner edges count all inputs).
pub fn subdivision_audit(n: usize, colour: Colour) -> Result<SubdivisionAudit> {
    let cells = subdivision_cells(n, colour)?;
    let mut report = AxiomReport::new();
    for c in &cells {
        let ar = c.tree.arities();
        let inputs: usize = ar.iter().sum();
        report.expect(inputs == n + c.tree.inner_edges(), "input-count", || {
            c.code.clone()
        });
        report.expect(c.dim_lambda + ar.len() * 2 == inputs, "lambda", || {
            c.code.clone()
        });
        report.expect(c.dim_chi == ar.len(), "chi", || c.code.clone());
        report.expect(
            c.total == c.dim_lambda + c.dim_chi && c.total < n,
            "total-bound",
            || format!("{} has total {}", c.code, c.total),
        );
    }
    let max_total = cells.iter().map(|c| c.total).max().unwrap_or(0);
    Ok(SubdivisionAudit {
        n,
        cells: cells.len(),
        max_total,
        full_dimensional: cells.iter().filter(|c| c.total + 1 == n).count(),
        report: report.finish(),
    })
}
