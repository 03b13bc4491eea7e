//! Seeded families of small (infinitesimal) bimodules over the operad of
//! monoid actions, generated inside endomorphism operads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::builtin::{builtin_act, builtin_as};
use crate::algebra::endo::{
    generated_bimodule, generated_infbimodule, generated_operad, random_fn, ActionData, Family,
};
use crate::algebra::modules::{induced_bimodule, BimoduleTables, InfBimoduleTables};
use crate::algebra::operad::{FiniteOperad, OperadMap};
use crate::error::Result;
use crate::seqcore::Colour;
use crate::seqcore::{profile_closed, profile_open, SSeqMap};

const CAP: usize = 50_000;

/// Sizes of the closed and open sets, each in `1..=max_size`.
fn sizes(rng: &mut ChaCha8Rng, max_size: usize) -> (usize, usize) {
    (rng.gen_range(1..=max_size), rng.gen_range(1..=max_size))
}

/// Infinitesimal bimodules over the non-unital operad, each generated by a
/// random closed unary and a random open unary operation.
pub fn infbimodule_corpus(
    count: usize,
    seed: u64,
    max_size: usize,
    max_arity: usize,
) -> Result<Vec<InfBimoduleTables>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let act = builtin_act(false, max_arity);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (c, o) = sizes(&mut rng, max_size);
        let data = ActionData::random(&mut rng, c, o, false);
        let fam = data.family();
        let seeds = vec![
            random_fn(&mut rng, &fam, profile_closed(1)),
            random_fn(&mut rng, &fam, profile_open(0)),
        ];
        out.push(generated_infbimodule(
            &act,
            &|e| data.image(e),
            &fam,
            &seeds,
            max_arity,
            CAP,
        )?);
    }
    Ok(out)
}

/// Bimodules over the non-unital operad under the unital one: generated by
/// the image of the unital operad and random closed and open unary
/// operations, with the structure map read off that image.
pub fn bimodule_corpus(
    count: usize,
    seed: u64,
    max_size: usize,
    max_arity: usize,
) -> Result<Vec<(BimoduleTables, SSeqMap)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let act = builtin_act(false, max_arity);
    let unital = builtin_act(true, max_arity);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (c, o) = sizes(&mut rng, max_size);
        let data = ActionData::random(&mut rng, c, o, true);
        let fam = data.family();
        let mut seeds: Vec<_> = unital
            .carrier()
            .elems()
            .iter()
            .map(|e| data.image(e))
            .collect();
        seeds.push(random_fn(&mut rng, &fam, profile_closed(1)));
        seeds.push(random_fn(&mut rng, &fam, profile_open(0)));
        let m = generated_bimodule(&act, &|e| data.image(e), &fam, &seeds, max_arity, CAP)?;
        let mut eta = SSeqMap::new();
        for e in unital.carrier().elems() {
            eta.set(e.clone(), data.image(&e).label());
        }
        out.push((m, eta));
    }
    Ok(out)
}

/// Inputs for the two-coloured construction from a multiplicative operad:
/// the unital associative operad acting on the operad generated in
/// `End(A_c)` by the powers of a random monoid and a random unary map, with
/// `β` the monoid's structure map. Every input satisfies the unit condition.
pub fn xcons_corpus(
    count: usize,
    seed: u64,
    max_size: usize,
    max_arity: usize,
) -> Result<Vec<(FiniteOperad, BimoduleTables, OperadMap, SSeqMap)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let as_op = builtin_as(false, max_arity);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let size = rng.gen_range(1..=max_size);
        let data = ActionData::random(&mut rng, size, 1, true);
        let fam = Family::new(&[(Colour::Closed, size)])?;
        let mut seeds: Vec<_> = as_op
            .carrier()
            .elems()
            .iter()
            .map(|e| data.image(e))
            .collect();
        seeds.push(random_fn(&mut rng, &fam, profile_closed(1)));
        let target = generated_operad(&fam, &seeds, max_arity, CAP)?;
        let mut beta = SSeqMap::new();
        for e in as_op.carrier().elems() {
            beta.set(e.clone(), data.image(&e).label());
        }
        let b = induced_bimodule(&OperadMap::verify(&as_op, &target, &beta)?);
        out.push((as_op.clone(), b, OperadMap::identity(&as_op), beta));
    }
    Ok(out)
}
