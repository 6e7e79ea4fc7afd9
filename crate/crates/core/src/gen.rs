//! Seeded random instances for the test corpora and the `gen` subcommand.
//! Everything is driven by `ChaCha8Rng`, so a seed fixes the output.

use crate::classes::{ClassPartition, ClassSpec};
use crate::codes::{ChallengeCode, FunctionFamilyCode};
use crate::crrel::{FiniteRelation, MorphismWitness};
use crate::games::Baire1Family;
use crate::hechler::{DenseSetSpec, ToyModel};
use crate::nat::Nat;
use crate::reach::{examples, HFun, HPrimitive, QuotientAutomaton, StateSpec};
use crate::seq::EventuallyPeriodicSeq;
use crate::tree::PresentedTree;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nats(v: impl IntoIterator<Item = u64>) -> Vec<Nat> {
    v.into_iter().map(Nat::from).collect()
}

/// Prefix up to `max_prefix`, period `1..=max_period`, entries `0..=max_entry`.
pub fn seq(rng: &mut impl Rng, max_prefix: usize, max_period: usize, max_entry: u64) -> EventuallyPeriodicSeq {
    let p = rng.gen_range(0..=max_prefix);
    let q = rng.gen_range(1..=max_period);
    let prefix = nats((0..p).map(|_| rng.gen_range(0..=max_entry)));
    let period = nats((0..q).map(|_| rng.gen_range(0..=max_entry)));
    EventuallyPeriodicSeq::new(prefix, period).unwrap()
}

/// A partition of ω into at most `max_classes` classes: small singletons
/// grouped together, then residue classes above them.
pub fn partition(rng: &mut impl Rng, max_classes: usize) -> ClassPartition {
    assert!(max_classes >= 1);
    let modulus = rng.gen_range(1..=max_classes.min(3)) as u64;
    let spare = max_classes - modulus as usize;
    let cut = if spare == 0 { 0 } else { rng.gen_range(0..=3u64) };
    let mut classes = Vec::new();
    if cut > 0 {
        let groups = rng.gen_range(1..=spare.min(cut as usize));
        let mut buckets: Vec<Vec<Nat>> = vec![Vec::new(); groups];
        for v in 0..cut {
            let i = if (v as usize) < groups { v as usize } else { rng.gen_range(0..groups) };
            buckets[i].push(Nat::from(v));
        }
        classes.extend(buckets.into_iter().map(|b| ClassSpec::new(1, [], Nat::from(0u32), b).unwrap()));
    }
    for r in 0..modulus {
        classes.push(ClassSpec::new(modulus, [r], Nat::from(cut), []).unwrap());
    }
    ClassPartition::new(classes).unwrap()
}

/// At most `max_states` states, each with a partition of at most
/// `max_classes` classes and random targets.
pub fn automaton(rng: &mut impl Rng, max_states: usize, max_classes: usize) -> QuotientAutomaton {
    let n = rng.gen_range(1..=max_states);
    let per_state = (0..n)
        .map(|_| {
            let classes = partition(rng, max_classes);
            let next = (0..classes.len()).map(|_| rng.gen_range(0..n)).collect();
            StateSpec { classes, next }
        })
        .collect();
    let accepting = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    QuotientAutomaton::new(rng.gen_range(0..n), per_state, accepting).unwrap()
}

/// An automaton in which every state can reach acceptance.
pub fn dense_automaton(rng: &mut impl Rng) -> QuotientAutomaton {
    match rng.gen_range(0..4) {
        0 => examples::length_at_least(rng.gen_range(0..=3)),
        1 => examples::last_entry_odd(),
        2 => examples::any_length_at_least(rng.gen_range(1..=3)),
        _ => loop {
            let a = automaton(rng, 4, 3);
            if a.ranks().iter().all(Option::is_some) {
                break a;
            }
        },
    }
}

/// A side function with values at most `max`.
pub fn side(rng: &mut impl Rng, max: u64) -> HFun {
    match rng.gen_range(0..4) {
        0 => HFun::zero(),
        1 => HFun::constant(rng.gen_range(0..=max)),
        2 => HFun(vec![HPrimitive::Level {
            table: nats((0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..=max))),
            tail: Nat::from(rng.gen_range(0..=max)),
        }]),
        _ => {
            let automaton = dense_automaton(rng);
            let bounds = nats((0..automaton.state_count()).map(|_| rng.gen_range(0..=max)));
            HFun(vec![HPrimitive::State { automaton, bounds }])
        }
    }
}

fn constant_spine_tree(rng: &mut impl Rng, entries: std::ops::RangeInclusive<u64>) -> PresentedTree {
    let spines = (0..rng.gen_range(1..=2))
        .map(|_| EventuallyPeriodicSeq::from_u64s(&[], &[rng.gen_range(entries.clone())]))
        .collect();
    PresentedTree::new(spines, Vec::new())
}

/// A `{0,1}`-valued leaf whose status is settled within two levels.
fn bit_leaf(rng: &mut impl Rng) -> ChallengeCode {
    if rng.gen_bool(0.5) {
        return ChallengeCode::constant(rng.gen_range(0..=1));
    }
    let offset = rng.gen_range(0..=1);
    let tree = constant_spine_tree(rng, 0..=3);
    let exit = ChallengeCode::exit(tree, rng.gen_range(0..=3), offset);
    ChallengeCode::thresh(exit, Nat::from(rng.gen_range(1..=offset + 1))).unwrap()
}

/// A bit-valued code with at most two query levels, reading coordinates 0
/// and 1, and analysis depth at most 2.
pub fn bit_code(rng: &mut impl Rng) -> ChallengeCode {
    fn build(rng: &mut impl Rng, coord: usize) -> ChallengeCode {
        if coord > 1 || rng.gen_bool(0.3) {
            return bit_leaf(rng);
        }
        let partition = partition(rng, 3);
        let children = (0..partition.len()).map(|_| build(rng, coord + 1)).collect();
        ChallengeCode::query(coord, partition, children).unwrap()
    }
    build(rng, 0)
}

/// A natural-valued base code for a fusion model, kept to small values.
pub fn model_code(rng: &mut impl Rng) -> ChallengeCode {
    fn leaf(rng: &mut impl Rng) -> ChallengeCode {
        match rng.gen_range(0..3) {
            0 => ChallengeCode::constant(rng.gen_range(0..=2)),
            1 => bit_leaf(rng),
            _ => {
                let a = EventuallyPeriodicSeq::from_u64s(&[rng.gen_range(0..=3)], &[rng.gen_range(7..=9)]);
                ChallengeCode::exit(PresentedTree::single(a), rng.gen_range(0..=1), 0)
            }
        }
    }
    fn build(rng: &mut impl Rng, coord: usize) -> ChallengeCode {
        if coord > 2 || rng.gen_bool(0.35) {
            return leaf(rng);
        }
        let partition = partition(rng, 3);
        let children = (0..partition.len()).map(|_| build(rng, coord + 1)).collect();
        ChallengeCode::query(coord, partition, children).unwrap()
    }
    build(rng, 0)
}

/// Up to `max_dense` dense sets and a small-valued family code.
pub fn toy_model(rng: &mut impl Rng, max_dense: usize) -> ToyModel {
    let dense_sets = (0..rng.gen_range(0..=max_dense))
        .map(|_| DenseSetSpec::new(dense_automaton(rng), side(rng, 20)).unwrap())
        .collect();
    ToyModel { dense_sets, g: FunctionFamilyCode::new(model_code(rng)) }
}

/// `K + 1 ≤ max_len` bit-valued codes.
pub fn family(rng: &mut impl Rng, max_len: usize) -> Baire1Family {
    let n = rng.gen_range(1..=max_len);
    Baire1Family::new((0..n).map(|_| bit_code(rng)).collect()).unwrap()
}

/// A coverable relation on at most `max_c` challenges and `max_r` responses.
pub fn relation(rng: &mut impl Rng, max_c: usize, max_r: usize) -> FiniteRelation {
    let nc = rng.gen_range(1..=max_c);
    let nr = rng.gen_range(1..=max_r);
    let mut meets = BTreeSet::new();
    for c in 0..nc {
        meets.insert((c, rng.gen_range(0..nr)));
        for r in 0..nr {
            if rng.gen_bool(0.25) {
                meets.insert((c, r));
            }
        }
    }
    FiniteRelation::new(
        (0..nc).map(|c| format!("c{c}")),
        (0..nr).map(|r| format!("r{r}")),
        meets.into_iter().map(|(c, r)| (format!("c{c}"), format!("r{r}"))),
    )
    .unwrap()
}

/// `(A, B, w)` where `w` is a morphism from `A` to `B` by construction: the
/// maps are random and `B` meets exactly what they force plus noise.
pub fn relation_with_morphism(rng: &mut impl Rng) -> (FiniteRelation, FiniteRelation, MorphismWitness) {
    let a = relation(rng, 6, 5);
    let nc = rng.gen_range(1..=6);
    let nr = rng.gen_range(1..=5);
    let b_c: Vec<String> = (0..nc).map(|c| format!("d{c}")).collect();
    let b_r: Vec<String> = (0..nr).map(|r| format!("s{r}")).collect();
    let phi_minus: BTreeMap<String, String> =
        b_c.iter().map(|c| (c.clone(), a.challenges().choose(rng).unwrap().clone())).collect();
    let phi_plus: BTreeMap<String, String> =
        a.responses().iter().map(|r| (r.clone(), b_r.choose(rng).unwrap().clone())).collect();
    let mut meets = BTreeSet::new();
    for c in &b_c {
        for r in a.responses() {
            if a.meets(&phi_minus[c], r) {
                meets.insert((c.clone(), phi_plus[r].clone()));
            }
        }
        for r in &b_r {
            if rng.gen_bool(0.15) {
                meets.insert((c.clone(), r.clone()));
            }
        }
    }
    let b = FiniteRelation::new(b_c, b_r, meets).unwrap();
    (a, b, MorphismWitness { phi_minus, phi_plus })
}
