//! Recovering `a` from a code dominating `Exit([[a]])`, and the horizontal
//! decoder over a finite alphabet.

use crate::codes::horiz::HorizCode;
use crate::codes::ChallengeCode;
use crate::error::{invalid, Error, Result};
use crate::nat::Nat;
use crate::seq::NodeSeq;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecodeParams {
    pub target_length: usize,
    pub threshold_search_bound: usize,
    pub child_search_bound: u64,
    pub candidate_bound: usize,
}

impl Default for DecodeParams {
    fn default() -> Self {
        DecodeParams { target_length: 32, threshold_search_bound: 8, child_search_bound: 16, candidate_bound: 64 }
    }
}

/// A recovered node and the shortest seed length that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub node: NodeSeq,
    pub threshold: usize,
}

/// `t ∈ B` iff `g ≥ |t|` on all of `[t]`.
pub fn in_b_set(g: &ChallengeCode, t: &NodeSeq) -> bool {
    g.inf_over_cylinder(t).value >= Nat::from(t.len())
}

struct Decoder<'a> {
    g: &'a ChallengeCode,
    p: DecodeParams,
    step: HashMap<NodeSeq, Option<Nat>>,
}

impl Decoder<'_> {
    /// The unique tried child of `u` outside `B`, if exactly one exists.
    fn next(&mut self, u: &NodeSeq) -> Option<Nat> {
        if let Some(r) = self.step.get(u) {
            return r.clone();
        }
        let mut out = None;
        for n in 0..=self.p.child_search_bound {
            if !in_b_set(self.g, &u.child(Nat::from(n))) {
                if out.is_some() {
                    out = None;
                    break;
                }
                out = Some(Nat::from(n));
            }
        }
        self.step.insert(u.clone(), out.clone());
        out
    }

    fn run_from(&mut self, seed: &NodeSeq) -> Option<NodeSeq> {
        let mut u = seed.clone();
        while u.len() < self.p.target_length {
            let n = self.next(&u)?;
            u.push(n);
        }
        Some(u)
    }

    /// A seed `v` can only lead somewhere if some point of `[v]` has value at
    /// least `N`: the last recovery step needs a child of length `N` in `B`.
    fn viable(&self, v: &NodeSeq) -> bool {
        match self.g.sup_over_cylinder(v) {
            None => true,
            Some(s) => s >= Nat::from(self.p.target_length),
        }
    }
}

pub fn decode_from_domination(g: &ChallengeCode, p: &DecodeParams) -> Result<Vec<Candidate>> {
    if p.target_length == 0 {
        return Ok(vec![Candidate { node: NodeSeq::root(), threshold: 0 }]);
    }
    if p.child_search_bound == 0 {
        return Err(invalid("childSearchBound must be positive"));
    }
    let max_seed = p.threshold_search_bound.min(p.target_length - 1);
    let mut dec = Decoder { g, p: *p, step: HashMap::new() };
    let mut found: BTreeMap<NodeSeq, usize> = BTreeMap::new();
    let mut stack = vec![NodeSeq::root()];
    while let Some(seed) = stack.pop() {
        if !dec.viable(&seed) {
            continue;
        }
        if let Some(u) = dec.run_from(&seed) {
            let e = found.entry(u).or_insert(seed.len());
            *e = (*e).min(seed.len());
            if found.len() > p.candidate_bound {
                return Err(Error::CandidateOverflow { count: found.len(), bound: p.candidate_bound });
            }
        }
        if seed.len() < max_seed {
            for n in (0..=p.child_search_bound).rev() {
                stack.push(seed.child(Nat::from(n)));
            }
        }
    }
    Ok(found.into_iter().map(|(node, threshold)| Candidate { node, threshold }).collect())
}

/// Re-checks a candidate against the recovery rule, independently of search.
pub fn verify_candidate(g: &ChallengeCode, c: &Candidate, child_search_bound: u64) -> bool {
    (c.threshold..c.node.len()).all(|l| {
        let base = c.node.restrict(l);
        let digit = &c.node.entries()[l];
        !in_b_set(g, &c.node.restrict(l + 1))
            && (0..=child_search_bound)
                .map(Nat::from)
                .filter(|n| n != digit)
                .all(|n| in_b_set(g, &base.child(n)))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HorizDecoded {
    pub t: NodeSeq,
    #[serde(with = "crate::nat::set_json")]
    pub recovered: BTreeSet<Nat>,
    pub iterations: usize,
}

fn horiz_b_children(g: &HorizCode, t: &NodeSeq, size: usize) -> BTreeSet<Nat> {
    (0..size)
        .map(Nat::from)
        .filter(|z| g.inf_over_cylinder(&t.child(z.clone()), size) >= Nat::from(t.len() + 1))
        .collect()
}

/// Largest alphabet whose subsets are enumerated by `largest_dominated`.
pub const MAX_HORIZ_ALPHABET: usize = 12;

/// The largest `A ⊆ X` with `g ≥ f_A`. It exists because dominated sets are
/// closed under union: `f_{A∪A'} ≤ max(f_A, f_{A'})`.
pub fn largest_dominated(g: &HorizCode, size: usize) -> Result<BTreeSet<Nat>> {
    if size > MAX_HORIZ_ALPHABET {
        return Err(Error::BoundExceeded(format!("alphabet of size {size} is too large to enumerate")));
    }
    let mut out = BTreeSet::new();
    for mask in 1u32..1 << size {
        let a: BTreeSet<Nat> = (0..size).filter(|z| mask >> z & 1 == 1).map(Nat::from).collect();
        if !a.is_subset(&out) && g.dominates(&a, size)? {
            out.extend(a);
        }
    }
    Ok(out)
}

/// Finds `t` with `{z : t⌢z ∈ B}` equal to the largest set `A` that `g`
/// dominates.
///
/// Starting from the root, any `z` with `t⌢z ∈ B` but `z ∉ A` is appended
/// to `t`. Every element of `A` stays in the candidate along the way, and an
/// endless run would give a point avoiding `A` where `g` is unbounded.
pub fn horiz_decode(g: &HorizCode, size: usize, bound: usize) -> Result<HorizDecoded> {
    g.check_alphabet(size)?;
    let hidden = largest_dominated(g, size)?;
    let mut t = NodeSeq::root();
    for iterations in 1..=bound {
        let h = horiz_b_children(g, &t, size);
        match h.difference(&hidden).next() {
            None => return Ok(HorizDecoded { t, recovered: h, iterations }),
            Some(z) => t.push(z.clone()),
        }
    }
    Err(Error::BoundExceeded(format!("horizontal decoder ran past {bound} iterations")))
}
