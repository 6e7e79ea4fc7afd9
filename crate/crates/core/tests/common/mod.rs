//! Brute-force oracles shared by the integration tests. None of these reuse
//! the search code they check.

#![allow(dead_code)]

use baire_core::codes::horiz::HorizCode;
use baire_core::codes::ChallengeCode;
use baire_core::crrel::FiniteRelation;
use baire_core::encode::{decode_prefix_code, diagonal, ASet};
use baire_core::reach::{HFun, QuotientAutomaton};
use baire_core::seq::{EventuallyPeriodicSeq, NodeSeq};
use baire_core::Nat;
use num_traits::ToPrimitive;

/// Values tried at each step by the exhaustive searches. Generated classes
/// have thresholds below 4 and moduli at most 3, so every class has several
/// members here.
pub const VALUES: u64 = 12;

pub fn n(v: u64) -> Nat {
    Nat::from(v)
}

/// Least set of responses meeting every challenge, by trying all subsets.
pub fn brute_norm(r: &FiniteRelation) -> Option<usize> {
    let resp = r.responses();
    (0u32..1 << resp.len())
        .filter(|mask| {
            r.challenges()
                .iter()
                .all(|c| resp.iter().enumerate().any(|(i, x)| mask >> i & 1 == 1 && r.meets(c, x)))
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
}

/// Whether some node of length at most `depth`, with entries below
/// `VALUES` respecting `h`, is accepted.
pub fn exhaustive_reach(aut: &QuotientAutomaton, h: &HFun, depth: usize) -> bool {
    fn go(aut: &QuotientAutomaton, h: &HFun, u: &NodeSeq, depth: usize) -> bool {
        if aut.accepts(u) {
            return true;
        }
        if u.len() == depth {
            return false;
        }
        let floor = h.eval(u).to_u64().unwrap();
        (floor..=VALUES.max(floor)).any(|v| go(aut, h, &u.child(n(v)), depth))
    }
    go(aut, h, &NodeSeq::root(), depth)
}

/// `f_a(x)(k)` by scanning entries and decoding each one.
pub fn naive_f(a: &EventuallyPeriodicSeq, x: &EventuallyPeriodicSeq, k: usize) -> Nat {
    let scan = x.prefix().len() + x.period().len() * (k + 1);
    let mut hits = 0;
    for i in 0..scan {
        if let Some(u) = decode_prefix_code(x.at(i)) {
            if !u.is_empty() && a.extends(&u) {
                if hits == k {
                    return n(diagonal(u.len() as u64 - 1));
                }
                hits += 1;
            }
        }
    }
    n(0)
}

/// The entry every truncated play is completed with: above every floor,
/// off every tree and outside `A`.
pub fn completion_value(j: &ChallengeCode, h: &HFun, a: &ASet) -> Nat {
    let consts: Vec<Nat> = j.trees().iter().flat_map(|t| t.constants().cloned()).collect();
    let mut c = h.sup();
    while consts.contains(&c) || a.contains(&c) {
        c += 1u32;
    }
    c
}

/// Minimax on the game truncated to `budget` entries past `stem`. Player I
/// moves first and may append several entries at once; Player II appends
/// one entry outside `A`. Entries respect `h` and stay below `VALUES` (or
/// equal the floor when it is larger). The final node is completed with
/// `completion_value` repeated. Returns whether II wins.
pub fn minimax_ii_wins(j: &ChallengeCode, m: u64, stem: &NodeSeq, h: &HFun, a: &ASet, budget: usize) -> bool {
    let tail = completion_value(j, h, a);
    let target = n(m);
    let value = |u: &NodeSeq| j.eval(&EventuallyPeriodicSeq::node_then(u, vec![tail.clone()]).unwrap());
    let options = |u: &NodeSeq| {
        let floor = h.eval(u).to_u64().unwrap();
        (floor..=VALUES.max(floor)).map(n).collect::<Vec<_>>()
    };

    fn i_turn(
        u: &NodeSeq,
        rem: usize,
        ctx: &dyn Fn(&NodeSeq, usize, bool) -> bool,
        options: &dyn Fn(&NodeSeq) -> Vec<Nat>,
    ) -> bool {
        // II wins iff she wins after every block I can append.
        let mut frontier = vec![u.clone()];
        for _ in 0..rem {
            let mut next = Vec::new();
            for w in &frontier {
                for v in options(w) {
                    let c = w.child(v);
                    if !ctx(&c, rem - (c.len() - u.len()), false) {
                        return false;
                    }
                    next.push(c);
                }
            }
            frontier = next;
        }
        true
    }

    fn solve(
        u: &NodeSeq,
        rem: usize,
        i_to_move: bool,
        value: &dyn Fn(&NodeSeq) -> Nat,
        target: &Nat,
        options: &dyn Fn(&NodeSeq) -> Vec<Nat>,
        a: &ASet,
    ) -> bool {
        if rem == 0 {
            return &value(u) == target;
        }
        if i_to_move {
            let ctx = |c: &NodeSeq, r: usize, i: bool| solve(c, r, i, value, target, options, a);
            i_turn(u, rem, &ctx, options)
        } else {
            options(u)
                .into_iter()
                .filter(|v| !a.contains(v))
                .any(|v| solve(&u.child(v), rem - 1, true, value, target, options, a))
        }
    }

    solve(stem, budget, true, &value, &target, &options, a)
}

/// `f_A(x)`: one past the first index hitting `A`, or 0.
pub fn first_hit_value(a: &[u64], x: &EventuallyPeriodicSeq) -> Nat {
    let scan = x.prefix().len() + x.period().len();
    (0..scan)
        .find(|&i| x.at(i).to_u64().is_some_and(|v| a.contains(&v)))
        .map_or(n(0), |i| n(i as u64 + 1))
}

/// Whether `g ≥ f_A` on every `u⌢z^ω` over the alphabet with `|u| ≤ depth`.
pub fn brute_horiz_dominates(g: &HorizCode, a: &[u64], size: u64, depth: usize) -> bool {
    let mut frontier: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..=depth {
        for u in &frontier {
            for z in 0..size {
                let x = EventuallyPeriodicSeq::from_u64s(u, &[z]);
                if g.eval(&x) < first_hit_value(a, &x) {
                    return false;
                }
            }
        }
        frontier = frontier
            .iter()
            .flat_map(|u| (0..size).map(move |z| [u.as_slice(), &[z]].concat()))
            .collect();
    }
    true
}
