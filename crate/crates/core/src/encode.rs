//! The encoder `f_a` and the horizontal encoder `f_A`.
//!
//! `A` is the set of codes of the nonempty initial segments of `a` under an
//! injective prefix coding, and `η` reads off a diagonal enumeration of the
//! segment length, so every value has infinitely many preimages in `A`.

use crate::error::{Error, Result};
use crate::nat::Nat;
use crate::seq::{EventuallyPeriodicSeq, NodeSeq};
use num_integer::Roots;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::sync::Mutex;

/// Default cap on the size of a generated chain code.
pub const DEFAULT_MAX_BITS: u64 = 1 << 22;

pub fn cantor(u: &Nat, v: &Nat) -> Nat {
    let s = u + v;
    (&s * (&s + 1u32)) / 2u32 + v
}

pub fn cantor_inverse(z: &Nat) -> (Nat, Nat) {
    // w = floor((sqrt(8z + 1) - 1) / 2)
    let w = ((z * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let v = z - &t;
    (&w - &v, v)
}

/// `code(⟨⟩) = 2`, `code(t⌢n) = cantor(code(t), n) + 3`.
pub fn prefix_code(t: &NodeSeq) -> Nat {
    t.entries().iter().fold(Nat::from(2u32), |c, n| cantor(&c, n) + 3u32)
}

/// Inverse of [`prefix_code`]; `None` for numbers that code no node.
pub fn decode_prefix_code(n: &Nat) -> Option<NodeSeq> {
    let mut digits = Vec::new();
    let mut cur = n.clone();
    loop {
        if cur == Nat::from(2u32) {
            digits.reverse();
            return Some(NodeSeq(digits));
        }
        if cur < Nat::from(3u32) {
            return None;
        }
        let (u, v) = cantor_inverse(&(&cur - 3u32));
        digits.push(v);
        cur = u;
    }
}

/// The diagonal enumeration `0,0,1,0,1,2,0,1,2,3,…`.
pub fn diagonal(i: u64) -> u64 {
    let mut k = ((8 * i as u128 + 1).sqrt() as u64 - 1) / 2;
    while k * (k + 1) / 2 > i {
        k -= 1;
    }
    i - k * (k + 1) / 2
}

/// Positions `i` (ascending) with `diagonal(i) = m`.
fn diagonal_fiber(m: u64) -> impl Iterator<Item = u64> {
    (m..).map(move |k| k * (k + 1) / 2 + m)
}

/// The set `A = { code(a↾l) : l ≥ 1 }` for a fixed point `a`.
#[derive(Debug)]
pub struct ASet {
    source: EventuallyPeriodicSeq,
    chain: Mutex<Vec<Nat>>,
    max_bits: u64,
}

impl Clone for ASet {
    fn clone(&self) -> Self {
        ASet {
            source: self.source.clone(),
            chain: Mutex::new(self.chain.lock().unwrap().clone()),
            max_bits: self.max_bits,
        }
    }
}

impl ASet {
    pub fn new(a: EventuallyPeriodicSeq) -> Self {
        Self::with_max_bits(a, DEFAULT_MAX_BITS)
    }

    pub fn with_max_bits(a: EventuallyPeriodicSeq, max_bits: u64) -> Self {
        ASet { source: a, chain: Mutex::new(vec![Nat::from(2u32)]), max_bits }
    }

    pub fn source(&self) -> &EventuallyPeriodicSeq {
        &self.source
    }

    /// `e_l = code(a↾l)`, `l ≥ 1`.
    pub fn element(&self, l: usize) -> Result<Nat> {
        let mut chain = self.chain.lock().unwrap();
        while chain.len() <= l {
            let k = chain.len();
            let prev = chain.last().unwrap();
            if 2 * prev.bits() + 2 > self.max_bits {
                return Err(Error::TooLarge { level: k, max_bits: self.max_bits });
            }
            let next = cantor(prev, self.source.at(k - 1)) + 3u32;
            chain.push(next);
        }
        Ok(chain[l].clone())
    }

    /// `e_1, …, e_l`.
    pub fn chain(&self, l: usize) -> Result<Vec<Nat>> {
        self.element(l)?;
        Ok(self.chain.lock().unwrap()[1..=l].to_vec())
    }

    /// The `l` with `n = e_l`, if any. Decides membership without generating
    /// the chain.
    pub fn level_of(&self, n: &Nat) -> Option<usize> {
        let u = decode_prefix_code(n)?;
        (!u.is_empty() && self.source.extends(&u)).then(|| u.len())
    }

    pub fn contains(&self, n: &Nat) -> bool {
        self.level_of(n).is_some()
    }

    pub fn eta(&self, e: &Nat) -> Result<Nat> {
        let l = self.level_of(e).ok_or_else(|| Error::NotInA(e.to_string()))?;
        Ok(Nat::from(diagonal(l as u64 - 1)))
    }

    /// Least `e ∈ A` with `η(e) = m` and `e ≥ floor`.
    pub fn least_with_eta(&self, m: &Nat, floor: &Nat) -> Result<Nat> {
        let m = m.to_u64().ok_or(Error::TooLarge { level: usize::MAX, max_bits: self.max_bits })?;
        for pos in diagonal_fiber(m) {
            let l = usize::try_from(pos + 1)
                .map_err(|_| Error::TooLarge { level: usize::MAX, max_bits: self.max_bits })?;
            let e = self.element(l)?;
            if &e >= floor {
                return Ok(e);
            }
        }
        unreachable!("fibers are infinite")
    }
}

/// Reconstructs `a↾L` from a finite set of elements of `A`, `L` the largest
/// sampled level. Fails if some number codes no node or the nodes are not
/// linearly ordered by extension.
pub fn recover_from_sample(codes: &[Nat]) -> Result<NodeSeq> {
    let mut nodes = Vec::new();
    for c in codes {
        let u = decode_prefix_code(c)
            .filter(|u| !u.is_empty())
            .ok_or_else(|| Error::NotInA(c.to_string()))?;
        nodes.push(u);
    }
    nodes.sort_by_key(NodeSeq::len);
    let longest = nodes.last().cloned().unwrap_or_default();
    if nodes.iter().any(|u| !u.is_prefix_of(&longest)) {
        return Err(Error::InvalidInput("sampled codes are not prefixes of one sequence".into()));
    }
    Ok(longest)
}

/// `f_a(x)(n)`: the η-value of the `(n+1)`-th entry of `x` lying in `A`, or 0
/// when `x` has at most `n` such entries.
pub fn encode_f(a: &ASet, x: &EventuallyPeriodicSeq, n: &Nat) -> Nat {
    match nth_hit(a, x, n) {
        Some(i) => a.eta(x.at(i)).expect("hit lies in A"),
        None => Nat::zero(),
    }
}

/// Position of the `(n+1)`-th entry of `x` lying in `A`.
pub fn nth_hit(a: &ASet, x: &EventuallyPeriodicSeq, n: &Nat) -> Option<usize> {
    let pre: Vec<usize> = (0..x.prefix().len()).filter(|&i| a.contains(x.at(i))).collect();
    if let Some(k) = n.to_usize().filter(|&k| k < pre.len()) {
        return Some(pre[k]);
    }
    let per: Vec<usize> = (0..x.period().len())
        .filter(|&j| a.contains(&x.period()[j]))
        .collect();
    if per.is_empty() {
        return None;
    }
    let r = n - pre.len();
    let cycle = (&r / per.len()).to_usize()?;
    let j = (&r % per.len()).to_usize().unwrap();
    Some(x.prefix().len() + cycle * x.period().len() + per[j])
}

/// `f_A(x)`: one more than the first index of an entry in `members`, or 0.
pub fn horiz_encode(members: &BTreeSet<Nat>, x: &EventuallyPeriodicSeq) -> Nat {
    match x.first_index_where(|v| members.contains(v)) {
        Some(i) => Nat::from(i + 1),
        None => Nat::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(p: &[u64], q: &[u64]) -> EventuallyPeriodicSeq {
        EventuallyPeriodicSeq::from_u64s(p, q)
    }

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    /// Direct evaluation of the recurrence with machine integers.
    fn small_chain(a: &[u64], l: usize) -> Vec<u128> {
        let mut c: u128 = 2;
        let mut out = vec![];
        for &d in a.iter().take(l) {
            let d = d as u128;
            c = (c + d) * (c + d + 1) / 2 + d + 3;
            out.push(c);
        }
        out
    }

    #[test]
    fn prefix_code_examples() {
        assert_eq!(prefix_code(&NodeSeq::root()), n(2));
        assert_eq!(prefix_code(&NodeSeq::from_u64s(&[0])), n(6));
        assert_eq!(prefix_code(&NodeSeq::from_u64s(&[0, 0, 0])), n(303));
        let a = ASet::new(s(&[], &[0]));
        let chain: Vec<u128> = a.chain(4).unwrap().iter().map(|c| c.to_u128().unwrap()).collect();
        assert_eq!(chain, small_chain(&[0, 0, 0, 0], 4));
        assert_eq!(chain, vec![6, 24, 303, 46059]);
    }

    #[test]
    fn membership_and_eta() {
        let a = ASet::new(s(&[], &[0]));
        assert!(a.contains(&n(24)));
        assert!(!a.contains(&n(7)));
        assert!(!a.contains(&n(2)));
        assert_eq!(a.eta(&n(6)).unwrap(), n(0));
        assert_eq!(a.eta(&n(303)).unwrap(), n(1));
        assert_eq!(a.eta(&n(46059)).unwrap(), n(0));
        assert!(matches!(a.eta(&n(7)), Err(Error::NotInA(_))));
    }

    #[test]
    fn diagonal_matches_enumeration() {
        let mut expect = vec![];
        for k in 0..20u64 {
            expect.extend(0..=k);
        }
        for (i, &v) in expect.iter().enumerate() {
            assert_eq!(diagonal(i as u64), v);
        }
    }

    #[test]
    fn eta_fibers() {
        let a = ASet::new(s(&[], &[0]));
        // Levels only: the values themselves outgrow memory quickly.
        let count = |m: u64, upto: u64| (0..upto).filter(|&i| diagonal(i) == m).count();
        for m in 0..=4u64 {
            assert!(count(m, 30) >= 3, "m = {m}");
        }
        // 5 first appears at position 20, so its third preimage is at 33.
        assert_eq!(count(5, 30), 2);
        assert_eq!(count(5, 34), 3);
        assert_eq!(a.least_with_eta(&n(0), &n(0)).unwrap(), n(6));
        assert_eq!(a.least_with_eta(&n(0), &n(7)).unwrap(), n(24));
        assert_eq!(a.least_with_eta(&n(1), &n(0)).unwrap(), n(303));
    }

    #[test]
    fn encode_examples() {
        let a = ASet::new(s(&[], &[0]));
        let x = s(&[6, 1, 24, 303], &[1]);
        assert_eq!(encode_f(&a, &x, &n(2)), n(1));
        assert_eq!(encode_f(&a, &x, &n(5)), n(0));
        assert_eq!(encode_f(&a, &s(&[24], &[6]), &n(3)), n(0));
        assert_eq!(nth_hit(&a, &s(&[24], &[6]), &n(3)), Some(3));
    }

    #[test]
    fn horiz_examples() {
        let one: BTreeSet<Nat> = [n(1)].into();
        assert_eq!(horiz_encode(&one, &s(&[0, 2, 1], &[0])), n(3));
        assert_eq!(horiz_encode(&one, &s(&[], &[0])), n(0));
        assert_eq!(horiz_encode(&one, &s(&[], &[1])), n(1));
    }

    #[test]
    fn chain_guard() {
        let a = ASet::with_max_bits(s(&[], &[0]), 64);
        assert!(a.element(5).is_ok());
        assert!(matches!(a.element(10), Err(Error::TooLarge { .. })));
    }

    proptest! {
        #[test]
        fn code_round_trip(v in proptest::collection::vec(0u64..50, 0..6)) {
            let t = NodeSeq::from_u64s(&v);
            prop_assert_eq!(decode_prefix_code(&prefix_code(&t)), Some(t));
        }

        #[test]
        fn sample_recovery(prefix in proptest::collection::vec(0u64..10, 0..4),
                           period in proptest::collection::vec(0u64..10, 1..5),
                           picks in proptest::collection::btree_set(1usize..=12, 1..6)) {
            let a = s(&prefix, &period);
            let set = ASet::new(a.clone());
            let codes: Vec<Nat> = picks.iter().map(|&l| set.element(l).unwrap()).collect();
            let top = *picks.iter().max().unwrap();
            prop_assert_eq!(recover_from_sample(&codes).unwrap(), a.restrict(top));
        }

        #[test]
        fn hit_continuity(prefix in proptest::collection::vec(0u64..30, 0..6),
                          period in proptest::collection::vec(0u64..30, 1..3),
                          tail in proptest::collection::vec(0u64..30, 1..3),
                          k in 0u64..4) {
            let a = ASet::new(s(&[], &[0]));
            let mut p = prefix.clone();
            p.iter_mut().step_by(2).for_each(|v| if *v % 3 == 0 { *v = 6 });
            let x = s(&p, &period);
            if let Some(i) = nth_hit(&a, &x, &n(k)) {
                let y = EventuallyPeriodicSeq::node_then(&x.restrict(i + 1), tail.iter().map(|&v| n(v)).collect()).unwrap();
                prop_assert_eq!(encode_f(&a, &x, &n(k)), encode_f(&a, &y, &n(k)));
            }
        }
    }
}
