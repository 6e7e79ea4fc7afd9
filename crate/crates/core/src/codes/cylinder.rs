//! Exact inf/sup of a code over a product region of Baire space.

use super::ChallengeCode;
use crate::classes::CoordSet;
use crate::nat::Nat;
use crate::seq::{EventuallyPeriodicSeq, NodeSeq};
use crate::tree::PresentedTree;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// A fixed prefix followed by independent per-coordinate constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub prefix: NodeSeq,
    pub constraints: BTreeMap<usize, CoordSet>,
}

impl Region {
    pub fn cylinder(t: &NodeSeq) -> Self {
        Region { prefix: t.clone(), constraints: BTreeMap::new() }
    }

    pub fn allowed(&self, i: usize) -> CoordSet {
        match self.prefix.get(i) {
            Some(v) => CoordSet::fixed(v.clone()),
            None => self.constraints.get(&i).cloned().unwrap_or_default(),
        }
    }

    /// First coordinate past which every coordinate is unconstrained.
    pub fn span(&self) -> usize {
        let c = self.constraints.keys().next_back().map_or(0, |k| k + 1);
        c.max(self.prefix.len())
    }

    /// Restricts coordinate `i` further; `None` if that empties it.
    pub fn refine(&self, i: usize, f: impl FnOnce(&CoordSet) -> CoordSet) -> Option<Region> {
        let cur = self.allowed(i);
        let next = f(&cur);
        if !next.is_nonempty() {
            return None;
        }
        let mut out = self.clone();
        if i >= self.prefix.len() {
            out.constraints.insert(i, next);
        }
        Some(out)
    }

    pub fn contains(&self, x: &EventuallyPeriodicSeq) -> bool {
        x.extends(&self.prefix) && self.constraints.iter().all(|(&i, c)| c.contains(x.at(i)))
    }

    pub fn admits_node(&self, u: &NodeSeq) -> bool {
        u.entries().iter().enumerate().all(|(i, v)| self.allowed(i).contains(v))
    }

    /// The point taking the least allowed value at each constrained
    /// coordinate, starting from `u`, then zero forever.
    pub fn least_completion(&self, u: &NodeSeq) -> EventuallyPeriodicSeq {
        let mut entries = u.0.clone();
        for i in u.len()..self.span() {
            entries.push(self.allowed(i).least_at_least(&Nat::zero()).expect("nonempty region"));
        }
        EventuallyPeriodicSeq::new(entries, vec![Nat::zero()]).unwrap()
    }
}

/// The greatest lower bound of a code on a cylinder together with a point
/// attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderInf {
    pub value: Nat,
    pub witness: EventuallyPeriodicSeq,
}

/// Inf and sup of a leaf on a region; `sup == None` means unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafRange {
    pub inf: Nat,
    pub sup: Option<Nat>,
    pub witness: EventuallyPeriodicSeq,
}

/// Splits `region` along the query tree, returning each nonempty piece with
/// the leaf that applies there.
pub fn code_regions<'a>(code: &'a ChallengeCode, region: &Region) -> Vec<(Region, &'a ChallengeCode)> {
    let mut out = Vec::new();
    split(code, region.clone(), &mut out);
    out
}

fn split<'a>(code: &'a ChallengeCode, region: Region, out: &mut Vec<(Region, &'a ChallengeCode)>) {
    match code {
        ChallengeCode::Query { coord, partition, children } => {
            if let Some(v) = region.prefix.get(*coord) {
                let v = v.clone();
                split(&children[partition.classify(&v)], region, out);
                return;
            }
            for (class, child) in partition.classes().iter().zip(children) {
                if let Some(r) = region.refine(*coord, |c| c.intersect_class(class)) {
                    split(child, r, out);
                }
            }
        }
        leaf => out.push((region, leaf)),
    }
}

pub fn leaf_range(leaf: &ChallengeCode, region: &Region) -> LeafRange {
    match leaf {
        ChallengeCode::Const { value } => LeafRange {
            inf: value.clone(),
            sup: Some(value.clone()),
            witness: region.least_completion(&NodeSeq::root()),
        },
        ChallengeCode::Exit { tree, default, offset, lift } => {
            exit_range(tree, &(default + offset), &(Nat::from(*lift) + offset), region)
        }
        ChallengeCode::Thresh { inner, cutoff } => {
            let r = leaf_range(inner, region);
            let bit = |b: bool| if b { Nat::one() } else { Nat::zero() };
            let inf = bit(&r.inf >= cutoff);
            let sup = bit(r.sup.as_ref().is_none_or(|s| s >= cutoff));
            LeafRange { inf, sup: Some(sup), witness: r.witness }
        }
        ChallengeCode::Query { .. } => unreachable!("regions end at leaves"),
    }
}

/// Exit levels attainable inside `region`: the levels `l ≤ limit` at which
/// some point of the region leaves the tree, and whether a branch lies in it.
pub struct ExitProfile {
    pub levels: Vec<(usize, NodeSeq)>,
    pub divergent: Option<EventuallyPeriodicSeq>,
    pub limit: usize,
}

pub fn exit_profile(tree: &PresentedTree, region: &Region) -> ExitProfile {
    let divergent = tree
        .spines()
        .iter()
        .find(|s| region.contains(s))
        .cloned();
    let limit = region.span().max(tree.depth_bound()) + 2;
    let mut levels = Vec::new();
    for l in 1..=limit {
        if let Some(node) = exit_node(tree, region, l) {
            levels.push((l, node));
        }
    }
    ExitProfile { levels, divergent, limit }
}

/// A node `u⌢v` of length `l` allowed by the region with `u ∈ T`, `u⌢v ∉ T`.
fn exit_node(tree: &PresentedTree, region: &Region, l: usize) -> Option<NodeSeq> {
    let mut nodes: Vec<NodeSeq> = tree.spines().iter().map(|s| s.restrict(l - 1)).collect();
    nodes.extend(tree.extra_nodes().iter().filter(|e| e.len() == l - 1).cloned());
    if l == 1 {
        nodes.push(NodeSeq::root());
    }
    nodes.sort();
    nodes.dedup();
    let allowed = region.allowed(l - 1);
    for u in nodes.into_iter().filter(|u| region.admits_node(u)) {
        let kids = tree.children(&u);
        if let Some(v) = allowed.members_from(&Nat::zero()).find(|v| !kids.contains(v)) {
            return Some(u.child(v));
        }
    }
    None
}

fn exit_range(tree: &PresentedTree, on_branch: &Nat, offset: &Nat, region: &Region) -> LeafRange {
    let p = exit_profile(tree, region);
    let first = p.levels.first().map(|(l, u)| (Nat::from(*l) + offset, u.clone()));
    let at_default = p.divergent.as_ref().map(|s| (on_branch.clone(), s.clone()));
    let (inf, witness) = match (first, at_default) {
        (Some((a, u)), Some((b, s))) => {
            if b < a {
                (b, s)
            } else {
                (a, region.least_completion(&u))
            }
        }
        (Some((a, u)), None) => (a, region.least_completion(&u)),
        (None, Some((b, s))) => (b, s),
        (None, None) => unreachable!("every point of a nonempty region exits or is a branch"),
    };
    let sup = match p.divergent {
        Some(_) => None,
        None => p.levels.last().map(|(l, _)| Nat::from(*l) + offset),
    };
    LeafRange { inf, sup, witness }
}

pub fn inf_over_region(code: &ChallengeCode, region: &Region) -> CylinderInf {
    code_regions(code, region)
        .iter()
        .map(|(r, leaf)| leaf_range(leaf, r))
        .min_by(|a, b| a.inf.cmp(&b.inf))
        .map(|r| CylinderInf { value: r.inf, witness: r.witness })
        .expect("a region meets at least one leaf")
}

pub fn sup_over_region(code: &ChallengeCode, region: &Region) -> Option<Nat> {
    let mut best = Nat::zero();
    for (r, leaf) in code_regions(code, region) {
        best = best.max(leaf_range(leaf, &r).sup?);
    }
    Some(best)
}

pub fn determined_on_region(code: &ChallengeCode, region: &Region) -> Option<Nat> {
    let mut value: Option<Nat> = None;
    for (r, leaf) in code_regions(code, region) {
        let range = leaf_range(leaf, &r);
        if range.sup.as_ref() != Some(&range.inf) {
            return None;
        }
        match &value {
            Some(v) if v != &range.inf => return None,
            _ => value = Some(range.inf),
        }
    }
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{ClassPartition, ClassSpec};

    fn node(v: &[u64]) -> NodeSeq {
        NodeSeq::from_u64s(v)
    }

    fn zeros() -> EventuallyPeriodicSeq {
        EventuallyPeriodicSeq::from_u64s(&[], &[0])
    }

    /// Minimum over represented extensions `t⌢w⌢z^ω`, entries ≤ 9, |w| ≤ 3.
    fn brute_min(c: &ChallengeCode, t: &NodeSeq) -> Nat {
        let mut best: Option<Nat> = None;
        let mut stack = vec![t.clone()];
        while let Some(u) = stack.pop() {
            for z in 0..10u64 {
                let x = EventuallyPeriodicSeq::node_then(&u, vec![Nat::from(z)]).unwrap();
                let v = c.eval(&x);
                best = Some(best.map_or(v.clone(), |b| b.min(v)));
            }
            if u.len() < t.len() + 3 {
                for n in 0..10u64 {
                    stack.push(u.child(Nat::from(n)));
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn inf_examples() {
        let c = ChallengeCode::exit_single(zeros(), 0, 0);
        assert_eq!(c.inf_over_cylinder(&node(&[])).value, Nat::zero());
        assert_eq!(c.inf_over_cylinder(&node(&[5])).value, Nat::from(1u32));
        let c3 = ChallengeCode::exit_single(zeros(), 0, 3);
        assert_eq!(c3.inf_over_cylinder(&node(&[0, 5])).value, Nat::from(5u32));
        for t in [node(&[]), node(&[5])] {
            assert_eq!(c.inf_over_cylinder(&t).value, brute_min(&c, &t));
        }
        assert_eq!(c3.inf_over_cylinder(&node(&[0, 5])).value, brute_min(&c3, &node(&[0, 5])));
    }

    #[test]
    fn determined_examples() {
        assert_eq!(ChallengeCode::constant(5).determined_value(&node(&[])), Some(Nat::from(5u32)));
        let c = ChallengeCode::exit_single(zeros(), 0, 0);
        assert_eq!(c.determined_value(&node(&[0, 5])), Some(Nat::from(2u32)));
        assert_eq!(c.determined_value(&node(&[0])), None);
    }

    #[test]
    fn witnesses_attain_the_inf() {
        let split = ClassPartition::new(vec![ClassSpec::finite(&[0, 1]), ClassSpec::at_least(2)]).unwrap();
        let tree = PresentedTree::new(
            vec![EventuallyPeriodicSeq::from_u64s(&[1], &[2])],
            vec![node(&[0, 4, 4])],
        );
        let c = ChallengeCode::query(
            1,
            split,
            vec![ChallengeCode::exit(tree.clone(), 9, 1), ChallengeCode::constant(3)],
        )
        .unwrap();
        for t in [node(&[]), node(&[0]), node(&[1]), node(&[0, 4]), node(&[1, 2, 2])] {
            let inf = c.inf_over_cylinder(&t);
            assert!(inf.witness.extends(&t));
            assert_eq!(c.eval(&inf.witness), inf.value, "t = {t}");
            assert_eq!(inf.value, brute_min(&c, &t), "t = {t}");
        }
    }

    #[test]
    fn sup_is_unbounded_near_a_spine() {
        let c = ChallengeCode::exit_single(zeros(), 0, 0);
        assert_eq!(c.sup_over_cylinder(&node(&[0])), None);
        assert_eq!(c.sup_over_cylinder(&node(&[0, 3])), Some(Nat::from(2u32)));
    }
}
