//! Finitely presented trees on ω and the exit function.

use crate::error::{Error, Result};
use crate::nat::Nat;
use crate::seq::{EventuallyPeriodicSeq, NodeSeq};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawTree {
    spines: Vec<EventuallyPeriodicSeq>,
    #[serde(default)]
    extra_nodes: Vec<NodeSeq>,
}

/// A tree given as the union of the prefix chains of finitely many
/// eventually periodic spines and a finite prefix-closed node set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTree", into = "RawTree")]
pub struct PresentedTree {
    spines: Vec<EventuallyPeriodicSeq>,
    extra: BTreeSet<NodeSeq>,
}

impl TryFrom<RawTree> for PresentedTree {
    type Error = Error;
    fn try_from(r: RawTree) -> Result<Self> {
        Ok(PresentedTree::new(r.spines, r.extra_nodes))
    }
}

impl From<PresentedTree> for RawTree {
    fn from(t: PresentedTree) -> Self {
        RawTree { spines: t.spines, extra_nodes: t.extra.into_iter().collect() }
    }
}

/// Result of the exit function: the first level at which a point leaves the
/// tree, or `Divergent` when the point is a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitLevel {
    Level(usize),
    Divergent,
}

impl PresentedTree {
    /// Extra nodes are closed under (nonempty) prefixes; the root is implicit.
    pub fn new(spines: Vec<EventuallyPeriodicSeq>, extra: Vec<NodeSeq>) -> Self {
        let mut spines = spines;
        spines.sort();
        spines.dedup();
        let mut closed = BTreeSet::new();
        for node in extra {
            for l in 1..=node.len() {
                closed.insert(node.restrict(l));
            }
        }
        PresentedTree { spines, extra: closed }
    }

    /// The tree `[[a]]` of all initial segments of `a`.
    pub fn single(a: EventuallyPeriodicSeq) -> Self {
        PresentedTree { spines: vec![a], extra: BTreeSet::new() }
    }

    pub fn spines(&self) -> &[EventuallyPeriodicSeq] {
        &self.spines
    }

    pub fn extra_nodes(&self) -> &BTreeSet<NodeSeq> {
        &self.extra
    }

    pub fn extra_depth(&self) -> usize {
        self.extra.iter().map(NodeSeq::len).max().unwrap_or(0)
    }

    pub fn contains(&self, t: &NodeSeq) -> bool {
        t.is_empty() || self.spines.iter().any(|s| s.extends(t)) || self.extra.contains(t)
    }

    pub fn is_branch(&self, x: &EventuallyPeriodicSeq) -> bool {
        self.spines.iter().any(|s| s == x)
    }

    /// `Exit(T)(x) = min { l : x restricted to l is not in T }`.
    pub fn exit_level(&self, x: &EventuallyPeriodicSeq) -> ExitLevel {
        if self.is_branch(x) {
            return ExitLevel::Divergent;
        }
        let on_spines = self
            .spines
            .iter()
            .map(|s| s.agreement(x).expect("x is not a spine"))
            .max()
            .unwrap_or(0);
        let in_extra = (1..=self.extra_depth())
            .take_while(|&l| self.extra.contains(&x.restrict(l)))
            .last()
            .unwrap_or(0);
        ExitLevel::Level(on_spines.max(in_extra) + 1)
    }

    /// Values `n` with `t⌢n` in the tree.
    pub fn children(&self, t: &NodeSeq) -> BTreeSet<Nat> {
        let mut out = BTreeSet::new();
        if !self.contains(t) {
            return out;
        }
        for s in &self.spines {
            if s.extends(t) {
                out.insert(s.at(t.len()).clone());
            }
        }
        for e in self.extra.range(t.clone()..) {
            if !t.is_prefix_of(e) {
                break;
            }
            if e.len() == t.len() + 1 {
                out.insert(e.0[t.len()].clone());
            }
        }
        out
    }

    /// Least exit level over every point of the cylinder `[t]` that exits.
    ///
    /// A presented tree has finitely many children at each node, so some
    /// one-step extension of any member leaves the tree and the minimum
    /// always exists.
    pub fn min_exit_on_cylinder(&self, t: &NodeSeq) -> usize {
        match (0..=t.len()).find(|&l| !self.contains(&t.restrict(l))) {
            Some(l) => l,
            None => t.len() + 1,
        }
    }

    /// The section `{u : ⟨n⟩⌢u ∈ T}`.
    pub fn section(&self, n: &Nat) -> PresentedTree {
        let spines = self
            .spines
            .iter()
            .filter(|s| s.at(0) == n)
            .map(|s| s.shift(1))
            .collect();
        let extra = self
            .extra
            .iter()
            .filter(|e| e.len() >= 2 && &e.0[0] == n)
            .map(|e| NodeSeq(e.0[1..].to_vec()))
            .collect();
        PresentedTree::new(spines, extra)
    }

    /// Every natural mentioned in the presentation.
    pub fn constants(&self) -> impl Iterator<Item = &Nat> {
        self.spines
            .iter()
            .flat_map(|s| s.prefix().iter().chain(s.period()))
            .chain(self.extra.iter().flat_map(|e| e.0.iter()))
    }

    /// A level beyond which the tree is the disjoint union of spine tails.
    pub fn depth_bound(&self) -> usize {
        let spine = self
            .spines
            .iter()
            .enumerate()
            .flat_map(|(i, s)| {
                self.spines[i + 1..]
                    .iter()
                    .map(move |o| s.agreement(o).unwrap_or(0))
                    .chain(std::iter::once(s.horizon()))
            })
            .max()
            .unwrap_or(0);
        spine.max(self.extra_depth())
    }
}
