//! A small language of total functions `ω^ω → ω`.
//!
//! A code is a finite query tree: internal nodes read one coordinate and
//! branch on which class of a partition it falls in; leaves are constants,
//! exit levels of presented trees (with an explicit value on branches), or
//! 0/1 thresholds of those.

pub mod cylinder;
mod dominate;
pub use dominate::{check_dominates_exit, DominationCheck, DEFAULT_MAX_LEVEL};
pub mod horiz;

pub use cylinder::{LeafRange, Region};


use crate::classes::ClassPartition;
use crate::error::{invalid, Error, Result};
use crate::nat::{as_json, Nat};
use crate::seq::{EventuallyPeriodicSeq, NodeSeq};
use crate::tree::{ExitLevel, PresentedTree};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawCode {
    Const {
        #[serde(with = "as_json")]
        value: Nat,
    },
    Exit {
        tree: PresentedTree,
        #[serde(with = "as_json", default)]
        default: Nat,
        #[serde(with = "as_json", default)]
        offset: Nat,
        #[serde(default)]
        lift: usize,
    },
    Thresh {
        inner: Box<ChallengeCode>,
        #[serde(with = "as_json")]
        cutoff: Nat,
    },
    Query {
        coord: usize,
        partition: ClassPartition,
        children: Vec<ChallengeCode>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawCode")]
pub enum ChallengeCode {
    Const {
        #[serde(with = "as_json")]
        value: Nat,
    },
    /// Exit level plus `offset + lift`; `default + offset` on a branch.
    /// `lift` only arises from coordinate specialization.
    Exit {
        tree: PresentedTree,
        #[serde(with = "as_json")]
        default: Nat,
        #[serde(with = "as_json")]
        offset: Nat,
        #[serde(default, skip_serializing_if = "is_zero")]
        lift: usize,
    },
    Thresh {
        inner: Box<ChallengeCode>,
        #[serde(with = "as_json")]
        cutoff: Nat,
    },
    Query {
        coord: usize,
        partition: ClassPartition,
        children: Vec<ChallengeCode>,
    },
}

impl TryFrom<RawCode> for ChallengeCode {
    type Error = Error;
    fn try_from(r: RawCode) -> Result<Self> {
        Ok(match r {
            RawCode::Const { value } => ChallengeCode::Const { value },
            RawCode::Exit { tree, default, offset, lift } => {
                ChallengeCode::Exit { tree, default, offset, lift }
            }
            RawCode::Thresh { inner, cutoff } => ChallengeCode::thresh(*inner, cutoff)?,
            RawCode::Query { coord, partition, children } => {
                ChallengeCode::query(coord, partition, children)?
            }
        })
    }
}

impl ChallengeCode {
    pub fn constant(v: u64) -> Self {
        ChallengeCode::Const { value: Nat::from(v) }
    }

    pub fn exit(tree: PresentedTree, default: u64, offset: u64) -> Self {
        ChallengeCode::Exit { tree, default: Nat::from(default), offset: Nat::from(offset), lift: 0 }
    }

    /// `Exit([[a]])` with the given default and offset.
    pub fn exit_single(a: EventuallyPeriodicSeq, default: u64, offset: u64) -> Self {
        Self::exit(PresentedTree::single(a), default, offset)
    }

    pub fn thresh(inner: ChallengeCode, cutoff: Nat) -> Result<Self> {
        if !inner.is_leaf() || matches!(inner, ChallengeCode::Thresh { .. }) {
            return Err(invalid("a threshold wraps a constant or exit leaf"));
        }
        Ok(ChallengeCode::Thresh { inner: Box::new(inner), cutoff })
    }

    pub fn query(coord: usize, partition: ClassPartition, children: Vec<ChallengeCode>) -> Result<Self> {
        if children.len() != partition.len() {
            return Err(invalid("query node needs one child per class"));
        }
        Ok(ChallengeCode::Query { coord, partition, children })
    }

    /// The code reading `x(coord)` and answering 0 on even, 1 on odd.
    pub fn parity(coord: usize) -> Self {
        Self::query(
            coord,
            ClassPartition::parity(),
            vec![Self::constant(0), Self::constant(1)],
        )
        .unwrap()
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self, ChallengeCode::Query { .. })
    }

    pub fn eval(&self, x: &EventuallyPeriodicSeq) -> Nat {
        match self {
            ChallengeCode::Const { value } => value.clone(),
            ChallengeCode::Exit { tree, default, offset, lift } => match tree.exit_level(x) {
                ExitLevel::Level(l) => Nat::from(l + lift) + offset,
                ExitLevel::Divergent => default + offset,
            },
            ChallengeCode::Thresh { inner, cutoff } => {
                if &inner.eval(x) >= cutoff {
                    Nat::one()
                } else {
                    Nat::zero()
                }
            }
            ChallengeCode::Query { coord, partition, children } => {
                children[partition.classify(x.at(*coord))].eval(x)
            }
        }
    }

    /// Partially evaluates on a point whose coordinate 0 is `n`; coordinate
    /// `i + 1` of the original becomes coordinate `i` of the result.
    pub fn specialize_head(&self, n: &Nat) -> ChallengeCode {
        match self {
            ChallengeCode::Const { .. } => self.clone(),
            ChallengeCode::Exit { tree, default, offset, lift } => {
                if tree.contains(&NodeSeq(vec![n.clone()])) {
                    ChallengeCode::Exit {
                        tree: tree.section(n),
                        default: default.clone(),
                        offset: offset.clone(),
                        lift: lift + 1,
                    }
                } else {
                    ChallengeCode::Const { value: Nat::from(lift + 1) + offset }
                }
            }
            ChallengeCode::Thresh { inner, cutoff } => ChallengeCode::Thresh {
                inner: Box::new(inner.specialize_head(n)),
                cutoff: cutoff.clone(),
            },
            ChallengeCode::Query { coord: 0, partition, children } => {
                children[partition.classify(n)].specialize_head(n)
            }
            ChallengeCode::Query { coord, partition, children } => ChallengeCode::Query {
                coord: coord - 1,
                partition: partition.clone(),
                children: children.iter().map(|c| c.specialize_head(n)).collect(),
            },
        }
    }

    /// Largest coordinate read by a query node.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            ChallengeCode::Query { coord, children, .. } => children
                .iter()
                .filter_map(ChallengeCode::max_coord)
                .chain(std::iter::once(*coord))
                .max(),
            _ => None,
        }
    }

    pub fn partitions(&self) -> Vec<&ClassPartition> {
        let mut out = Vec::new();
        self.walk(&mut |c| {
            if let ChallengeCode::Query { partition, .. } = c {
                out.push(partition);
            }
        });
        out
    }

    pub fn trees(&self) -> Vec<&PresentedTree> {
        let mut out = Vec::new();
        self.walk(&mut |c| {
            if let ChallengeCode::Exit { tree, .. } = c {
                out.push(tree);
            }
        });
        out
    }

    /// Every natural mentioned anywhere in the code.
    pub fn constants(&self) -> Vec<Nat> {
        let mut out = Vec::new();
        self.walk(&mut |c| match c {
            ChallengeCode::Const { value } => out.push(value.clone()),
            ChallengeCode::Exit { tree, default, offset, .. } => {
                out.extend(tree.constants().cloned());
                out.push(default.clone());
                out.push(offset.clone());
            }
            ChallengeCode::Thresh { cutoff, .. } => out.push(cutoff.clone()),
            ChallengeCode::Query { partition, .. } => {
                for class in partition.classes() {
                    out.extend(class.constants().cloned());
                    out.push(Nat::from(class.modulus()));
                }
            }
        });
        out
    }

    /// A stem length past which every query is answered and every exit leaf
    /// has fixed its behavior; bounded searches for determining extensions
    /// never need to go deeper than this past the current stem.
    pub fn analysis_depth(&self) -> usize {
        let mut depth = self.max_coord().map_or(0, |c| c + 1);
        self.walk(&mut |c| match c {
            ChallengeCode::Exit { tree, .. } => depth = depth.max(tree.depth_bound() + 1),
            ChallengeCode::Thresh { inner, cutoff } => {
                if let ChallengeCode::Exit { offset, lift, .. } = inner.as_ref() {
                    let base = Nat::from(*lift) + offset;
                    let need = if cutoff > &base { cutoff - &base } else { Nat::zero() };
                    let need = usize::try_from(need).unwrap_or(usize::MAX / 2);
                    depth = depth.max(need + 1);
                }
            }
            _ => {}
        });
        depth
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ChallengeCode)) {
        f(self);
        match self {
            ChallengeCode::Thresh { inner, .. } => inner.walk(f),
            ChallengeCode::Query { children, .. } => children.iter().for_each(|c| c.walk(f)),
            _ => {}
        }
    }

    pub fn inf_over_cylinder(&self, t: &NodeSeq) -> cylinder::CylinderInf {
        cylinder::inf_over_region(self, &Region::cylinder(t))
    }

    pub fn sup_over_cylinder(&self, t: &NodeSeq) -> Option<Nat> {
        cylinder::sup_over_region(self, &Region::cylinder(t))
    }

    /// `Some(v)` iff the code is constantly `v` on `[t]`.
    pub fn determined_value(&self, t: &NodeSeq) -> Option<Nat> {
        cylinder::determined_on_region(self, &Region::cylinder(t))
    }
}

pub use cylinder::CylinderInf;

fn is_zero(n: &usize) -> bool {
    *n == 0
}

/// A function `ω^ω → ω^ω` given by `g(x)(n) = base(⟨n⟩⌢x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionFamilyCode {
    pub base: ChallengeCode,
}

impl FunctionFamilyCode {
    pub fn new(base: ChallengeCode) -> Self {
        FunctionFamilyCode { base }
    }

    pub fn coordinate_code(&self, n: &Nat) -> ChallengeCode {
        self.base.specialize_head(n)
    }

    pub fn eval(&self, x: &EventuallyPeriodicSeq, n: &Nat) -> Nat {
        self.base.eval(&x.prepend(n.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::ClassSpec;

    fn s(p: &[u64], q: &[u64]) -> EventuallyPeriodicSeq {
        EventuallyPeriodicSeq::from_u64s(p, q)
    }

    fn zeros_exit(k: u64) -> ChallengeCode {
        ChallengeCode::exit_single(s(&[], &[0]), 0, k)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ChallengeCode::constant(5).eval(&s(&[1], &[2])), Nat::from(5u32));
        assert_eq!(zeros_exit(0).eval(&s(&[0, 0, 5], &[0])), Nat::from(3u32));
        assert_eq!(zeros_exit(0).eval(&s(&[], &[0])), Nat::zero());
    }

    #[test]
    fn coordinate_code_examples() {
        let g = FunctionFamilyCode::new(ChallengeCode::constant(0));
        assert_eq!(g.coordinate_code(&Nat::from(7u32)), ChallengeCode::constant(0));
        let split = ClassPartition::new(vec![ClassSpec::finite(&[0]), ClassSpec::at_least(1)]).unwrap();
        let g = FunctionFamilyCode::new(
            ChallengeCode::query(0, split, vec![ChallengeCode::constant(1), ChallengeCode::constant(2)]).unwrap(),
        );
        assert_eq!(g.coordinate_code(&Nat::from(0u32)), ChallengeCode::constant(1));
        assert_eq!(g.coordinate_code(&Nat::from(3u32)), ChallengeCode::constant(2));
    }

    #[test]
    fn exit_leaf_specializes_to_section() {
        let a = s(&[1, 2], &[3]);
        let g = FunctionFamilyCode::new(ChallengeCode::exit_single(a.clone(), 4, 0));
        let c1 = g.coordinate_code(&Nat::from(1u32));
        for x in [s(&[2, 3, 3], &[9]), s(&[], &[2]), a.shift(1)] {
            assert_eq!(c1.eval(&x), g.eval(&x, &Nat::from(1u32)));
        }
        assert_eq!(g.coordinate_code(&Nat::from(5u32)), ChallengeCode::constant(1));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let code = ChallengeCode::thresh(zeros_exit(1), Nat::from(2u32)).unwrap();
        let text = serde_json::to_string(&code).unwrap();
        let back: ChallengeCode = serde_json::from_str(&text).unwrap();
        assert_eq!(back, code);
        let bad = r#"{"kind":"query","coord":0,"partition":[{"modulus":1,"residues":[0]}],"children":[]}"#;
        assert!(serde_json::from_str::<ChallengeCode>(bad).is_err());
        let nested = format!(r#"{{"kind":"thresh","inner":{text},"cutoff":1}}"#);
        assert!(serde_json::from_str::<ChallengeCode>(&nested).is_err());
    }
}
