//! Deciding `c ≥ Exit([[a]])` off the branch `a`.

use super::cylinder::{code_regions, inf_over_region, Region};
use super::ChallengeCode;
use crate::classes::CoordSet;
use crate::error::{invalid, Error, Result};
use crate::nat::{as_json, Nat};
use crate::seq::{EventuallyPeriodicSeq, NodeSeq};
use crate::tree::PresentedTree;
use num_traits::ToPrimitive;
use serde::Serialize;

/// Default deepest deviation level we are willing to materialize.
pub const DEFAULT_MAX_LEVEL: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "camelCase")]
pub enum DominationCheck {
    Holds,
    /// Points of `cylinder⌢v⌢…` with `v ≠ excluded` exit at `level + 1`, yet
    /// the code takes `value < level + 1` at `witness`.
    #[serde(rename_all = "camelCase")]
    Counterexample {
        level: usize,
        cylinder: NodeSeq,
        #[serde(with = "as_json")]
        excluded: Nat,
        witness: EventuallyPeriodicSeq,
        #[serde(with = "as_json")]
        value: Nat,
    },
}

fn deviation(a: &EventuallyPeriodicSeq, l: usize) -> Region {
    let mut r = Region::cylinder(&a.restrict(l));
    let mut c = CoordSet::any();
    c.excluded.insert(a.at(l).clone());
    r.constraints.insert(l, c);
    r
}

/// Past this level the leaf reached along `a` and its behavior on deviation
/// cylinders no longer change in kind.
fn stabilization_level(c: &ChallengeCode, a: &EventuallyPeriodicSeq) -> usize {
    let mut lvl = c.max_coord().map_or(0, |m| m + 1).max(a.horizon()).max(c.analysis_depth());
    for t in c.trees() {
        lvl = lvl.max(t.depth_bound());
        for s in t.spines() {
            lvl = lvl.max(s.agreement(a).unwrap_or(0));
        }
    }
    lvl + 1
}

pub fn check_dominates_exit(c: &ChallengeCode, tree: &PresentedTree, max_level: usize) -> Result<DominationCheck> {
    let a = match tree.spines() {
        [a] if tree.extra_nodes().is_empty() => a,
        _ => return Err(invalid("domination is checked against a single-spine tree [[a]]")),
    };
    let stable = stabilization_level(c, a);
    let failure = |l: usize| -> Option<DominationCheck> {
        let inf = inf_over_region(c, &deviation(a, l));
        (inf.value < Nat::from(l + 1)).then(|| DominationCheck::Counterexample {
            level: l,
            cylinder: a.restrict(l),
            excluded: a.at(l).clone(),
            witness: inf.witness,
            value: inf.value,
        })
    };
    for l in 0..=stable {
        if let Some(cx) = failure(l) {
            return Ok(cx);
        }
    }
    // Beyond `stable` every deviation region meets the same leaf.
    let probe = deviation(a, stable + 1);
    let regions = code_regions(c, &probe);
    let grows = regions.iter().all(|(_, leaf)| match leaf {
        ChallengeCode::Exit { tree, .. } => tree.is_branch(a),
        _ => false,
    });
    if grows {
        return Ok(DominationCheck::Holds);
    }
    let v = inf_over_region(c, &probe).value;
    let first = v.to_usize().map(|v| v.max(stable + 1));
    match first {
        Some(l) if l <= max_level => Ok(failure(l).expect("constant inf fails from here on")),
        _ => Err(Error::BoundExceeded(format!(
            "domination fails only past level {max_level}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{ClassPartition, ClassSpec};
    use crate::tree::ExitLevel;

    fn zeros() -> EventuallyPeriodicSeq {
        EventuallyPeriodicSeq::from_u64s(&[], &[0])
    }

    #[test]
    fn examples() {
        let t = PresentedTree::single(zeros());
        let holds = |c: &ChallengeCode| check_dominates_exit(c, &t, DEFAULT_MAX_LEVEL).unwrap();
        assert_eq!(holds(&ChallengeCode::exit_single(zeros(), 0, 0)), DominationCheck::Holds);
        assert_eq!(holds(&ChallengeCode::exit_single(zeros(), 0, 2)), DominationCheck::Holds);
        match holds(&ChallengeCode::constant(5)) {
            DominationCheck::Counterexample { level, cylinder, witness, value, .. } => {
                assert_eq!(level, 5);
                assert_eq!(cylinder, NodeSeq::from_u64s(&[0, 0, 0, 0, 0]));
                assert_eq!(value, Nat::from(5u32));
                assert_eq!(t.exit_level(&witness), ExitLevel::Level(6));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn early_failure_under_a_query() {
        let a = EventuallyPeriodicSeq::from_u64s(&[1, 2], &[3]);
        let t = PresentedTree::single(a.clone());
        let split = ClassPartition::new(vec![
            ClassSpec::finite(&[7]),
            ClassSpec::new(1, [0], Nat::from(8u32), (0..7u32).map(Nat::from)).unwrap(),
        ])
        .unwrap();
        let c = ChallengeCode::query(
            2,
            split,
            vec![ChallengeCode::constant(1), ChallengeCode::exit_single(a.clone(), 0, 0)],
        )
        .unwrap();
        match check_dominates_exit(&c, &t, DEFAULT_MAX_LEVEL).unwrap() {
            DominationCheck::Counterexample { level, witness, value, .. } => {
                assert_eq!(level, 1);
                assert_eq!(witness.at(2), &Nat::from(7u32));
                assert_eq!(c.eval(&witness), value);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bound_exceeded_for_huge_constants() {
        let t = PresentedTree::single(zeros());
        let c = ChallengeCode::constant(1 << 40);
        assert!(matches!(check_dominates_exit(&c, &t, 1000), Err(Error::BoundExceeded(_))));
    }
}
