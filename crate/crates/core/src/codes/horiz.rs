//! Codes over a finite alphabet `X = {0, …, k-1}` for the horizontal decoder.

use crate::error::{invalid, Error, Result};
use crate::nat::{as_json, vec_json, Nat};
use crate::seq::{EventuallyPeriodicSeq, NodeSeq};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Largest number of points a bounded domination check may visit.
pub const SEARCH_CAP: u64 = 10_000_000;

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawHoriz {
    Const {
        #[serde(with = "as_json")]
        value: Nat,
    },
    Firsthit {
        #[serde(with = "vec_json")]
        set: Vec<Nat>,
        #[serde(with = "as_json", default)]
        offset: Nat,
    },
    Query {
        coord: usize,
        classes: Vec<NodeSeq>,
        children: Vec<HorizCode>,
    },
}

/// Leaves are constants or `FIRSTHIT(S, k)`, which is `i + 1 + k` for the
/// first index `i` with `x(i) ∈ S` and `k` when there is none.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawHoriz")]
pub enum HorizCode {
    Const {
        #[serde(with = "as_json")]
        value: Nat,
    },
    #[serde(rename = "firsthit")]
    FirstHit {
        #[serde(serialize_with = "ser_set")]
        set: BTreeSet<Nat>,
        #[serde(with = "as_json")]
        offset: Nat,
    },
    Query {
        coord: usize,
        #[serde(serialize_with = "ser_sets")]
        classes: Vec<BTreeSet<Nat>>,
        children: Vec<HorizCode>,
    },
}

fn ser_set<S: serde::Serializer>(set: &BTreeSet<Nat>, s: S) -> std::result::Result<S::Ok, S::Error> {
    NodeSeq(set.iter().cloned().collect()).serialize(s)
}

fn ser_sets<S: serde::Serializer>(sets: &[BTreeSet<Nat>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<NodeSeq> = sets.iter().map(|c| NodeSeq(c.iter().cloned().collect())).collect();
    v.serialize(s)
}

impl TryFrom<RawHoriz> for HorizCode {
    type Error = Error;
    fn try_from(r: RawHoriz) -> Result<Self> {
        Ok(match r {
            RawHoriz::Const { value } => HorizCode::Const { value },
            RawHoriz::Firsthit { set, offset } => HorizCode::FirstHit { set: set.into_iter().collect(), offset },
            RawHoriz::Query { coord, classes, children } => HorizCode::query(
                coord,
                classes.into_iter().map(|c| c.0.into_iter().collect()).collect(),
                children,
            )?,
        })
    }
}

impl HorizCode {
    pub fn constant(v: u64) -> Self {
        HorizCode::Const { value: Nat::from(v) }
    }

    pub fn first_hit(set: &[u64], offset: u64) -> Self {
        HorizCode::FirstHit { set: set.iter().map(|&v| Nat::from(v)).collect(), offset: Nat::from(offset) }
    }

    pub fn query(coord: usize, classes: Vec<BTreeSet<Nat>>, children: Vec<HorizCode>) -> Result<Self> {
        if classes.len() != children.len() || classes.is_empty() {
            return Err(invalid("query node needs one child per class"));
        }
        let total: usize = classes.iter().map(BTreeSet::len).sum();
        let union: BTreeSet<&Nat> = classes.iter().flatten().collect();
        if union.len() != total {
            return Err(invalid("query classes overlap"));
        }
        Ok(HorizCode::Query { coord, classes, children })
    }

    /// Checks that every query partitions the alphabet `{0, …, size-1}`.
    pub fn check_alphabet(&self, size: usize) -> Result<()> {
        let alphabet: BTreeSet<Nat> = (0..size).map(Nat::from).collect();
        match self {
            HorizCode::Query { classes, children, .. } => {
                let union: BTreeSet<Nat> = classes.iter().flatten().cloned().collect();
                if union != alphabet {
                    return Err(invalid("query classes must partition the alphabet"));
                }
                children.iter().try_for_each(|c| c.check_alphabet(size))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &EventuallyPeriodicSeq) -> Nat {
        match self {
            HorizCode::Const { value } => value.clone(),
            HorizCode::FirstHit { set, offset } => match x.first_index_where(|v| set.contains(v)) {
                Some(i) => Nat::from(i + 1) + offset,
                None => offset.clone(),
            },
            HorizCode::Query { coord, classes, children } => {
                let v = x.at(*coord);
                let k = classes.iter().position(|c| c.contains(v)).unwrap_or(classes.len() - 1);
                children[k].eval(x)
            }
        }
    }

    fn max_coord(&self) -> Option<usize> {
        match self {
            HorizCode::Query { coord, children, .. } => {
                children.iter().filter_map(HorizCode::max_coord).chain([*coord]).max()
            }
            _ => None,
        }
    }

    fn max_constant(&self) -> usize {
        match self {
            HorizCode::Const { value } => value.to_usize().unwrap_or(usize::MAX / 4),
            HorizCode::FirstHit { offset, .. } => offset.to_usize().unwrap_or(usize::MAX / 4),
            HorizCode::Query { children, .. } => children.iter().map(HorizCode::max_constant).max().unwrap_or(0),
        }
    }

    /// Exact inf of the code over `[t]`, with entries drawn from the alphabet.
    pub fn inf_over_cylinder(&self, t: &NodeSeq, size: usize) -> Nat {
        let alphabet: BTreeSet<Nat> = (0..size).map(Nat::from).collect();
        let mut allowed: Vec<BTreeSet<Nat>> = t.entries().iter().map(|v| [v.clone()].into()).collect();
        self.inf_on(&mut allowed, &alphabet)
    }

    fn inf_on(&self, allowed: &mut Vec<BTreeSet<Nat>>, alphabet: &BTreeSet<Nat>) -> Nat {
        match self {
            HorizCode::Const { value } => value.clone(),
            HorizCode::FirstHit { set, offset } => {
                let at = |i: usize| allowed.get(i).unwrap_or(alphabet);
                let avoidable = |s: &BTreeSet<Nat>| s.iter().any(|v| !set.contains(v));
                let tail = allowed.len();
                if (0..tail).all(|i| avoidable(at(i))) && avoidable(alphabet) {
                    return offset.clone();
                }
                let meets = |s: &BTreeSet<Nat>| s.iter().any(|v| set.contains(v));
                let q = (0..=tail).find(|&i| meets(at(i))).expect("an unavoidable coordinate meets the set");
                Nat::from(q + 1) + offset
            }
            HorizCode::Query { coord, classes, children } => {
                if allowed.len() <= *coord {
                    allowed.resize(coord + 1, alphabet.clone());
                }
                let saved = allowed[*coord].clone();
                let mut best: Option<Nat> = None;
                for (class, child) in classes.iter().zip(children) {
                    let meet: BTreeSet<Nat> = saved.intersection(class).cloned().collect();
                    if meet.is_empty() {
                        continue;
                    }
                    allowed[*coord] = meet;
                    let v = child.inf_on(allowed, alphabet);
                    best = Some(best.map_or(v.clone(), |b| b.min(v)));
                }
                allowed[*coord] = saved;
                best.expect("classes cover the alphabet")
            }
        }
    }

    /// Whether `g(x) ≥ f_H(x)` for all `x` over the alphabet. Violations, if
    /// any, occur at points `u⌢z^ω` with `|u|` bounded by the query depth plus
    /// the largest constant, so a finite search decides it.
    pub fn dominates(&self, members: &BTreeSet<Nat>, size: usize) -> Result<bool> {
        let len = self.max_coord().map_or(0, |c| c + 1) + self.max_constant() + 2;
        let points = (size as u64).checked_pow(len as u32 + 1).filter(|&p| p <= SEARCH_CAP);
        if points.is_none() {
            return Err(Error::BoundExceeded("domination search space too large".into()));
        }
        let mut u = vec![0usize; len];
        loop {
            for z in 0..size {
                let x = EventuallyPeriodicSeq::new(
                    u.iter().map(|&v| Nat::from(v)).collect(),
                    vec![Nat::from(z)],
                )?;
                if self.eval(&x) < crate::encode::horiz_encode(members, &x) {
                    return Ok(false);
                }
            }
            let mut i = 0;
            loop {
                if i == len {
                    return Ok(true);
                }
                u[i] += 1;
                if u[i] < size {
                    break;
                }
                u[i] = 0;
                i += 1;
            }
        }
    }
}

impl Default for HorizCode {
    fn default() -> Self {
        HorizCode::Const { value: Nat::zero() }
    }
}
